#include "snn/gadgets.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace snn {

int bits_for(std::uint64_t v) {
  int b = 1;
  while (b < 64 && (v >> b) != 0) ++b;
  return b;
}

NeuronId make_neuron(Network& net, Weight bias, Polarity pol, std::string_view label, std::span<const Term> in) {
  NeuronId id = net.add_neuron(bias, pol, label);
  for (const auto& t : in) net.add_synapse(t.src, id, t.w);
  return id;
}

NeuronId make_neuron(Network& net, Weight bias, Polarity pol, std::string_view label,
                     std::initializer_list<Term> in) {
  return make_neuron(net, bias, pol, label, std::span<const Term>(in.begin(), in.size()));
}

NeuronId relay(Network& net, NeuronId src, Polarity pol, std::string_view label) {
  return make_neuron(net, 1, pol, label, {{src, 1}});
}

NeuronId and_gate(Network& net, std::span<const NeuronId> src, Polarity pol, std::string_view label) {
  NeuronId id = net.add_neuron(static_cast<std::int64_t>(src.size()), pol, label);
  for (auto s : src) net.add_synapse(s, id, 1);
  return id;
}

NeuronId or_gate(Network& net, std::span<const NeuronId> src, Polarity pol, std::string_view label) {
  NeuronId id = net.add_neuron(1, pol, label);
  for (auto s : src) net.add_synapse(s, id, 1);
  return id;
}

std::vector<NeuronId> delay_chain(Network& net, NeuronId src, int length, std::string_view label) {
  std::vector<NeuronId> out;
  NeuronId prev = src;
  for (int k = 0; k < length; ++k) {
    prev = relay(net, prev, Polarity::Excitatory, label);
    out.push_back(prev);
  }
  return out;
}

Pot build_pot(Network& net, std::span<const Term> in, Weight bias, int width, bool dual, std::string_view label) {
  if (width < 1 || width > 40) throw std::invalid_argument("pot width out of range");
  Pot p;
  p.width = width;
  std::string base(label);
  for (int i = 0; i < width; ++i) p.copies.push_back(make_neuron(net, bias, Polarity::Excitatory, base + ".copy", in));
  for (int i = 0; i < width; ++i) {
    NeuronId r = net.add_neuron(-1, Polarity::Inhibitory, base + ".on");
    net.add_synapse(r, p.copies[i], Weight::halves(-((std::int64_t{1} << (i + 1)) - 1)));
    p.always_on.push_back(r);
  }
  for (int i = 1; i < width; ++i) {
    NeuronId v = make_neuron(net, 1, Polarity::Inhibitory, base + ".guard", {{p.copies[i], 1}});
    for (int j = 0; j < i; ++j) net.add_synapse(v, p.copies[j], -(std::int64_t{1} << i));
    p.guards.push_back(v);
  }
  for (int i = 0; i < width; ++i) {
    p.out.push_back(make_neuron(net, 1, Polarity::Excitatory, base + ".out", {{p.copies[i], 1}}));
    if (dual) p.out_inh.push_back(make_neuron(net, 1, Polarity::Inhibitory, base + ".out-", {{p.copies[i], 1}}));
  }
  return p;
}

Pot build_pot(Network& net, NeuronId target, int width, bool dual) {
  std::vector<Term> in;
  for (const auto& s : net.synapses())
    if (s.dst == target) in.push_back({s.src, s.w});
  return build_pot(net, in, net.neuron(target).bias, width, dual, net.label(target) + ".pot");
}

Counter build_counter(Network& net, NeuronId inc, std::uint64_t capacity, std::string_view label) {
  Counter c;
  std::string base(label);
  int bits = bits_for(capacity);
  NeuronId carry_in = inc;
  for (int k = 0; k < bits; ++k) {
    NeuronId s = net.add_neuron(1, Polarity::Excitatory, base + ".bit");
    NeuronId t = make_neuron(net, 2, Polarity::Inhibitory, base + ".toggle", {{carry_in, 1}, {s, 1}});
    NeuronId co = make_neuron(net, 2, Polarity::Excitatory, base + ".carry", {{carry_in, 1}, {s, 1}});
    net.add_synapse(s, s, 2);
    net.add_synapse(carry_in, s, 1);
    net.add_synapse(t, s, -4);
    c.bits.push_back(s);
    c.toggles.push_back(t);
    c.carries.push_back(co);
    carry_in = co;
  }
  return c;
}

Timer build_timer(Network& net, NeuronId x, int t, std::string_view label) {
  if (t < 1) throw std::invalid_argument("timer length must be positive");
  Timer tm;
  std::string base(label);
  if (t <= 10) {
    auto d = delay_chain(net, x, t - 1, base + ".delay");
    std::vector<NeuronId> src{x};
    src.insert(src.end(), d.begin(), d.end());
    tm.out = or_gate(net, src, Polarity::Excitatory, base + ".out");
    tm.aux = d;
    return tm;
  }
  // Count two-round oscillator ticks up to V (V = 3 mod 4 so the value is
  // reached exactly one round after the V-th tick), then stretch by D.
  std::int64_t v = 3;
  while (2 * (v + 4) <= t - 5) v += 4;
  int d = t - 5 - static_cast<int>(2 * v);

  NeuronId e1 = relay(net, x, Polarity::Excitatory, base + ".hold");
  NeuronId e2 = relay(net, e1, Polarity::Excitatory, base + ".hold");
  NeuronId rst1 = relay(net, x, Polarity::Inhibitory, base + ".reset");
  NeuronId rst2 = relay(net, e1, Polarity::Inhibitory, base + ".reset");
  NeuronId y = net.add_neuron(1, Polarity::Excitatory, base + ".out");
  NeuronId osci = net.add_neuron(1, Polarity::Inhibitory, base + ".osc-");
  NeuronId osc = net.add_neuron(1, Polarity::Excitatory, base + ".osc");
  net.add_synapse(y, osci, 1);
  net.add_synapse(osci, osci, -1);
  net.add_synapse(y, osc, 1);
  net.add_synapse(osci, osc, -1);
  Counter cnt = build_counter(net, osc, static_cast<std::uint64_t>(v + 8), base + ".count");
  std::vector<Term> st;
  for (std::size_t k = 0; k < cnt.bits.size(); ++k) st.push_back({cnt.bits[k], std::int64_t{1} << k});
  NeuronId stop = make_neuron(net, v, Polarity::Excitatory, base + ".stop", st);
  auto stretch = delay_chain(net, stop, d, base + ".stretch");
  NeuronId halt = relay(net, stretch.empty() ? stop : stretch.back(), Polarity::Inhibitory, base + ".halt");
  net.add_synapse(x, y, 4);
  net.add_synapse(e1, y, 4);
  net.add_synapse(e2, y, 4);
  net.add_synapse(y, y, 1);
  net.add_synapse(halt, y, -2);

  std::vector<NeuronId> cleared{osc, osci, stop, halt};
  for (auto* group : {&cnt.bits, &cnt.carries, &cnt.toggles, &stretch}) cleared.insert(cleared.end(), group->begin(), group->end());
  for (NeuronId u : cleared) {
    net.add_dominant(rst1, u);
    net.add_dominant(rst2, u);
  }
  tm.out = y;
  tm.aux = {e1, e2, rst1, rst2};
  tm.aux.insert(tm.aux.end(), cleared.begin(), cleared.end());
  return tm;
}

Extremum build_extremum(Network& net, const std::vector<std::vector<NeuronId>>& vectors, ExtremumMode mode,
                        std::string_view label) {
  const int k = static_cast<int>(vectors.size());
  if (k == 0) throw std::invalid_argument("extremum needs at least one vector");
  std::size_t w = 0;
  for (const auto& v : vectors) w = std::max(w, v.size());
  std::string base(label);
  const std::size_t before = net.size();
  int rank = mode == ExtremumMode::Max ? k : mode == ExtremumMode::Min ? 1 : (k + 1) / 2;

  std::vector<std::vector<NeuronId>> inh(k);
  for (int i = 0; i < k; ++i)
    for (auto b : vectors[i]) inh[i].push_back(relay(net, b, Polarity::Inhibitory, base + ".inh"));

  // before[j][i] fires iff vector j orders before vector i.
  std::vector<std::vector<NeuronId>> ahead(k, std::vector<NeuronId>(k, 0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      NeuronId c = net.add_neuron(j < i ? 0 : 1, Polarity::Excitatory, base + ".cmp");
      for (std::size_t b = 0; b < vectors[i].size(); ++b) net.add_synapse(vectors[i][b], c, std::int64_t{1} << b);
      for (std::size_t b = 0; b < inh[j].size(); ++b) net.add_synapse(inh[j][b], c, -(std::int64_t{1} << b));
      ahead[j][i] = c;
    }

  Extremum ex;
  for (int i = 0; i < k; ++i) {
    NeuronId ge = net.add_neuron(rank - 1, Polarity::Excitatory, base + ".ge");
    NeuronId le = net.add_neuron(k - rank, Polarity::Excitatory, base + ".le");
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      net.add_synapse(ahead[j][i], ge, 1);
      net.add_synapse(ahead[i][j], le, 1);
    }
    NeuronId pair[2] = {ge, le};
    ex.select.push_back(and_gate(net, pair, Polarity::Excitatory, base + ".select"));
  }
  std::vector<std::vector<NeuronId>> gated(w);
  for (int i = 0; i < k; ++i)
    for (std::size_t b = 0; b < vectors[i].size(); ++b) {
      NeuronId pair[2] = {ex.select[i], vectors[i][b]};
      gated[b].push_back(and_gate(net, pair, Polarity::Excitatory, base + ".gate"));
    }
  ex.aux = net.size() - before;
  for (std::size_t b = 0; b < w; ++b) ex.out.push_back(or_gate(net, gated[b], Polarity::Excitatory, base + ".out"));
  return ex;
}

std::vector<NeuronId> build_chain(Network& net, NeuronId start, int length, std::string_view label) {
  std::vector<NeuronId> taps{start};
  for (int k = 1; k < length; ++k) taps.push_back(relay(net, taps.back(), Polarity::Excitatory, label));
  return taps;
}

Sequencer build_sequencer(Network& net, std::span<const NeuronId> sources, int length, std::string_view label) {
  std::string base(label);
  Sequencer s;
  s.any = or_gate(net, sources, Polarity::Excitatory, base + ".any");
  NeuronId prev = relay(net, s.any, Polarity::Inhibitory, base + ".prev");
  s.pulse = make_neuron(net, 1, Polarity::Excitatory, base + ".pulse", {{s.any, 1}, {prev, -1}});
  s.taps = build_chain(net, s.pulse, length, base + ".tap");
  return s;
}

namespace {

std::vector<NeuronId> decode_direct(Network& net, std::span<const NeuronId> bits, std::span<const NeuronId> inh,
                                    const std::string& label, std::optional<NeuronId> enable) {
  const std::size_t d = bits.size();
  std::vector<NeuronId> lines;
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j) {
    NeuronId c = net.add_neuron(std::popcount(j) + (enable ? 1 : 0), Polarity::Excitatory, label);
    if (enable) net.add_synapse(*enable, c, 1);
    for (std::size_t b = 0; b < d; ++b) {
      if ((j >> b) & 1)
        net.add_synapse(bits[b], c, 1);
      else
        net.add_synapse(inh[b], c, -1);
    }
    lines.push_back(c);
  }
  return lines;
}

}  // namespace

Index build_index(Network& net, std::span<const NeuronId> bits, std::span<const NeuronId> bits_inh,
                  std::string_view label, std::optional<NeuronId> enable, std::optional<NeuronId> strobe) {
  if (bits.size() != bits_inh.size() || bits.size() > 24) throw std::invalid_argument("bad index width");
  std::string base(label);
  Index idx;
  const std::size_t d = bits.size();
  if (d <= 3) {
    idx.lines = decode_direct(net, bits, bits_inh, base, enable);
    idx.latency = 1;
    if (strobe) {
      NeuronId late = relay(net, *strobe, Polarity::Excitatory, base + ".strobe");
      for (NeuronId line : idx.lines) {
        NeuronId pair[2] = {line, late};
        idx.strobed.push_back(and_gate(net, pair, Polarity::Excitatory, base + ".strobed"));
      }
    }
    return idx;
  }
  std::size_t lo = d / 2;
  auto low = decode_direct(net, bits.subspan(0, lo), bits_inh.subspan(0, lo), base + ".lo", enable);
  auto high = decode_direct(net, bits.subspan(lo), bits_inh.subspan(lo), base + ".hi", enable);
  std::vector<NeuronId> high_strobed;
  if (strobe)
    for (NeuronId h : high) {
      NeuronId pair[2] = {h, *strobe};
      high_strobed.push_back(and_gate(net, pair, Polarity::Excitatory, base + ".hi.strobed"));
    }
  const std::uint64_t lo_mask = (std::uint64_t{1} << lo) - 1;
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j) {
    NeuronId pair[2] = {low[j & lo_mask], high[j >> lo]};
    idx.lines.push_back(and_gate(net, pair, Polarity::Excitatory, base));
    if (strobe) {
      NeuronId spair[2] = {low[j & lo_mask], high_strobed[j >> lo]};
      idx.strobed.push_back(and_gate(net, spair, Polarity::Excitatory, base + ".strobed"));
    }
  }
  idx.latency = 2;
  return idx;
}

std::vector<NeuronId> build_binary_encoder(Network& net, std::span<const NeuronId> onehot, int width,
                                           std::uint64_t offset, std::string_view label) {
  std::vector<NeuronId> out;
  for (int b = 0; b < width; ++b) {
    NeuronId e = net.add_neuron(1, Polarity::Excitatory, label);
    for (std::size_t i = 0; i < onehot.size(); ++i)
      if (((i + offset) >> b) & 1) net.add_synapse(onehot[i], e, 1);
    out.push_back(e);
  }
  return out;
}

}  // namespace snn
