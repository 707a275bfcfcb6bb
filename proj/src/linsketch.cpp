#include "snn/linsketch.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace snn {

namespace {

struct Fraction {
  std::int64_t num = 0, den = 1;
};

bool parse_int(std::string_view s, std::int64_t& v) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_fraction(const std::string& tok, Fraction& f) {
  std::string_view s = tok;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    if (!parse_int(s.substr(0, slash), f.num) || !parse_int(s.substr(slash + 1), f.den) || f.den <= 0) return false;
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    const bool neg = !s.empty() && s[0] == '-';
    std::string_view whole = s.substr(neg, dot - neg), frac = s.substr(dot + 1);
    std::int64_t w = 0, fr = 0;
    if ((!whole.empty() && !parse_int(whole, w)) || frac.size() > 12 || (!frac.empty() && !parse_int(frac, fr)) ||
        whole.find('-') != std::string_view::npos || frac.find('-') != std::string_view::npos ||
        (whole.empty() && frac.empty()))
      return false;
    f.den = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) f.den *= 10;
    f.num = (w * f.den + fr) * (neg ? -1 : 1);
  } else if (!parse_int(s, f.num)) {
    return false;
  }
  const auto g = std::gcd(f.num, f.den);
  if (g > 1) f.num /= g, f.den /= g;
  return true;
}

std::vector<std::vector<Fraction>> parse_fractions(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](std::istringstream& ls) {
    while (std::getline(is, line)) {
      ++lineno;
      auto p = line.find('#');
      if (p != std::string::npos) line.erase(p);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ls = std::istringstream(line);
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("matrix line " + std::to_string(lineno) + ": " + msg);
  };
  std::istringstream ls;
  long r = 0, n = 0;
  if (!next(ls) || !(ls >> r >> n) || r <= 0 || n <= 0) fail("expected header 'r n'");
  std::vector<std::vector<Fraction>> a(r, std::vector<Fraction>(n));
  for (long i = 0; i < r; ++i) {
    if (!next(ls)) fail("missing row " + std::to_string(i + 1));
    for (long j = 0; j < n; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail("row " + std::to_string(i + 1) + " has fewer than " + std::to_string(n) + " entries");
      if (!parse_fraction(tok, a[i][j])) fail("bad entry '" + tok + "'");
    }
    std::string extra;
    if (ls >> extra) fail("row " + std::to_string(i + 1) + " has extra entries");
  }
  return a;
}

}  // namespace

ScaledMatrix parse_scaled_matrix(std::istream& is) {
  auto f = parse_fractions(is);
  ScaledMatrix out;
  for (const auto& row : f)
    for (const auto& x : row) out.scale = std::lcm(out.scale, x.den);
  for (const auto& row : f) {
    out.a.emplace_back();
    for (const auto& x : row) out.a.back().push_back(x.num * (out.scale / x.den));
  }
  return out;
}

Matrix parse_matrix(std::istream& is) {
  auto f = parse_fractions(is);
  Matrix a;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a.emplace_back();
    for (const auto& x : f[i]) {
      if (x.den != 1) throw std::runtime_error("matrix row " + std::to_string(i + 1) + ": entries must be integers");
      a.back().push_back(x.num);
    }
  }
  return a;
}

namespace {

// Excitatory and inhibitory neurons with identical inputs.
struct Dual {
  NeuronId pos, neg;
};

Dual make_dual(Network& net, Weight bias, std::span<const Term> in, const char* label) {
  return {make_neuron(net, bias, Polarity::Excitatory, label, in),
          make_neuron(net, bias, Polarity::Inhibitory, label, in)};
}

std::int64_t pow2(int b) { return std::int64_t{1} << b; }

}  // namespace

LinSketchNet build_linsketch_net(const Matrix& a, int ell) {
  if (a.empty() || a[0].empty()) throw std::invalid_argument("empty matrix");
  if (ell < 1 || ell > 40) throw std::invalid_argument("ell out of range");
  LinSketchNet ls;
  ls.a = a;
  ls.rows = static_cast<int>(a.size());
  ls.items = static_cast<int>(a[0].size());
  ls.ell = ell;
  std::int64_t amax = 1;
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != ls.items) throw std::invalid_argument("ragged matrix");
    for (auto v : row) amax = std::max<std::int64_t>(amax, v < 0 ? -v : v);
  }
  const int wa = bits_for(static_cast<std::uint64_t>(amax));
  ls.entry_bits = wa;
  Network& net = ls.net;
  net.builder = "linsketch";
  net.param_n = static_cast<std::uint64_t>(ls.items);

  std::vector<NeuronId> x;
  for (int j = 0; j < ls.items; ++j) x.push_back(net.add_input("item"));
  NeuronId s = net.add_input("sign");

  // Updates settle: two entry-width encodings, one gate layer, one output-width encoding.
  ls.write_tap = 2 * pot_latency(wa) + 1 + pot_latency(ell);
  ls.seq = build_sequencer(net, x, ls.write_tap + 2, "ls.seq");
  const NeuronId any = ls.seq.any;
  const NeuronId tap = ls.seq.taps[ls.write_tap];
  NeuronId clear = relay(net, ls.seq.taps[ls.write_tap + 1], Polarity::Inhibitory, "ls.clear");
  NeuronId lock = make_neuron(net, 2, Polarity::Excitatory, "ls.lock", {{tap, 2}, {any, 1}});
  net.add_synapse(lock, lock, 1);
  NeuronId lock_inh = relay(net, lock, Polarity::Inhibitory, "ls.lock");

  for (int i = 0; i < ls.rows; ++i) {
    std::vector<NeuronId> work;
    auto keep = [&](const Pot& p) { work.insert(work.end(), p.copies.begin(), p.copies.end()); };
    std::vector<Term> plus, minus;
    for (int j = 0; j < ls.items; ++j) {
      if (a[i][j] > 0) plus.push_back({x[j], a[i][j]});
      if (a[i][j] < 0) minus.push_back({x[j], -a[i][j]});
    }
    Pot zp = build_pot(net, plus, 0, wa, true, "ls.zp");
    Pot zn = build_pot(net, minus, 0, wa, true, "ls.zn");
    std::vector<Term> tp, tn;
    for (int b = 0; b < wa; ++b) {
      tp.push_back({zp.out[b], pow2(b)});
      tp.push_back({zn.out_inh[b], -pow2(b)});
      tn.push_back({zn.out[b], pow2(b)});
      tn.push_back({zp.out_inh[b], -pow2(b)});
    }
    Pot ap = build_pot(net, tp, 0, wa, false, "ls.ap");
    Pot an = build_pot(net, tn, 0, wa, false, "ls.an");
    for (const Pot* p : {&zp, &zn, &ap, &an}) keep(*p);

    NeuronId& out_sign = ls.sign.emplace_back();
    out_sign = net.add_neuron(1, Polarity::Excitatory, "ls.sign");
    std::vector<NeuronId> mag;
    for (int j = 0; j < ell; ++j) mag.push_back(net.add_neuron(1, Polarity::Excitatory, "ls.y"));

    // q carries +v, qn carries -v, where v = old value + signed update.
    std::vector<Term> q, qn;
    std::vector<NeuronId> pos_part, neg_part;
    auto add = [&](const Dual& d, std::int64_t w) {
      q.push_back({w > 0 ? d.pos : d.neg, w});
      qn.push_back({w > 0 ? d.neg : d.pos, -w});
      work.push_back(d.pos);
      work.push_back(d.neg);
    };
    for (int j = 0; j < ell; ++j) {
      Term held[2] = {{mag[j], 1}, {any, 1}};
      Term held_neg[3] = {{mag[j], 1}, {out_sign, 1}, {any, 1}};
      add(make_dual(net, 2, held, "ls.old"), pow2(j));
      add(make_dual(net, 3, held_neg, "ls.oldneg"), -pow2(j + 1));
    }
    for (int b = 0; b < wa; ++b) {
      Term p1[1] = {{ap.out[b], 1}};
      Term p2[2] = {{ap.out[b], 1}, {s, 1}};
      Term n1[1] = {{an.out[b], 1}};
      Term n2[2] = {{an.out[b], 1}, {s, 1}};
      Dual dp = make_dual(net, 1, p1, "ls.dp"), dpn = make_dual(net, 2, p2, "ls.dpneg");
      Dual dnn = make_dual(net, 2, n2, "ls.dnneg"), dn = make_dual(net, 1, n1, "ls.dn");
      add(dp, pow2(b));
      add(dpn, -pow2(b + 1));
      add(dnn, pow2(b + 1));
      add(dn, -pow2(b));
      pos_part.insert(pos_part.end(), {dp.pos, dp.neg, dpn.pos, dpn.neg});
      neg_part.insert(neg_part.end(), {dn.pos, dn.neg, dnn.pos, dnn.neg});
    }
    Pot qp = build_pot(net, q, 0, ell, false, "ls.q");
    Pot qm = build_pot(net, qn, 0, ell, false, "ls.qneg");
    keep(qp);
    keep(qm);
    NeuronId negative = make_neuron(net, 1, Polarity::Excitatory, "ls.negative", qn);
    work.push_back(negative);

    for (int j = 0; j < ell; ++j) {
      NeuronId g1[2] = {tap, qp.out[j]};
      NeuronId g2[2] = {tap, qm.out[j]};
      NeuronId w[2] = {and_gate(net, g1, Polarity::Excitatory, "ls.write"),
                       and_gate(net, g2, Polarity::Excitatory, "ls.write")};
      NeuronId r = or_gate(net, w, Polarity::Excitatory, "ls.set");
      net.add_synapse(mag[j], mag[j], 1);
      net.add_synapse(r, mag[j], 4);
      net.add_synapse(clear, mag[j], -2);
    }
    NeuronId gs[2] = {tap, negative};
    NeuronId ws = and_gate(net, gs, Polarity::Excitatory, "ls.write");
    NeuronId rs = relay(net, ws, Polarity::Excitatory, "ls.set");
    net.add_synapse(out_sign, out_sign, 1);
    net.add_synapse(rs, out_sign, 4);
    net.add_synapse(clear, out_sign, -2);

    for (NeuronId u : work) net.add_dominant(lock_inh, u);
    ls.work.insert(ls.work.end(), work.begin(), work.end());
    ls.magnitude.push_back(std::move(mag));
    ls.positive_part.push_back(std::move(pos_part));
    ls.negative_part.push_back(std::move(neg_part));
  }
  for (int i = 0; i < ls.rows; ++i) {
    for (auto id : ls.magnitude[i]) net.add_output(id);
    net.add_output(ls.sign[i]);
  }
  // The new value is latched three rounds after the write tap.
  ls.hold = ls.write_tap + 6;
  ls.gap = 1;
  net.persistence = ls.hold + ls.gap;
  net.finalize();
  return ls;
}

std::size_t linsketch_budget(int rows, int ell) {
  return static_cast<std::size_t>(48) * rows * ell + 8 * ell + 16;
}

int linsketch_persistence_budget(int ell) { return 8 * ell; }

LinSketchMachine::LinSketchMachine(const LinSketchNet& net) : net_(&net), sim_(net.net) { sim_.idle(4); }

void LinSketchMachine::update(int item, bool negative) {
  if (item < 1 || item > net_->items) throw std::out_of_range("item out of range");
  InputBits bits(net_->items + 1, 0);
  bits[item - 1] = 1;
  bits[net_->items] = negative;
  sim_.hold(bits, net_->hold);
  sim_.idle(net_->gap);
}

std::vector<std::int64_t> LinSketchMachine::read() const {
  std::vector<std::int64_t> y;
  for (int i = 0; i < net_->rows; ++i) {
    auto mag = static_cast<std::int64_t>(sim_.decode(net_->magnitude[i]));
    y.push_back(sim_.fired(net_->sign[i]) && mag != 0 ? -mag : mag);
  }
  return y;
}

}  // namespace snn
