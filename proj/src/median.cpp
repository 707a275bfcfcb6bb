#include "snn/median.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace snn {

int MedianParams::levels() const {
  int l = 0;
  while ((std::uint64_t{1} << l) < n) ++l;
  if (l < 1 || (std::uint64_t{1} << l) != n) throw std::invalid_argument("n must be a power of two >= 2");
  return l;
}

std::pair<std::int64_t, std::int64_t> rational_approx(double x, std::int64_t max_den) {
  std::pair<std::int64_t, std::int64_t> best{std::llround(x), 1};
  double err = std::abs(x - static_cast<double>(best.first));
  for (std::int64_t q = 2; q <= max_den && err > 1e-12; ++q) {
    std::int64_t p = std::llround(x * static_cast<double>(q));
    double e = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
    if (e < err - 1e-15) best = {p, q}, err = e;
  }
  return best;
}

std::uint64_t level_key(std::uint64_t x, int level) { return x & ~((std::uint64_t{1} << (level - 1)) - 1); }

std::string format_phase(const PhaseRecord& r) {
  std::ostringstream os;
  os << "PHASE " << r.phase << " chi=" << r.chi << " fired=" << r.fired << " est=" << r.est;
  return os.str();
}

namespace {

NeuronId make_latch(Network& net, std::string_view label) {
  NeuronId l = net.add_neuron(1, Polarity::Excitatory, label);
  net.add_synapse(l, l, 1);
  return l;
}

std::int64_t pow2(int b) { return std::int64_t{1} << b; }

}  // namespace

MedianNet build_median_net(const MedianParams& p) {
  if (p.m < 1) throw std::invalid_argument("m must be positive");
  MedianNet md;
  md.params = p;
  Network& net = md.net;
  net.builder = "median";
  net.param_n = p.n;
  net.param_m = p.m;
  net.param_eps = p.eps;
  net.param_delta = p.delta;
  net.seed = p.seed;
  std::tie(md.eps_num, md.eps_den) = rational_approx(p.eps);
  if (md.eps_num <= 0 || md.eps_num >= md.eps_den) throw std::invalid_argument("eps must lie in (0,1)");
  const std::int64_t ep = md.eps_num, eq = md.eps_den;

  const int levels = p.levels(), kb = p.key_bits(), tables = p.tables(), bb = p.bin_bits();
  std::mt19937_64 rng(p.seed);
  std::vector<std::vector<HashMatrix>> level_hashes;
  for (int i = 1; i <= levels; ++i) level_hashes.push_back(sample_hashes(tables, bb, kb, rng));
  auto element_hashes = sample_hashes(tables, bb, kb, rng);
  for (const auto& hs : level_hashes)
    for (const auto& h : hs) net.header_lines.push_back(h.serialize());
  for (const auto& h : element_hashes) net.header_lines.push_back(h.serialize());

  std::vector<NeuronId> items;
  for (std::uint64_t i = 0; i < p.n; ++i) items.push_back(net.add_input("item"));
  NeuronId a = net.add_input("a");

  md.settle = core_settle(kb, bb);
  // Key bits pass an encoder and an OR before reaching the hashes.
  md.insert_tap = md.settle + 1;
  // From a phase's start tap: latch, its inhibitory relay, the candidate
  // gates, the element sketch, its relays, the comparators.
  const int decide = md.settle + kCountPathLatency + 7;
  md.slot = decide + 6;
  for (int i = levels; i >= 1; --i) {
    MedianNet::Phase ph;
    ph.level = i;
    ph.start_tap = (levels - i) * md.slot + 1;
    ph.decide_tap = ph.start_tap + decide;
    md.phases.push_back(ph);
  }
  std::reverse(md.phases.begin(), md.phases.end());
  const int end_tap = md.phases[0].decide_tap + 6;

  std::vector<NeuronId> enc = build_binary_encoder(net, items, kb, 1, "md.encoder");
  Sequencer ins = build_sequencer(net, items, md.insert_tap + 1, "md.ins");
  NeuronId a_src[1] = {a};
  Sequencer qry = build_sequencer(net, a_src, end_tap + 1, "md.query");
  // Index decoders wake once the hashes of an inserted key have settled,
  // and stay awake for the whole query.
  NeuronId settled = make_neuron(net, 2, Polarity::Excitatory, "md.settled",
                                 {{ins.taps[pot_latency(hash_pot_width(kb)) - 1], 2}, {ins.any, 1}});
  net.add_synapse(settled, settled, 1);
  NeuronId act_src[2] = {settled, qry.any};
  NeuronId active = or_gate(net, act_src, Polarity::Excitatory, "md.active");
  const NeuronId inc = ins.taps[md.insert_tap];
  const NeuronId query = qry.any;
  md.length = build_counter(net, inc, p.m, "md.length");
  NeuronId never = net.add_neuron(1, Polarity::Excitatory, "md.zero");

  // Per-level phase state, 1-based.
  std::vector<NeuronId> started(levels + 1), started_inh(levels + 1), up(levels + 1), down(levels + 1),
      down_inh(levels + 1);
  for (int i = 1; i <= levels; ++i) {
    started[i] = make_latch(net, "md.started");
    net.add_synapse(qry.taps[md.phases[i - 1].start_tap], started[i], 1);
    started_inh[i] = relay(net, started[i], Polarity::Inhibitory, "md.started.inh");
    up[i] = make_latch(net, "md.up");
    down[i] = make_latch(net, "md.down");
    down_inh[i] = relay(net, down[i], Polarity::Inhibitory, "md.down.inh");
  }

  // Level i holds, during a query, the candidate with its low i-1 bits
  // cleared: bit b >= i is the verdict of phase b+1.
  for (int i = 1; i <= levels; ++i) {
    std::vector<NeuronId> key(kb);
    for (int b = 0; b < kb; ++b) {
      if (b < i - 1) {
        key[b] = never;
      } else if (b == i - 1 || b == levels) {
        key[b] = enc[b];
      } else {
        NeuronId src[2] = {enc[b], up[b + 1]};
        key[b] = or_gate(net, src, Polarity::Excitatory, "md.key");
      }
    }
    // Bits below the block are cleared by the wiring above; the hashes see
    // the same zero columns as the oracle's level_key.
    md.levels.push_back(build_countmin_core(net, key, level_hashes[i - 1], inc, p.m, "md.level", active, query));
  }
  // The candidate of phase i: verdict bits above i-1, zero at i-1, ones below.
  for (int b = 0; b < kb; ++b) {
    if (b == levels) {
      md.candidate.push_back(enc[b]);
      continue;
    }
    NeuronId below = make_neuron(net, 1, Polarity::Excitatory, "md.ones", {{query, 1}, {started_inh[b + 1], -1}});
    NeuronId src[3] = {enc[b], below, up[b + 1]};
    md.candidate.push_back(or_gate(net, src, Polarity::Excitatory, "md.candidate"));
  }
  md.element = build_countmin_core(net, md.candidate, element_hashes, inc, p.m, "md.element", active, query);

  for (int i = 1; i <= levels; ++i) {
    std::vector<NeuronId> f;
    for (NeuronId c : md.levels[i - 1].count) {
      NeuronId u = make_neuron(net, 1, Polarity::Excitatory, "md.masked", {{c, 1}});
      net.add_dominant(down_inh[i], u);
      f.push_back(u);
    }
    md.masked.push_back(std::move(f));
  }
  std::vector<NeuronId> len_inh, elem_inh;
  for (NeuronId o : md.length.bits) len_inh.push_back(relay(net, o, Polarity::Inhibitory, "md.length.inh"));
  for (NeuronId c : md.element.count) elem_inh.push_back(relay(net, c, Polarity::Inhibitory, "md.element.inh"));
  std::vector<Term> pt;
  for (NeuronId c : md.element.count) pt.push_back({c, 1});
  NeuronId present = make_neuron(net, 1, Polarity::Excitatory, "md.present", pt);
  NeuronId present_inh = make_neuron(net, 1, Polarity::Inhibitory, "md.present", pt);

  NeuronId done = make_latch(net, "md.done");
  NeuronId done_inh = relay(net, done, Polarity::Inhibitory, "md.done.inh");
  std::vector<NeuronId> emit_src;
  // All comparisons are scaled by 2q for eps = p/q:
  //   above: 2q (S - F) > 2q floor(len/2) + p len
  //   reach: 2q S >= 2q floor(len/2) - p len
  for (int i = 1; i <= levels; ++i) {
    std::vector<Term> above, reach;
    for (int j = i; j <= levels; ++j)
      for (std::size_t b = 0; b < md.masked[j - 1].size(); ++b) {
        above.push_back({md.masked[j - 1][b], 2 * eq * pow2(b)});
        reach.push_back({md.masked[j - 1][b], 2 * eq * pow2(b)});
      }
    for (std::size_t b = 0; b < elem_inh.size(); ++b) above.push_back({elem_inh[b], -2 * eq * pow2(b)});
    for (std::size_t b = 0; b < len_inh.size(); ++b) {
      above.push_back({len_inh[b], b == 0 ? -ep : -(eq + ep) * pow2(b)});
      if (b == 0)
        reach.push_back({md.length.bits[0], ep});
      else
        reach.push_back({len_inh[b], -(eq - ep) * pow2(b)});
    }
    NeuronId g_cmp = make_neuron(net, 1, Polarity::Excitatory, "md.above", above);
    NeuronId g_cmp_inh = make_neuron(net, 1, Polarity::Inhibitory, "md.above", above);
    NeuronId e_cmp = make_neuron(net, 0, Polarity::Excitatory, "md.reach", reach);
    NeuronId e_cmp_inh = make_neuron(net, 0, Polarity::Inhibitory, "md.reach", reach);

    auto& ph = md.phases[i - 1];
    NeuronId tap = qry.taps[ph.decide_tap];
    ph.g = make_neuron(net, 2, Polarity::Excitatory, "md.g", {{tap, 1}, {g_cmp, 1}});
    ph.e = make_neuron(net, 3, Polarity::Excitatory, "md.e", {{tap, 1}, {e_cmp, 1}, {present, 1}, {g_cmp_inh, -3}});
    ph.s = make_neuron(net, 1, Polarity::Excitatory, "md.s",
                       {{tap, 2}, {g_cmp_inh, -2}, {e_cmp_inh, -1}, {present_inh, -1}});
    for (NeuronId v : {ph.g, ph.e, ph.s}) net.add_dominant(done_inh, v);
    net.add_synapse(ph.g, down[i], 1);
    net.add_synapse(ph.s, up[i], 1);
    net.add_synapse(ph.e, done, 1);
    emit_src.push_back(ph.e);
    if (i == 1) {
      emit_src.push_back(ph.g);
      emit_src.push_back(ph.s);
    }
  }
  NeuronId emit = or_gate(net, emit_src, Polarity::Excitatory, "md.emit");
  std::vector<Term> ne;
  for (NeuronId o : md.length.bits) ne.push_back({o, 1});
  NeuronId nonempty = make_neuron(net, 1, Polarity::Excitatory, "md.nonempty", ne);
  NeuronId reset_out = relay(net, qry.pulse, Polarity::Inhibitory, "md.reset");
  for (int b = 0; b < kb; ++b) {
    NeuronId src[3] = {emit, nonempty, md.candidate[b]};
    NeuronId set = and_gate(net, src, Polarity::Excitatory, "md.copy");
    NeuronId y = make_latch(net, "md.out");
    net.add_synapse(set, y, 1);
    net.add_dominant(reset_out, y);
    md.output.push_back(y);
    net.add_output(y);
  }
  NeuronId finish = relay(net, qry.taps[end_tap], Polarity::Inhibitory, "md.finish");
  for (int i = 1; i <= levels; ++i)
    for (NeuronId l : {started[i], up[i], down[i]}) net.add_dominant(finish, l);
  net.add_dominant(finish, done);

  md.insert_hold = md.insert_tap + 2 + kStrobeLatency + counter_latency(bits_for(p.m)) + 2;
  md.query_hold = end_tap + 4;
  md.gap = 1;
  net.persistence = md.insert_hold + md.gap;
  net.finalize();
  return md;
}

namespace {
double log2c(double v) { return std::max(1.0, std::ceil(std::log2(v))); }
double log_m_loglog_n(const MedianParams& p) {
  return log2c(static_cast<double>(p.m) + 1) + log2c(log2c(static_cast<double>(p.n) + 1) + 1);
}
}  // namespace

std::size_t median_budget(const MedianParams& p) {
  // One Count-Min budget per level plus the element sketch, the phase
  // comparators and the n-input encoder.
  CountMinParams cm;
  cm.n = p.n;
  cm.m = p.m;
  cm.eps = p.level_eps();
  cm.delta = p.level_delta();
  const std::size_t levels = p.levels();
  return (levels + 1) * countmin_budget(cm) + 64 * levels * (levels + bits_for(p.m)) + 8 * p.n + 256;
}

int median_slot_budget(const MedianParams& p) { return static_cast<int>(12 * log_m_loglog_n(p)); }

int median_query_budget(const MedianParams& p) { return static_cast<int>(12 * p.levels() * log_m_loglog_n(p)); }

MedianMachine::MedianMachine(const MedianNet& net) : net_(&net), sim_(net.net) { sim_.idle(4); }

void MedianMachine::insert(std::uint64_t x) {
  if (x < 1 || x > net_->params.n) throw std::out_of_range("item out of range");
  if (inserted_ >= net_->params.m) throw std::length_error("stream longer than m");
  InputBits bits(net_->params.n + 1, 0);
  bits[x - 1] = 1;
  sim_.hold(bits, net_->insert_hold);
  sim_.idle(net_->gap);
  ++inserted_;
}

MedianResult MedianMachine::query() {
  InputBits bits(net_->params.n + 1, 0);
  bits[net_->params.n] = 1;
  MedianResult r;
  const int levels = net_->params.levels();
  std::uint64_t shown = sim_.decode(net_->output);
  for (int k = 0; k < net_->query_hold; ++k) {
    sim_.step(bits);
    const std::uint64_t now = sim_.decode(net_->output);
    if (now != shown) r.settle = k + 1, shown = now;
    for (int i = levels; i >= 1; --i) {
      const auto& ph = net_->phases[i - 1];
      char fired = sim_.fired(ph.g) ? 'g' : sim_.fired(ph.s) ? 's' : sim_.fired(ph.e) ? 'e' : 0;
      if (!fired) continue;
      r.settle = k + 1;
      PhaseRecord rec;
      rec.phase = i;
      rec.chi = sim_.decode(net_->candidate);
      rec.fired = fired;
      for (int j = i; j <= levels; ++j) rec.est += sim_.decode(net_->masked[j - 1]);
      rec.element = sim_.decode(net_->element.count);
      r.trace.push_back(rec);
    }
  }
  r.has_output = length() > 0;
  r.value = sim_.decode(net_->output);
  r.forced = r.has_output && (r.trace.empty() || r.trace.back().fired != 'e');
  sim_.idle(net_->gap);
  return r;
}

}  // namespace snn
