#include "snn/countmin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snn {

int countmin_tables(double delta) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  return std::max(1, static_cast<int>(std::ceil(2.0 * std::log(1.0 / delta) - 1e-9)));
}

int countmin_bin_bits(double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0,1)");
  auto bins = static_cast<std::uint64_t>(std::ceil(2.0 / eps - 1e-9));
  int bits = 0;
  while ((std::uint64_t{1} << bits) < bins) ++bits;
  return bits;
}

int CountMinParams::tables() const { return countmin_tables(delta); }
int CountMinParams::bin_bits() const { return countmin_bin_bits(effective_eps()); }

std::vector<HashMatrix> sample_hashes(int count, int rows, int cols, std::mt19937_64& rng) {
  std::vector<HashMatrix> hs;
  for (int i = 0; i < count; ++i) hs.push_back(HashMatrix::random(rows, cols, rng));
  return hs;
}

int core_settle(int key_bits, int bin_bits) { return hash_latency(key_bits) + (bin_bits <= 3 ? 1 : 2); }

CountMinCore build_countmin_core(Network& net, std::span<const NeuronId> key, std::vector<HashMatrix> hashes,
                                 NeuronId inc, std::uint64_t capacity, std::string_view label,
                                 std::optional<NeuronId> enable, std::optional<NeuronId> count_enable) {
  if (hashes.empty()) throw std::invalid_argument("count-min needs at least one table");
  CountMinCore core;
  std::string base(label);
  const int bits = bits_for(capacity);
  for (const auto& h : hashes) {
    HashNet hn = build_hash_net(net, key, h, base + ".hash");
    Index idx = build_index(net, hn.out, hn.out_inh, base + ".index", enable, inc);
    std::vector<Counter> row;
    std::vector<std::vector<NeuronId>> gathered(bits);
    for (std::size_t j = 0; j < idx.lines.size(); ++j) {
      Counter c = build_counter(net, idx.strobed[j], capacity, base + ".counter");
      for (int b = 0; b < bits; ++b) {
        NeuronId sel[2] = {idx.lines[j], c.bits[b]};
        gathered[b].push_back(and_gate(net, sel, Polarity::Excitatory, base + ".select"));
      }
      row.push_back(std::move(c));
    }
    // At most one select per bit fires once the index is stable; the gate
    // weight keeps the OR silent without count_enable even if all fire.
    std::vector<NeuronId> value;
    for (int b = 0; b < bits; ++b) {
      if (!count_enable) {
        value.push_back(or_gate(net, gathered[b], Polarity::Excitatory, base + ".bin"));
        continue;
      }
      const auto k = static_cast<std::int64_t>(gathered[b].size());
      std::vector<Term> t{{*count_enable, k}};
      for (NeuronId g : gathered[b]) t.push_back({g, 1});
      value.push_back(make_neuron(net, k + 1, Polarity::Excitatory, base + ".bin", t));
    }
    core.table_count.push_back(std::move(value));
    core.counters.push_back(std::move(row));
  }
  core.count = build_extremum(net, core.table_count, ExtremumMode::Min, base + ".min").out;
  core.settle = core_settle(static_cast<int>(key.size()), hashes.front().rows);
  core.hashes = std::move(hashes);
  return core;
}

std::vector<std::vector<std::uint64_t>> read_tables(const CountMinCore& core, const Simulator& sim) {
  std::vector<std::vector<std::uint64_t>> t;
  for (const auto& row : core.counters) {
    auto& out = t.emplace_back();
    for (const auto& c : row) out.push_back(sim.decode(c.bits));
  }
  return t;
}

CountMinNet build_countmin_net(const CountMinParams& p) {
  if (p.n < 1 || p.m < 1) throw std::invalid_argument("n and m must be positive");
  CountMinNet cm;
  cm.params = p;
  Network& net = cm.net;
  net.builder = "countmin";
  net.param_n = p.n;
  net.param_m = p.m;
  net.param_eps = p.eps;
  net.param_delta = p.delta;
  net.seed = p.seed;

  std::mt19937_64 rng(p.seed);
  const int kb = p.key_bits();
  auto hashes = sample_hashes(p.tables(), p.bin_bits(), kb, rng);
  for (const auto& h : hashes) net.header_lines.push_back(h.serialize());

  NeuronId a = net.add_input("a");
  std::vector<NeuronId> key, all{a};
  for (int b = 0; b < kb; ++b) key.push_back(net.add_input("x"));
  all.insert(all.end(), key.begin(), key.end());

  const int settle = core_settle(kb, p.bin_bits());
  cm.inc_tap = std::max(settle - 2, 0);
  Sequencer seq = build_sequencer(net, all, cm.inc_tap + 1, "cm.seq");
  NeuronId gate[2] = {a, seq.taps[cm.inc_tap]};
  cm.inc_gate = and_gate(net, gate, Polarity::Excitatory, "cm.incgate");
  cm.core = build_countmin_core(net, key, std::move(hashes), cm.inc_gate, p.m, "cm", seq.any);
  for (auto id : cm.core.count) net.add_output(id);

  if (p.heavy_k > 0) {
    cm.has_heavy = true;
    cm.total = build_counter(net, cm.inc_gate, p.m, "cm.total");
    std::vector<Term> terms;
    for (std::size_t b = 0; b < cm.core.count.size(); ++b)
      terms.push_back({cm.core.count[b], static_cast<std::int64_t>(p.heavy_k) << b});
    for (std::size_t b = 0; b < cm.total.bits.size(); ++b)
      terms.push_back({relay(net, cm.total.bits[b], Polarity::Inhibitory, "cm.total.inh"), -(std::int64_t{1} << b)});
    cm.heavy = make_neuron(net, 0, Polarity::Excitatory, "cm.heavy", terms);
    net.add_output(cm.heavy);
  }
  cm.hold = cm.inc_tap + 3 + kStrobeLatency + counter_latency(bits_for(p.m)) + kCountPathLatency + 4;
  cm.gap = 1;
  net.persistence = cm.hold + cm.gap;
  net.finalize();
  return cm;
}

namespace {
double log2c(double v) { return std::max(1.0, std::ceil(std::log2(v))); }
}  // namespace

std::size_t countmin_budget(const CountMinParams& p) {
  // c * (1/eps) * log m * log(1/delta) * log log n
  const double inv_eps = 1.0 / p.effective_eps();
  const double log_m = log2c(static_cast<double>(p.m) + 1);
  const double log_delta = std::max(1.0, std::log(1.0 / p.delta));
  const double loglog_n = log2c(log2c(static_cast<double>(p.n) + 1) + 1);
  return static_cast<std::size_t>(24.0 * inv_eps * log_m * log_delta * loglog_n) + 256;
}

int countmin_latency_budget(const CountMinParams& p) {
  const double log_m = log2c(static_cast<double>(p.m) + 1);
  const double loglog_n = log2c(log2c(static_cast<double>(p.n) + 1) + 1);
  return static_cast<int>(8 * (log_m + loglog_n));
}

CountMinMachine::CountMinMachine(const CountMinNet& net) : net_(&net), sim_(net.net) {
  watch_ = net.core.count;
  if (net.has_heavy) watch_.push_back(net.heavy);
  sim_.idle(4);
}

void CountMinMachine::op(bool increment, std::uint64_t x) {
  if (x < 1 || x > net_->params.n) throw std::out_of_range("item out of range");
  if (increment && incs_ >= net_->params.m) throw std::length_error("stream longer than m");
  const int kb = net_->params.key_bits();
  InputBits bits(kb + 1, 0);
  bits[0] = increment;
  for (int b = 0; b < kb; ++b) bits[b + 1] = (x >> b) & 1;
  State before(watch_.size());
  for (std::size_t i = 0; i < watch_.size(); ++i) before[i] = sim_.fired(watch_[i]);
  last_settle_ = 0;
  for (int k = 0; k < net_->hold; ++k) {
    sim_.step(bits);
    for (std::size_t i = 0; i < watch_.size(); ++i) {
      std::uint8_t f = sim_.fired(watch_[i]);
      if (f != before[i]) last_settle_ = k + 1, before[i] = f;
    }
  }
  result_ = sim_.decode(net_->core.count);
  heavy_ = net_->has_heavy && sim_.fired(net_->heavy);
  sim_.idle(net_->gap);
  incs_ += increment;
}

void CountMinMachine::inc(std::uint64_t x) { op(true, x); }

std::uint64_t CountMinMachine::count(std::uint64_t x) {
  op(false, x);
  return result_;
}

bool CountMinMachine::heavy() const { return heavy_; }

std::uint64_t CountMinMachine::total() const { return net_->has_heavy ? sim_.decode(net_->total.bits) : incs_; }

}  // namespace snn
