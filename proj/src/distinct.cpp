#include "snn/distinct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "snn/oracles.hpp"

namespace snn {

int LogLogParams::bucket_bits() const {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0,1)");
  return static_cast<int>(std::ceil(2.0 * std::log2(1.0 / eps) - 1e-9));
}

int LogLogParams::suffix_bits() const {
  int lg = 0;
  while ((std::uint64_t{1} << lg) < n) ++lg;
  return 3 * std::max(1, lg);
}

int LogLogParams::copies() const {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
  int k = std::max(1, static_cast<int>(std::ceil(12.0 * std::log(1.0 / delta) - 1e-9)));
  return k % 2 ? k : k + 1;
}

int leading_one_position(std::uint64_t suffix, int width) { return std::min(leading_zeros(suffix, width) + 1, width); }

DistinctNet build_distinct_net(const LogLogParams& p) {
  if (p.n < 1) throw std::invalid_argument("n must be positive");
  if (p.bucket_bits() + p.suffix_bits() > 64) throw std::invalid_argument("hash wider than 64 bits");
  DistinctNet dn;
  dn.params = p;
  Network& net = dn.net;
  net.builder = "loglog";
  net.param_n = p.n;
  net.param_eps = p.eps;
  net.param_delta = p.delta;
  net.seed = p.seed;

  const int kb = p.key_bits(), bb = p.bucket_bits(), w = p.suffix_bits(), wz = p.register_bits();
  const int buckets = p.buckets();
  std::mt19937_64 rng(p.seed);

  std::vector<NeuronId> items;
  for (std::uint64_t i = 0; i < p.n; ++i) items.push_back(net.add_input("item"));
  // Values settle: encoder, hash, leading-one selection and its encoding.
  dn.compare_tap = hash_latency(kb) + 3;
  dn.seq = build_sequencer(net, items, dn.compare_tap + 1, "ll.seq");
  const NeuronId any = dn.seq.any;
  const NeuronId tap = dn.seq.taps[dn.compare_tap];
  NeuronId lock = make_neuron(net, 2, Polarity::Excitatory, "ll.lock", {{tap, 2}, {any, 1}});
  net.add_synapse(lock, lock, 1);
  NeuronId lock_inh = relay(net, lock, Polarity::Inhibitory, "ll.lock");

  std::vector<NeuronId> locked = build_binary_encoder(net, items, kb, 1, "ll.encoder");
  const std::vector<NeuronId> key = locked;

  for (int c = 0; c < p.copies(); ++c) {
    HashMatrix h = HashMatrix::random(bb + w, kb, rng);
    net.header_lines.push_back(h.serialize());
    HashNet hn = build_hash_net(net, key, h, "ll.hash");
    locked.insert(locked.end(), hn.copies.begin(), hn.copies.end());

    std::span<const NeuronId> bout(hn.out.data(), bb), binh(hn.out_inh.data(), bb);
    Index idx = build_index(net, bout, binh, "ll.bucket", any);
    locked.insert(locked.end(), idx.lines.begin(), idx.lines.end());

    // Suffix position p counts from the most significant hash output.
    auto suffix = [&](int pos) { return bb + w - 1 - pos; };
    std::vector<NeuronId> lead;
    for (int pos = 0; pos < w; ++pos) {
      std::vector<Term> t{{hn.out[suffix(pos)], 1}};
      for (int q = 0; q < pos; ++q) t.push_back({hn.out_inh[suffix(q)], -1});
      lead.push_back(make_neuron(net, 1, Polarity::Excitatory, "ll.lead", t));
    }
    std::vector<Term> nt{{any, 1}};
    for (int pos = 0; pos < w; ++pos) nt.push_back({hn.out_inh[suffix(pos)], -1});
    NeuronId none = make_neuron(net, 1, Polarity::Excitatory, "ll.none", nt);
    locked.insert(locked.end(), lead.begin(), lead.end());
    locked.push_back(none);

    std::vector<NeuronId> z;
    for (int b = 0; b < wz; ++b) {
      std::vector<NeuronId> src;
      for (int pos = 0; pos < w; ++pos)
        if (((pos + 1) >> b) & 1) src.push_back(lead[pos]);
      if ((w >> b) & 1) src.push_back(none);
      z.push_back(or_gate(net, src, Polarity::Excitatory, "ll.rho"));
    }
    locked.insert(locked.end(), z.begin(), z.end());

    const std::int64_t big = std::int64_t{1} << wz;
    std::vector<std::vector<NeuronId>> regs(buckets);
    std::vector<Term> sum_terms;
    for (int j = 0; j < buckets; ++j) {
      auto& reg = regs[j];
      for (int b = 0; b < wz; ++b) reg.push_back(net.add_neuron(1, Polarity::Excitatory, "ll.register"));
      std::vector<Term> ct{{tap, big}, {idx.lines[j], big}};
      for (int b = 0; b < wz; ++b) {
        ct.push_back({z[b], std::int64_t{1} << b});
        ct.push_back({relay(net, reg[b], Polarity::Inhibitory, "ll.register.inh"), -(std::int64_t{1} << b)});
      }
      NeuronId cmp = make_neuron(net, 2 * big + 1, Polarity::Excitatory, "ll.compare", ct);
      NeuronId clear = relay(net, cmp, Polarity::Inhibitory, "ll.clear");
      dn.work.push_back(cmp);
      dn.work.push_back(clear);
      for (int b = 0; b < wz; ++b) {
        NeuronId g[2] = {cmp, z[b]};
        NeuronId set = and_gate(net, g, Polarity::Excitatory, "ll.set");
        dn.work.push_back(set);
        net.add_synapse(reg[b], reg[b], 1);
        net.add_synapse(set, reg[b], 4);
        net.add_synapse(clear, reg[b], -2);
        sum_terms.push_back({reg[b], std::int64_t{1} << b});
      }
    }
    Pot sum = build_pot(net, sum_terms, 0, p.sum_bits(), false, "ll.sum");
    dn.sums.push_back(sum.out);
    dn.regs.push_back(std::move(regs));
    dn.hashes.push_back(std::move(h));
  }
  for (NeuronId u : locked) net.add_dominant(lock_inh, u);
  dn.work.insert(dn.work.end(), locked.begin(), locked.end());
  dn.median = build_extremum(net, dn.sums, ExtremumMode::Median, "ll.median").out;
  for (auto id : dn.median) net.add_output(id);

  // Registers latch three rounds after the compare tap; the sums and the
  // median settle while the inputs are idle.
  dn.hold = dn.compare_tap + 6;
  dn.gap = pot_latency(p.sum_bits()) + kExtremumLatency + 2;
  net.persistence = dn.hold + dn.gap;
  net.finalize();
  return dn;
}

namespace {
double log2c(double v) { return std::max(1.0, std::ceil(std::log2(v))); }
}  // namespace

std::size_t distinct_budget(const LogLogParams& p) {
  // c * (1/eps^2) * log(1/delta) * log n * log log n, plus the median stage
  // over the copies and the n-input encoder
  const double inv_eps2 = 1.0 / (p.eps * p.eps);
  const double log_delta = std::max(1.0, std::log(1.0 / p.delta));
  const double log_n = log2c(static_cast<double>(p.n) + 1);
  const double loglog_n = log2c(log_n + 1);
  return static_cast<std::size_t>(64.0 * inv_eps2 * log_delta * log_n * loglog_n) +
         extremum_budget(p.copies(), p.sum_bits()) + 8 * p.n + 256;
}

int distinct_persistence_budget(const LogLogParams& p) {
  const double loglog_n = log2c(log2c(static_cast<double>(p.n) + 1) + 1);
  const double log_b = p.bucket_bits();
  return static_cast<int>(12 * (loglog_n + log_b + 1));
}

DistinctMachine::DistinctMachine(const DistinctNet& net) : net_(&net), sim_(net.net) { sim_.idle(net.gap + 4); }

InputBits DistinctMachine::input_for(std::uint64_t x) const {
  if (x < 1 || x > net_->params.n) throw std::out_of_range("item out of range");
  InputBits bits(net_->params.n, 0);
  bits[x - 1] = 1;
  return bits;
}

void DistinctMachine::insert(std::uint64_t x) {
  sim_.hold(input_for(x), net_->hold);
  sim_.idle(net_->gap);
}

std::vector<std::uint64_t> DistinctMachine::buckets(int copy) const {
  std::vector<std::uint64_t> v;
  for (const auto& reg : net_->regs[copy]) v.push_back(sim_.decode(reg));
  return v;
}

std::vector<std::uint64_t> DistinctMachine::sums() const {
  std::vector<std::uint64_t> v;
  for (const auto& s : net_->sums) v.push_back(sim_.decode(s));
  return v;
}

std::uint64_t DistinctMachine::median_sum() const { return sim_.decode(net_->median); }

double DistinctMachine::estimate() const { return loglog_estimate(median_sum(), net_->params.buckets()); }

}  // namespace snn
