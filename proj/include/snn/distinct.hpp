#pragma once

#include <cstdint>
#include <vector>

#include "snn/gadgets.hpp"
#include "snn/hash.hpp"
#include "snn/network.hpp"
#include "snn/simulator.hpp"

namespace snn {

struct LogLogParams {
  std::uint64_t n = 1024;
  double eps = 0.5;
  double delta = 0.25;
  std::uint64_t seed = 1;

  int bucket_bits() const;  // ceil(2 log2(1/eps))
  int buckets() const { return 1 << bucket_bits(); }
  int suffix_bits() const;  // 3 ceil(log2 n)
  int copies() const;       // odd ceil(12 ln(1/delta))
  int key_bits() const { return bits_for(n); }
  int register_bits() const { return bits_for(static_cast<std::uint64_t>(suffix_bits())); }
  int sum_bits() const { return bits_for(static_cast<std::uint64_t>(buckets()) * suffix_bits()); }
};

// Bucket value of a hashed suffix: position of the leading one counted from
// the most significant end (leading zeros + 1), with an all-zero suffix
// mapped to the suffix width.
int leading_one_position(std::uint64_t suffix, int width);

// Inputs are n one-hot item neurons. Each copy hashes the item, keeps one
// register per bucket holding the largest leading-one position seen, and
// sums its registers; the output is the median of the copies' sums.
struct DistinctNet {
  Network net;
  LogLogParams params;
  std::vector<HashMatrix> hashes;                          // one per copy
  std::vector<std::vector<std::vector<NeuronId>>> regs;    // [copy][bucket] -> bits
  std::vector<std::vector<NeuronId>> sums;                 // [copy] -> bits
  std::vector<NeuronId> median;
  std::vector<NeuronId> work;  // per-insert computation neurons
  Sequencer seq;
  int compare_tap = 0;
  int hold = 0;
  int gap = 0;
};

DistinctNet build_distinct_net(const LogLogParams& p);
std::size_t distinct_budget(const LogLogParams& p);
int distinct_persistence_budget(const LogLogParams& p);

class DistinctMachine {
 public:
  explicit DistinctMachine(const DistinctNet& net);
  void insert(std::uint64_t x);
  std::vector<std::uint64_t> buckets(int copy) const;
  std::vector<std::uint64_t> sums() const;
  std::uint64_t median_sum() const;
  double estimate() const;
  Simulator& sim() { return sim_; }
  InputBits input_for(std::uint64_t x) const;

 private:
  const DistinctNet* net_;
  Simulator sim_;
};

}  // namespace snn
