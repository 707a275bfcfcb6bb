#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "snn/hash.hpp"
#include "snn/linsketch.hpp"
#include "snn/median.hpp"

namespace snn {

class LinearSketchOracle {
 public:
  explicit LinearSketchOracle(Matrix a);
  void update(int item, bool negative);
  std::vector<std::int64_t> value() const;
  const std::vector<std::int64_t>& frequencies() const { return z_; }

 private:
  Matrix a_;
  std::vector<std::int64_t> z_;
};

// Items are keyed by their binary value, so item x feeds x into every hash.
class CountMinOracle {
 public:
  explicit CountMinOracle(std::vector<HashMatrix> hashes);
  void inc(std::uint64_t key);
  std::uint64_t count(std::uint64_t key) const;
  const std::vector<std::vector<std::uint64_t>>& tables() const { return tables_; }
  const std::vector<HashMatrix>& hashes() const { return hashes_; }

 private:
  std::vector<HashMatrix> hashes_;
  std::vector<std::vector<std::uint64_t>> tables_;
};

int leading_zeros(std::uint64_t bits, int width);

// One LogLog copy: the low `bucket_bits` hash outputs pick the bucket, the
// remaining `suffix_bits` outputs give the bucket value, the position of
// their leading one (leading zeros + 1, capped at the suffix width).
class LogLogOracle {
 public:
  LogLogOracle(HashMatrix hash, int bucket_bits);
  void insert(std::uint64_t key);
  std::uint64_t sum() const;
  double estimate() const;
  const std::vector<std::uint64_t>& buckets() const { return buckets_; }
  int bucket_bits() const { return bucket_bits_; }
  int suffix_bits() const { return hash_.rows - bucket_bits_; }
  std::uint64_t bucket_of(std::uint64_t key) const;
  int rho_of(std::uint64_t key) const;

 private:
  HashMatrix hash_;
  int bucket_bits_;
  std::vector<std::uint64_t> buckets_;
};

constexpr double kLogLogAlpha = 0.39701;
// alpha * B * 2^(S/B)
double loglog_estimate(std::uint64_t sum, int buckets);

// Dyadic Count-Min tables, one per level, plus an element-level table,
// searched with the same integer comparisons as the median network.
class DyadicMedianOracle {
 public:
  DyadicMedianOracle(int levels, std::vector<std::vector<HashMatrix>> level_hashes,
                     std::vector<HashMatrix> element_hashes, std::int64_t eps_num, std::int64_t eps_den);
  void insert(std::uint64_t x);
  // Sketched frequency of values in [lo, hi] from the greedy dyadic cover.
  std::uint64_t range_estimate(std::uint64_t lo, std::uint64_t hi) const;
  std::uint64_t exact_range(std::uint64_t lo, std::uint64_t hi) const;
  std::uint64_t prefix_estimate(std::uint64_t x) const { return range_estimate(0, x); }
  MedianResult query() const;
  const CountMinOracle& level(int i) const { return levels_[i - 1]; }
  const CountMinOracle& element() const { return element_; }
  const std::vector<std::uint64_t>& stream() const { return stream_; }

 private:
  int nlevels_;
  std::vector<CountMinOracle> levels_;
  CountMinOracle element_;
  std::int64_t eps_num_, eps_den_;
  std::vector<std::uint64_t> stream_;
};

// Whether x's rank interval [#items < x + 1, #items <= x] meets
// [len/2 - eps len, len/2 + eps len]. A value absent from the stream has
// the single rank #items <= x.
bool rank_within(const std::vector<std::uint64_t>& stream, std::uint64_t x, double eps);

std::uint64_t brute_rank(const std::vector<std::uint64_t>& stream, std::uint64_t x);  // #items <= x
std::uint64_t brute_distinct(const std::vector<std::uint64_t>& stream);
std::uint64_t brute_frequency(const std::vector<std::uint64_t>& stream, std::uint64_t x);

}  // namespace snn
