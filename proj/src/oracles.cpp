#include "snn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace snn {

LinearSketchOracle::LinearSketchOracle(Matrix a) : a_(std::move(a)), z_(a_.at(0).size(), 0) {}

void LinearSketchOracle::update(int item, bool negative) { z_.at(item - 1) += negative ? -1 : 1; }

std::vector<std::int64_t> LinearSketchOracle::value() const {
  std::vector<std::int64_t> y(a_.size(), 0);
  for (std::size_t i = 0; i < a_.size(); ++i)
    for (std::size_t j = 0; j < z_.size(); ++j) y[i] += a_[i][j] * z_[j];
  return y;
}

CountMinOracle::CountMinOracle(std::vector<HashMatrix> hashes) : hashes_(std::move(hashes)) {
  for (const auto& h : hashes_) {
    if (h.rows != hashes_.front().rows || h.cols != hashes_.front().cols)
      throw std::invalid_argument("mismatched hash dimensions");
    tables_.emplace_back(std::size_t{1} << h.rows, 0);
  }
}

void CountMinOracle::inc(std::uint64_t key) {
  for (std::size_t t = 0; t < hashes_.size(); ++t) ++tables_[t][hashes_[t].apply(key)];
}

std::uint64_t CountMinOracle::count(std::uint64_t key) const {
  std::uint64_t best = UINT64_MAX;
  for (std::size_t t = 0; t < hashes_.size(); ++t) best = std::min(best, tables_[t][hashes_[t].apply(key)]);
  return hashes_.empty() ? 0 : best;
}

int leading_zeros(std::uint64_t bits, int width) {
  for (int k = 0; k < width; ++k)
    if ((bits >> (width - 1 - k)) & 1) return k;
  return width;
}

LogLogOracle::LogLogOracle(HashMatrix hash, int bucket_bits)
    : hash_(std::move(hash)), bucket_bits_(bucket_bits), buckets_(std::size_t{1} << bucket_bits, 0) {
  if (bucket_bits < 0 || bucket_bits >= hash_.rows) throw std::invalid_argument("bucket bits out of range");
}

std::uint64_t LogLogOracle::bucket_of(std::uint64_t key) const {
  return hash_.apply(key) & ((std::uint64_t{1} << bucket_bits_) - 1);
}

int LogLogOracle::rho_of(std::uint64_t key) const {
  return std::min(leading_zeros(hash_.apply(key) >> bucket_bits_, suffix_bits()) + 1, suffix_bits());
}

void LogLogOracle::insert(std::uint64_t key) {
  auto& b = buckets_[bucket_of(key)];
  b = std::max<std::uint64_t>(b, rho_of(key));
}

std::uint64_t LogLogOracle::sum() const {
  std::uint64_t s = 0;
  for (auto b : buckets_) s += b;
  return s;
}

double LogLogOracle::estimate() const { return loglog_estimate(sum(), static_cast<int>(buckets_.size())); }

double loglog_estimate(std::uint64_t sum, int buckets) {
  return kLogLogAlpha * buckets * std::exp2(static_cast<double>(sum) / buckets);
}

DyadicMedianOracle::DyadicMedianOracle(int levels, std::vector<std::vector<HashMatrix>> level_hashes,
                                       std::vector<HashMatrix> element_hashes, std::int64_t eps_num,
                                       std::int64_t eps_den)
    : nlevels_(levels), element_(std::move(element_hashes)), eps_num_(eps_num), eps_den_(eps_den) {
  if (static_cast<int>(level_hashes.size()) != levels) throw std::invalid_argument("one hash list per level");
  for (auto& hs : level_hashes) levels_.emplace_back(std::move(hs));
}

void DyadicMedianOracle::insert(std::uint64_t x) {
  for (int i = 1; i <= nlevels_; ++i) levels_[i - 1].inc(level_key(x, i));
  element_.inc(x);
  stream_.push_back(x);
}

std::uint64_t DyadicMedianOracle::range_estimate(std::uint64_t lo, std::uint64_t hi) const {
  if (lo > hi) throw std::invalid_argument("bad range");
  std::uint64_t total = 0;
  while (lo <= hi) {
    int s = nlevels_ - 1;
    while (s > 0 && ((lo & ((std::uint64_t{1} << s) - 1)) != 0 || lo + (std::uint64_t{1} << s) - 1 > hi)) --s;
    total += levels_[s].count(lo);
    lo += std::uint64_t{1} << s;
  }
  return total;
}

std::uint64_t DyadicMedianOracle::exact_range(std::uint64_t lo, std::uint64_t hi) const {
  if (lo > hi) throw std::invalid_argument("bad range");
  return static_cast<std::uint64_t>(
      std::count_if(stream_.begin(), stream_.end(), [&](auto v) { return v >= lo && v <= hi; }));
}

MedianResult DyadicMedianOracle::query() const {
  MedianResult r;
  const auto len = static_cast<std::int64_t>(stream_.size());
  const std::int64_t p = eps_num_, q = eps_den_;
  std::uint64_t chi = (std::uint64_t{1} << (nlevels_ - 1)) - 1;
  for (int i = nlevels_; i >= 1; --i) {
    const auto est = static_cast<std::int64_t>(prefix_estimate(chi));
    const auto f = static_cast<std::int64_t>(element_.count(chi));
    const bool above = 2 * q * (est - f) > 2 * q * (len / 2) + p * len;
    const bool reach = 2 * q * est >= 2 * q * (len / 2) - p * len;
    const char fired = above ? 'g' : reach && f >= 1 ? 'e' : 's';
    r.trace.push_back({i, chi, fired, static_cast<std::uint64_t>(est), static_cast<std::uint64_t>(f)});
    if (fired == 'e' || i == 1) {
      r.has_output = len > 0;
      r.value = r.has_output ? chi : 0;
      r.forced = r.has_output && fired != 'e';
      break;
    }
    const std::uint64_t step = std::uint64_t{1} << (i - 2);
    chi = fired == 'g' ? chi - step : chi + step;
  }
  return r;
}

bool rank_within(const std::vector<std::uint64_t>& stream, std::uint64_t x, double eps) {
  const double len = static_cast<double>(stream.size());
  const auto below = static_cast<double>(std::count_if(stream.begin(), stream.end(), [&](auto v) { return v < x; }));
  const auto upto = static_cast<double>(brute_rank(stream, x));
  const double first = std::min(below + 1, upto);
  return first <= len / 2 + eps * len && upto >= len / 2 - eps * len;
}

std::uint64_t brute_rank(const std::vector<std::uint64_t>& stream, std::uint64_t x) {
  return static_cast<std::uint64_t>(std::count_if(stream.begin(), stream.end(), [&](auto v) { return v <= x; }));
}

std::uint64_t brute_distinct(const std::vector<std::uint64_t>& stream) {
  return std::set<std::uint64_t>(stream.begin(), stream.end()).size();
}

std::uint64_t brute_frequency(const std::vector<std::uint64_t>& stream, std::uint64_t x) {
  return static_cast<std::uint64_t>(std::count(stream.begin(), stream.end(), x));
}

}  // namespace snn
