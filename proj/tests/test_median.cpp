#include <gtest/gtest.h>

#include <random>

#include "snn/median.hpp"
#include "snn/oracles.hpp"

using namespace snn;

namespace {

MedianParams small(std::uint64_t seed, std::uint64_t n = 16, std::uint64_t m = 64) {
  MedianParams p;
  p.n = n;
  p.m = m;
  p.eps = 0.25;
  p.delta = 0.25;
  p.seed = seed;
  return p;
}

DyadicMedianOracle oracle_for(const MedianNet& md) {
  std::vector<std::vector<HashMatrix>> lh;
  for (const auto& c : md.levels) lh.push_back(c.hashes);
  return DyadicMedianOracle(md.params.levels(), lh, md.element.hashes, md.eps_num, md.eps_den);
}

bool tables_match(MedianMachine& m, const DyadicMedianOracle& o, int levels) {
  for (int i = 1; i <= levels; ++i)
    if (m.level_tables(i) != o.level(i).tables()) return false;
  return m.element_tables() == o.element().tables();
}

}  // namespace

TEST(MedianKeys, LevelKeyClearsLowBits) {
  EXPECT_EQ(level_key(5, 1), 5u);
  EXPECT_EQ(level_key(5, 2), 4u);
  EXPECT_EQ(level_key(5, 3), 4u);
  EXPECT_EQ(level_key(7, 3), 4u);
  EXPECT_EQ(level_key(8, 3), 8u);
}

TEST(MedianParamsTest, Derived) {
  MedianParams p = small(1, 1024, 1024);
  EXPECT_EQ(p.levels(), 10);
  EXPECT_DOUBLE_EQ(p.level_eps(), 0.0125);
  EXPECT_DOUBLE_EQ(p.level_delta(), 0.0125);
  EXPECT_EQ(p.key_bits(), 11);
}

TEST(MedianParamsTest, RationalApprox) {
  EXPECT_EQ(rational_approx(0.25), std::make_pair(std::int64_t{1}, std::int64_t{4}));
  EXPECT_EQ(rational_approx(0.1), std::make_pair(std::int64_t{1}, std::int64_t{10}));
  auto [p, q] = rational_approx(1.0 / 3.0);
  EXPECT_EQ(p * 3, q);
}

TEST(MedianOracle, RangeCoverMatchesExactWithoutCollisions) {
  MedianNet md = build_median_net(small(2, 16, 8));
  DyadicMedianOracle o = oracle_for(md);
  for (std::uint64_t x : {3, 5, 5, 9}) o.insert(x);
  // Level sketches never undercount, so the cover is an upper bound.
  for (std::uint64_t hi = 0; hi < 16; ++hi) EXPECT_GE(o.prefix_estimate(hi), o.exact_range(0, hi));
  EXPECT_EQ(o.exact_range(4, 8), 2u);
  EXPECT_EQ(o.exact_range(0, 15), 4u);
}

TEST(MedianOracle, RankWithin) {
  std::vector<std::uint64_t> s{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_TRUE(rank_within(s, 4, 0.0));
  EXPECT_TRUE(rank_within(s, 5, 0.125));
  EXPECT_FALSE(rank_within(s, 8, 0.25));
  EXPECT_FALSE(rank_within(s, 1, 0.25));
  EXPECT_EQ(brute_rank(s, 4), 4u);
}

TEST(MedianBuild, ValidAndWithinBudgets) {
  MedianParams p = small(3, 256, 1024);
  MedianNet md = build_median_net(p);
  EXPECT_TRUE(validate(md.net).empty());
  EXPECT_LE(md.net.size(), median_budget(p));
  EXPECT_LE(md.slot, median_slot_budget(p));
  EXPECT_LE(md.query_hold, median_query_budget(p));
  EXPECT_EQ(md.phases.size(), 8u);
}

TEST(MedianBuild, SameSeedSameExport) {
  EXPECT_EQ(export_network(build_median_net(small(5)).net), export_network(build_median_net(small(5)).net));
}

TEST(MedianBuild, PhaseSchedule) {
  MedianNet md = build_median_net(small(1));
  const int L = md.params.levels();
  for (int i = 1; i <= L; ++i) {
    const auto& ph = md.phases[i - 1];
    EXPECT_EQ(ph.level, i);
    EXPECT_EQ(ph.start_tap, (L - i) * md.slot + 1);
    EXPECT_LT(ph.decide_tap, ph.start_tap + md.slot);
  }
  EXPECT_LT(md.phases[0].decide_tap, md.query_hold);
}

TEST(MedianQuery, EmptyStreamHasNoOutput) {
  MedianNet md = build_median_net(small(1));
  MedianMachine m(md);
  auto r = m.query();
  EXPECT_FALSE(r.has_output);
  EXPECT_EQ(r.value, 0u);
}

TEST(MedianQuery, InitialCandidate) {
  MedianNet md = build_median_net(small(1));
  MedianMachine m(md);
  m.insert(3);
  auto r = m.query();
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().phase, 4);
  EXPECT_EQ(r.trace.front().chi, 7u);
}

TEST(MedianQuery, SingleValueStreamReturnsIt) {
  for (std::uint64_t x : {2, 5, 9, 14}) {
    MedianNet md = build_median_net(small(x));
    MedianMachine m(md);
    for (int k = 0; k < 3; ++k) m.insert(x);
    auto r = m.query();
    EXPECT_TRUE(r.has_output);
    EXPECT_EQ(r.value, x) << "x=" << x;
    EXPECT_FALSE(r.forced);
  }
}

TEST(MedianQuery, LengthCounter) {
  MedianNet md = build_median_net(small(1));
  MedianMachine m(md);
  for (int k = 0; k < 11; ++k) m.insert(1 + k % 16);
  EXPECT_EQ(m.length(), 11u);
}

TEST(MedianProperty, NetworkMirrorsOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    MedianParams p = small(seed);
    MedianNet md = build_median_net(p);
    DyadicMedianOracle o = oracle_for(md);
    MedianMachine m(md);
    std::mt19937_64 rng(seed * 977);
    const int len = 1 + static_cast<int>(rng() % p.m);
    for (int k = 0; k < len; ++k) {
      const std::uint64_t x = 1 + rng() % p.n;
      m.insert(x);
      o.insert(x);
      ASSERT_TRUE(tables_match(m, o, p.levels())) << "seed " << seed << " step " << k;
    }
    auto r = m.query();
    auto ro = o.query();
    ASSERT_EQ(r.trace, ro.trace) << "seed " << seed;
    EXPECT_EQ(r.value, ro.value);
    EXPECT_EQ(r.forced, ro.forced);
    for (const auto& rec : r.trace) {
      EXPECT_EQ(rec.est, o.prefix_estimate(rec.chi));
      EXPECT_EQ(rec.element, o.element().count(rec.chi));
    }
    // One verdict per phase, and the descent stops at the first equality.
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      EXPECT_EQ(r.trace[k].phase, p.levels() - static_cast<int>(k));
      if (k + 1 < r.trace.size()) EXPECT_NE(r.trace[k].fired, 'e');
    }
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
      const int i = r.trace[k].phase;
      const std::uint64_t low = (std::uint64_t{1} << (i - 1)) - 1;
      EXPECT_EQ(r.trace[k].chi & low, low);
      if (k + 1 < r.trace.size()) {
        const std::uint64_t step = std::uint64_t{1} << (i - 2);
        const std::uint64_t next = r.trace[k].fired == 'g' ? r.trace[k].chi - step : r.trace[k].chi + step;
        EXPECT_EQ(r.trace[k + 1].chi, next);
      }
    }
    // A second query on the same stream repeats itself.
    auto again = m.query();
    EXPECT_EQ(again.trace, r.trace);
    EXPECT_EQ(again.value, r.value);
  }
}

TEST(MedianProperty, ReachableCandidates) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    MedianParams p = small(seed);
    MedianNet md = build_median_net(p);
    DyadicMedianOracle o = oracle_for(md);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 40; ++k) o.insert(1 + rng() % p.n);
    auto r = o.query();
    for (const auto& rec : r.trace) EXPECT_LE(rec.chi, (std::uint64_t{1} << p.levels()) - 2);
  }
}
