#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "snn/linsketch.hpp"
#include "snn/oracles.hpp"

using namespace snn;

namespace {

std::vector<std::int64_t> run_stream(const Matrix& a, int ell, const std::vector<std::pair<int, bool>>& ops) {
  LinSketchNet ls = build_linsketch_net(a, ell);
  LinSketchMachine m(ls);
  for (auto [item, neg] : ops) m.update(item, neg);
  return m.read();
}

Matrix random_matrix(std::mt19937_64& rng, int r, int n) {
  std::uniform_int_distribution<int> entry(-3, 3);
  Matrix a(r, std::vector<std::int64_t>(n));
  for (auto& row : a)
    for (auto& v : row) v = entry(rng);
  return a;
}

}  // namespace

TEST(LinSketch, IdentityInsert) {
  EXPECT_EQ(run_stream({{1}}, 4, {{1, false}}), (std::vector<std::int64_t>{1}));
}

TEST(LinSketch, TwoByTwoExample) {
  EXPECT_EQ(run_stream({{1, -1}, {2, 0}}, 4, {{1, false}, {2, false}, {1, true}}), (std::vector<std::int64_t>{-1, 0}));
}

TEST(LinSketch, EmptyStreamReadsZero) {
  EXPECT_EQ(run_stream({{1, 2}, {3, -1}}, 4, {}), (std::vector<std::int64_t>{0, 0}));
}

TEST(LinSketch, InsertThenDeleteCancels) {
  EXPECT_EQ(run_stream({{2, -3}}, 5, {{2, false}, {2, true}}), (std::vector<std::int64_t>{0}));
}

TEST(LinSketch, RepeatedInsertScalesByWeight) {
  EXPECT_EQ(run_stream({{2}}, 4, {{1, false}, {1, false}, {1, false}}), (std::vector<std::int64_t>{6}));
}

TEST(LinSketch, AlternatingUpdatesReturnToZero) {
  std::vector<std::pair<int, bool>> ops;
  for (int i = 0; i < 100; ++i) ops.push_back({1, i % 2 == 1});
  EXPECT_EQ(run_stream({{3, 1}}, 4, ops), (std::vector<std::int64_t>{0}));
}

TEST(LinSketch, NegativeEntryFlipsSign) {
  EXPECT_EQ(run_stream({{-1}}, 4, {{1, false}}), (std::vector<std::int64_t>{-1}));
}

TEST(LinSketch, MatrixFileParsing) {
  std::istringstream ok("# sketch\n2 3\n1 -2 0\n0 0 3\n");
  EXPECT_EQ(parse_matrix(ok), (Matrix{{1, -2, 0}, {0, 0, 3}}));
  std::istringstream bad("2 2\n1 2\n3\n");
  try {
    parse_matrix(bad);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LinSketch, ScaledMatrixParsing) {
  std::istringstream in("2 2\n1/2 0.25\n-3 -0.5\n");
  auto sm = parse_scaled_matrix(in);
  EXPECT_EQ(sm.scale, 4);
  EXPECT_EQ(sm.a, (Matrix{{2, 1}, {-12, -2}}));
  std::istringstream frac("1 1\n1/3\n");
  EXPECT_THROW(parse_matrix(frac), std::runtime_error);
  std::istringstream bad("1 2\n1 x\n");
  EXPECT_THROW(parse_scaled_matrix(bad), std::runtime_error);
  std::istringstream ints("1 2\n4 -5\n");
  auto plain = parse_scaled_matrix(ints);
  EXPECT_EQ(plain.scale, 1);
  EXPECT_EQ(plain.a, (Matrix{{4, -5}}));
}

// Steps one update round by round, checking that every output row changes
// at most once, that the sign-split groups never both fire, and that the
// computation neurons fall silent once the new value is latched.
TEST(LinSketchProperty, ExactOnceQuiescentAndOracleExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const int r = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 16), ell = 8;
    Matrix a = random_matrix(rng, r, n);
    LinSketchNet ls = build_linsketch_net(a, ell);
    ASSERT_TRUE(validate(ls.net).empty());
    LinearSketchOracle oracle(a);
    Simulator sim(ls.net);
    sim.idle(4);
    auto read = [&] {
      std::vector<std::int64_t> y;
      for (int i = 0; i < r; ++i) {
        auto mag = static_cast<std::int64_t>(sim.decode(ls.magnitude[i]));
        y.push_back(sim.fired(ls.sign[i]) && mag ? -mag : mag);
      }
      return y;
    };
    const int len = 1 + static_cast<int>(rng() % 200);
    for (int u = 0; u < len; ++u) {
      int item = 1 + static_cast<int>(rng() % n);
      bool neg = rng() % 2;
      LinearSketchOracle next = oracle;
      next.update(item, neg);
      bool fits = true;
      for (auto v : next.value()) fits = fits && v > -256 && v < 256;
      if (!fits) neg = !neg, next = oracle, next.update(item, neg);
      InputBits bits(n + 1, 0);
      bits[item - 1] = 1;
      bits[n] = neg;
      auto before = read();
      std::vector<int> changes(r, 0);
      std::vector<char> pos_seen(r, 0), neg_seen(r, 0);
      const int rounds = ls.hold + ls.gap;
      for (int k = 0; k < rounds; ++k) {
        if (k < ls.hold)
          sim.step(bits);
        else
          sim.step_idle();
        auto now = read();
        for (int i = 0; i < r; ++i) changes[i] += now[i] != before[i];
        before = now;
        for (int i = 0; i < r; ++i) {
          for (auto id : ls.positive_part[i]) pos_seen[i] |= sim.fired(id);
          for (auto id : ls.negative_part[i]) neg_seen[i] |= sim.fired(id);
        }
        if (k >= ls.write_tap + 8)
          for (auto id : ls.work) ASSERT_FALSE(sim.fired(id)) << "seed " << seed << " round " << k << " " << ls.net.label(id);
      }
      for (int i = 0; i < r; ++i) {
        ASSERT_LE(changes[i], 1) << "seed " << seed;
        ASSERT_FALSE(pos_seen[i] && neg_seen[i]) << "seed " << seed;
      }
      oracle = next;
      ASSERT_EQ(read(), oracle.value()) << "seed " << seed << " update " << u;
    }
  }
}

TEST(LinSketchProperty, ValidOverSeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed + 1000);
    Matrix a = random_matrix(rng, 1 + rng() % 4, 1 + rng() % 16);
    LinSketchNet ls = build_linsketch_net(a, 4 + rng() % 8);
    ASSERT_TRUE(validate(ls.net).empty()) << seed;
  }
}

TEST(LinSketchBudget, AuxiliaryAndPersistence) {
  for (int r : {1, 2, 4, 8})
    for (int ell : {4, 8, 12, 16}) {
      std::mt19937_64 rng(r * 100 + ell);
      LinSketchNet ls = build_linsketch_net(random_matrix(rng, r, 16), ell);
      EXPECT_LE(ls.net.auxiliary_count(), linsketch_budget(r, ell)) << r << " " << ell;
      EXPECT_LE(ls.net.persistence, linsketch_persistence_budget(ell));
    }
}
