#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "snn/gadgets.hpp"
#include "snn/simulator.hpp"

using namespace snn;

namespace {

struct PotRig {
  Network net;
  std::vector<NeuronId> in;
  Pot pot;
  explicit PotRig(int width, int offset = 0) {
    std::vector<Term> terms;
    for (int b = 0; b < width; ++b) {
      in.push_back(net.add_input("x"));
      terms.push_back({in.back(), std::int64_t{1} << b});
    }
    pot = build_pot(net, terms, offset, width, true);
    for (auto o : pot.out) net.add_output(o);
    net.finalize();
  }
  InputBits bits(std::uint64_t v) const {
    InputBits b(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) b[i] = (v >> i) & 1;
    return b;
  }
};

}  // namespace

TEST(PotTest, ExhaustiveSmallWidths) {
  for (int w = 1; w <= 6; ++w) {
    PotRig rig(w);
    Simulator sim(rig.net);
    sim.idle(4);
    for (std::uint64_t v = 0; v < (1u << w); ++v) {
      sim.hold(rig.bits(v), pot_latency(w) + 1);
      ASSERT_EQ(sim.decode(rig.pot.out), v) << "width " << w;
      ASSERT_EQ(sim.decode(rig.pot.out_inh), v);
    }
  }
}

TEST(PotTest, NegativePotentialGivesZero) {
  PotRig rig(4, 5);  // potential = value - 5
  Simulator sim(rig.net);
  sim.idle(4);
  for (std::uint64_t v = 0; v < 16; ++v) {
    sim.hold(rig.bits(v), pot_latency(4) + 1);
    EXPECT_EQ(sim.decode(rig.pot.out), v >= 5 ? v - 5 : 0) << v;
  }
}

TEST(PotTest, CopiesExistingNeuron) {
  Network net;
  NeuronId a = net.add_input("a");
  NeuronId b = net.add_input("b");
  NeuronId t = make_neuron(net, 1, Polarity::Excitatory, "t", {{a, 5}, {b, 3}});
  Pot p = build_pot(net, t, 3);
  net.finalize();
  EXPECT_EQ(p.copies.size() + p.always_on.size() + p.guards.size(), 3u * 3 - 1);
  EXPECT_TRUE(validate(net).empty());
  Simulator sim(net);
  sim.hold({1, 1}, 8);
  EXPECT_EQ(sim.decode(p.out), 7u);
  sim.hold({0, 1}, 8);
  EXPECT_EQ(sim.decode(p.out), 2u);
}

TEST(CounterTest, CountsSpacedSpikes) {
  for (std::uint64_t cap : {1u, 5u, 16u, 100u}) {
    Network net;
    NeuronId x = net.add_input("x");
    Counter c = build_counter(net, x, cap);
    net.finalize();
    EXPECT_EQ(c.bits.size(), static_cast<std::size_t>(bits_for(cap)));
    Simulator sim(net);
    std::uint64_t last = 0;
    for (std::uint64_t k = 1; k <= cap; ++k) {
      sim.step({1});
      // Sampled at every round, the value never passes the true count.
      for (int r = 0; r < counter_latency(static_cast<int>(c.bits.size())); ++r) {
        sim.step({0});
        ASSERT_LE(sim.decode(c.bits), k);
      }
      std::uint64_t v = sim.decode(c.bits);
      ASSERT_EQ(v, k);
      ASSERT_GE(v, last);
      last = v;
    }
  }
}

TEST(CounterTest, SpikesTwoRoundsApart) {
  Network net;
  NeuronId x = net.add_input("x");
  Counter c = build_counter(net, x, 255);
  net.finalize();
  Simulator sim(net);
  for (int k = 0; k < 200; ++k) {
    sim.step({1});
    sim.step({0});
  }
  sim.idle(12);
  EXPECT_EQ(sim.decode(c.bits), 200u);
}

TEST(CounterTest, FiveSpikes) {
  Network net;
  NeuronId x = net.add_input("x");
  Counter c = build_counter(net, x, 20);
  net.finalize();
  Simulator sim(net);
  for (int k = 0; k < 5; ++k) {
    sim.step({1});
    sim.idle(2 * bits_for(20));
  }
  EXPECT_EQ(sim.decode(c.bits), 5u);
}

TEST(TimerTest, MatchesSlidingWindowOnRandomSpikes) {
  std::mt19937_64 rng(21);
  for (int t = 1; t <= 45; ++t) {
    Network net;
    NeuronId x = net.add_input("x");
    Timer tm = build_timer(net, x, t);
    net.finalize();
    ASSERT_TRUE(validate(net).empty());
    Simulator sim(net);
    std::vector<int> spikes;
    int last = -1000000;
    for (int r = 1; r <= 600; ++r) {
      int density = (r / 150) % 2 == 0 ? 40 : 4;
      bool fire = rng() % density == 0;
      sim.step({static_cast<std::uint8_t>(fire)});
      bool expect = last >= r - t && last <= r - 1;
      ASSERT_EQ(sim.fired(tm.out), expect) << "t=" << t << " round " << r;
      if (fire) last = r;
    }
  }
}

TEST(TimerTest, SingleSpikeWindow) {
  Network net;
  NeuronId x = net.add_input("x");
  Timer tm = build_timer(net, x, 30);
  net.finalize();
  Simulator sim(net);
  sim.idle(5);
  std::uint64_t r = sim.round() + 1;
  sim.step({1});
  while (sim.round() < r + 30) {
    sim.step({0});
    EXPECT_TRUE(sim.fired(tm.out));
  }
  sim.step({0});
  EXPECT_FALSE(sim.fired(tm.out));
  EXPECT_LE(tm.aux.size(), 40u);
}

namespace {

std::size_t oracle_select(const std::vector<std::uint64_t>& v, ExtremumMode mode) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::size_t rank = mode == ExtremumMode::Max ? v.size() : mode == ExtremumMode::Min ? 1 : (v.size() + 1) / 2;
  return order[rank - 1];
}

void extremum_exhaustive(int k, int w, ExtremumMode mode) {
  Network net;
  std::vector<std::vector<NeuronId>> vecs(k);
  for (auto& v : vecs)
    for (int b = 0; b < w; ++b) v.push_back(net.add_input("x"));
  Extremum ex = build_extremum(net, vecs, mode);
  net.finalize();
  Simulator sim(net);
  const std::uint64_t span = std::uint64_t{1} << w;
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) total *= span;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<std::uint64_t> vals(k);
    InputBits bits;
    std::uint64_t c = code;
    for (int i = 0; i < k; ++i) {
      vals[i] = c % span;
      c /= span;
      for (int b = 0; b < w; ++b) bits.push_back((vals[i] >> b) & 1);
    }
    sim.hold(bits, kExtremumLatency + 1);
    std::size_t want = oracle_select(vals, mode);
    ASSERT_EQ(sim.decode(ex.out), vals[want]) << code;
    int fired = 0;
    for (std::size_t i = 0; i < ex.select.size(); ++i) fired += sim.fired(ex.select[i]);
    ASSERT_EQ(fired, 1);
    ASSERT_TRUE(sim.fired(ex.select[want]));
  }
}

}  // namespace

TEST(ExtremumTest, ExhaustiveThreeVectorsWidthFour) {
  extremum_exhaustive(3, 4, ExtremumMode::Max);
  extremum_exhaustive(3, 4, ExtremumMode::Min);
  extremum_exhaustive(3, 4, ExtremumMode::Median);
}

TEST(ExtremumTest, EvenCountMedianAndSingleton) {
  extremum_exhaustive(4, 2, ExtremumMode::Median);
  extremum_exhaustive(1, 3, ExtremumMode::Median);
  extremum_exhaustive(5, 2, ExtremumMode::Median);
}

TEST(ExtremumTest, MedianOfThreeExample) {
  Network net;
  std::vector<std::vector<NeuronId>> vecs(3);
  for (auto& v : vecs)
    for (int b = 0; b < 3; ++b) v.push_back(net.add_input("x"));
  Extremum ex = build_extremum(net, vecs, ExtremumMode::Median);
  net.finalize();
  Simulator sim(net);
  // 3, 7, 2
  sim.hold({1, 1, 0, 1, 1, 1, 0, 1, 0}, kExtremumLatency + 1);
  EXPECT_EQ(sim.decode(ex.out), 3u);
  EXPECT_LE(ex.aux, extremum_budget(3, 3));
}

TEST(SequencerTest, TapsFireOncePerRisingEdge) {
  Network net;
  NeuronId a = net.add_input("a");
  NeuronId b = net.add_input("b");
  NeuronId src[2] = {a, b};
  Sequencer seq = build_sequencer(net, src, 10);
  net.finalize();
  Simulator sim(net);
  sim.idle(3);
  std::uint64_t t0 = sim.round() + 1;
  std::vector<int> fires(10, 0);
  for (int r = 0; r < 25; ++r) {
    sim.step({r % 2 == 0 ? std::uint8_t{1} : std::uint8_t{0}, 1});
    for (int k = 0; k < 10; ++k)
      if (sim.fired(seq.taps[k])) {
        ++fires[k];
        EXPECT_EQ(sim.round(), t0 + 2 + k);
      }
  }
  for (int f : fires) EXPECT_EQ(f, 1);
  sim.idle(1);
  sim.hold({0, 1}, 3);
  EXPECT_TRUE(sim.fired(seq.pulse));
}

TEST(IndexTest, OneHotForEveryValue) {
  for (int d : {1, 2, 3, 4, 5, 8}) {
    Network net;
    std::vector<NeuronId> in, exc, inh;
    for (int b = 0; b < d; ++b) {
      in.push_back(net.add_input("x"));
      exc.push_back(relay(net, in.back(), Polarity::Excitatory));
      inh.push_back(relay(net, in.back(), Polarity::Inhibitory));
    }
    Index idx = build_index(net, exc, inh);
    net.finalize();
    Simulator sim(net);
    for (std::uint64_t v = 0; v < (1u << d); ++v) {
      InputBits bits(d);
      for (int b = 0; b < d; ++b) bits[b] = (v >> b) & 1;
      sim.hold(bits, 2 + idx.latency);
      for (std::uint64_t j = 0; j < idx.lines.size(); ++j) ASSERT_EQ(sim.fired(idx.lines[j]), j == v);
    }
  }
}

TEST(IndexTest, EnableAndStrobe) {
  for (int d : {2, 6}) {
    Network net;
    std::vector<NeuronId> in, exc, inh;
    for (int b = 0; b < d; ++b) {
      in.push_back(net.add_input("x"));
      exc.push_back(relay(net, in.back(), Polarity::Excitatory));
      inh.push_back(relay(net, in.back(), Polarity::Inhibitory));
    }
    NeuronId en = net.add_input("enable");
    NeuronId strobe = net.add_input("strobe");
    Index idx = build_index(net, exc, inh, "index", en, strobe);
    net.finalize();
    Simulator sim(net);
    InputBits zero(d + 2, 0);
    sim.hold(zero, 4);
    for (auto l : idx.lines) EXPECT_FALSE(sim.fired(l));  // value 0 but disabled
    const std::uint64_t v = d == 2 ? 2 : 37;
    InputBits bits(d + 2, 0);
    for (int b = 0; b < d; ++b) bits[b] = (v >> b) & 1;
    bits[d] = 1;
    sim.hold(bits, 2 + idx.latency);
    for (std::uint64_t j = 0; j < idx.lines.size(); ++j) ASSERT_EQ(sim.fired(idx.lines[j]), j == v);
    InputBits pulse = bits;
    pulse[d + 1] = 1;
    std::vector<int> fires(idx.strobed.size(), 0);
    std::vector<int> when(idx.strobed.size(), -1);
    sim.step(pulse);
    for (int k = 1; k <= 5; ++k) {
      sim.step(bits);
      for (std::size_t j = 0; j < idx.strobed.size(); ++j)
        if (sim.fired(idx.strobed[j])) ++fires[j], when[j] = k;
    }
    for (std::size_t j = 0; j < idx.strobed.size(); ++j) {
      EXPECT_EQ(fires[j], j == v ? 1 : 0);
      if (j == v) EXPECT_EQ(when[j], kStrobeLatency);
    }
  }
}

TEST(EncoderTest, OneHotToBinary) {
  Network net;
  std::vector<NeuronId> in;
  for (int i = 0; i < 12; ++i) in.push_back(net.add_input("x"));
  auto bits = build_binary_encoder(net, in, 4, 1);
  net.finalize();
  Simulator sim(net);
  for (int i = 0; i < 12; ++i) {
    InputBits b(12, 0);
    b[i] = 1;
    sim.step(b);
    sim.step(b);
    EXPECT_EQ(sim.decode(bits), static_cast<std::uint64_t>(i + 1));
  }
}
