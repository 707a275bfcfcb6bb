#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "snn/gadgets.hpp"
#include "snn/hash.hpp"
#include "snn/network.hpp"
#include "snn/simulator.hpp"

namespace snn {

struct CountMinParams {
  std::uint64_t n = 256;
  std::uint64_t m = 1024;
  double eps = 0.1;
  double delta = 0.125;
  std::uint64_t seed = 1;
  int heavy_k = 0;  // > 0 adds a heavy-hitter output for frequency >= stream/k

  double effective_eps() const { return heavy_k > 0 ? eps / (2.0 * heavy_k) : eps; }
  int tables() const;
  int bin_bits() const;  // bins = 2^bin_bits >= 2/eps
  int key_bits() const { return bits_for(n); }
};

int countmin_tables(double delta);
int countmin_bin_bits(double eps);
std::vector<HashMatrix> sample_hashes(int count, int rows, int cols, std::mt19937_64& rng);

// Tables of counters behind per-table hash networks. A single spike of
// `inc` increments every table's counter at the key's bin, provided the
// key has been stable for core_settle() rounds; `count` then reports the
// minimum over the tables. Index lines stay idle while `enable` is idle;
// the count path stays idle while `count_enable` is idle.
struct CountMinCore {
  std::vector<HashMatrix> hashes;
  std::vector<std::vector<Counter>> counters;  // [table][bin]
  std::vector<std::vector<NeuronId>> table_count;
  std::vector<NeuronId> count;
  int settle = 0;
};

CountMinCore build_countmin_core(Network& net, std::span<const NeuronId> key, std::vector<HashMatrix> hashes,
                                 NeuronId inc, std::uint64_t capacity, std::string_view label = "cm",
                                 std::optional<NeuronId> enable = std::nullopt,
                                 std::optional<NeuronId> count_enable = std::nullopt);
int core_settle(int key_bits, int bin_bits);
// Rounds from stable counters (and stable index) to a stable count.
constexpr int kCountPathLatency = 2 + kExtremumLatency;
// Counter values by table and bin.
std::vector<std::vector<std::uint64_t>> read_tables(const CountMinCore& core, const Simulator& sim);

// Inputs: a (1 = increment, 0 = count query) followed by the key bits of x.
struct CountMinNet {
  Network net;
  CountMinParams params;
  CountMinCore core;
  NeuronId inc_gate = 0;
  Counter total;                 // stream length, present with a heavy-hitter output
  NeuronId heavy = 0;
  bool has_heavy = false;
  int inc_tap = 0;
  int hold = 0;
  int gap = 1;
};

CountMinNet build_countmin_net(const CountMinParams& p);
std::size_t countmin_budget(const CountMinParams& p);
int countmin_latency_budget(const CountMinParams& p);

class CountMinMachine {
 public:
  explicit CountMinMachine(const CountMinNet& net);
  void inc(std::uint64_t x);
  std::uint64_t count(std::uint64_t x);
  // Count output and heavy-hitter verdict at the end of the last operation.
  std::uint64_t last_count() const { return result_; }
  bool heavy() const;
  std::uint64_t total() const;
  std::vector<std::vector<std::uint64_t>> tables() const { return read_tables(net_->core, sim_); }
  std::uint64_t stream_length() const { return incs_; }
  // Rounds until the last output or counter change during the last operation.
  int last_settle() const { return last_settle_; }
  Simulator& sim() { return sim_; }

 private:
  void op(bool increment, std::uint64_t x);
  const CountMinNet* net_;
  Simulator sim_;
  std::uint64_t incs_ = 0;
  int last_settle_ = 0;
  std::uint64_t result_ = 0;
  bool heavy_ = false;
  std::vector<NeuronId> watch_;
};

}  // namespace snn
