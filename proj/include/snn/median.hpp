#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "snn/countmin.hpp"
#include "snn/gadgets.hpp"
#include "snn/network.hpp"
#include "snn/simulator.hpp"

namespace snn {

struct MedianParams {
  std::uint64_t n = 1024;  // power of two
  std::uint64_t m = 1024;
  double eps = 0.25;
  double delta = 0.25;
  std::uint64_t seed = 1;

  int levels() const;  // log2 n
  double level_eps() const { return eps / (2.0 * levels()); }
  double level_delta() const { return delta / (2.0 * levels()); }
  int tables() const { return countmin_tables(level_delta()); }
  int bin_bits() const { return countmin_bin_bits(level_eps()); }
  int key_bits() const { return bits_for(n); }
};

// Closest p/q to x with q <= max_den.
std::pair<std::int64_t, std::int64_t> rational_approx(double x, std::int64_t max_den = 4096);

// Level i (1-based) keys an item by its value with the low i-1 bits cleared.
std::uint64_t level_key(std::uint64_t x, int level);

struct PhaseRecord {
  int phase = 0;
  std::uint64_t chi = 0;
  char fired = '-';  // g, s or e
  std::uint64_t est = 0;
  std::uint64_t element = 0;
  bool operator==(const PhaseRecord&) const = default;
};
std::string format_phase(const PhaseRecord& r);

struct MedianResult {
  bool has_output = false;  // false on an empty stream
  std::uint64_t value = 0;
  bool forced = false;      // emitted at the last phase without an equality verdict
  int settle = 0;           // last query round with a verdict or an output change
  std::vector<PhaseRecord> trace;
};

// Inputs: n one-hot item neurons followed by the query neuron a. Each level
// keeps a Count-Min sketch of its dyadic blocks; an element-level sketch
// counts single values. A query runs one phase per level, from the coarsest
// down, moving the candidate by half the block size after each comparison.
struct MedianNet {
  struct Phase {
    int level = 0;
    int start_tap = 0;
    int decide_tap = 0;
    NeuronId g = 0, s = 0, e = 0;
  };
  Network net;
  MedianParams params;
  std::int64_t eps_num = 1, eps_den = 4;
  std::vector<CountMinCore> levels;              // [level - 1]
  std::vector<std::vector<NeuronId>> masked;     // level counts, silenced after a g verdict
  CountMinCore element;
  Counter length;
  std::vector<NeuronId> candidate;
  std::vector<NeuronId> output;
  std::vector<Phase> phases;                     // [level - 1]
  int settle = 0;
  int slot = 0;
  int insert_tap = 0;
  int insert_hold = 0;
  int query_hold = 0;
  int gap = 1;
};

MedianNet build_median_net(const MedianParams& p);
std::size_t median_budget(const MedianParams& p);
int median_slot_budget(const MedianParams& p);
int median_query_budget(const MedianParams& p);

class MedianMachine {
 public:
  explicit MedianMachine(const MedianNet& net);
  void insert(std::uint64_t x);
  MedianResult query();
  std::uint64_t length() const { return sim_.decode(net_->length.bits); }
  std::vector<std::vector<std::uint64_t>> level_tables(int level) const {
    return read_tables(net_->levels[level - 1], sim_);
  }
  std::vector<std::vector<std::uint64_t>> element_tables() const { return read_tables(net_->element, sim_); }
  Simulator& sim() { return sim_; }

 private:
  const MedianNet* net_;
  Simulator sim_;
  std::uint64_t inserted_ = 0;
};

}  // namespace snn
