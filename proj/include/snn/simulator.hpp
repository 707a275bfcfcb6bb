#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "snn/network.hpp"

namespace snn {

using State = std::vector<std::uint8_t>;
using InputBits = std::vector<std::uint8_t>;  // one entry per network input, in order

// Potential of u for the round after `state`: sum of w(v,u) over fired v, minus bias.
Weight potential(const Network& net, const State& state, NeuronId u);

// One synchronous round, evaluating every neuron. Serial reference kernel.
State step_reference(const Network& net, const State& prev, const InputBits& inputs);
// Same round with the neuron loop split across OpenMP threads.
State step_parallel(const Network& net, const State& prev, const InputBits& inputs);

// Little-endian: bits[0] is the least significant.
std::uint64_t decode_binary(const State& state, std::span<const NeuronId> bits);

// A list of (input assignment, number of rounds to hold it).
struct InputSchedule {
  std::vector<std::pair<InputBits, int>> phases;
  int total_rounds() const;
};

// Trace of states for rounds 0..R where R is the schedule length. Round 0 is
// all idle.
std::vector<State> run(const Network& net, const InputSchedule& schedule);

// Event-driven simulator. Keeps each neuron's summed input and only
// re-evaluates neurons whose sum changed in the previous round; produces
// exactly the same trace as step_reference.
class Simulator {
 public:
  explicit Simulator(const Network& net);

  void reset();
  void step(const InputBits& inputs);
  void step_idle();
  void hold(const InputBits& inputs, int rounds);
  void idle(int rounds);

  std::uint64_t round() const { return round_; }
  bool fired(NeuronId id) const { return state_[id] != 0; }
  const State& state() const { return state_; }
  std::uint64_t decode(std::span<const NeuronId> bits) const { return decode_binary(state_, bits); }
  Weight potential(NeuronId id) const;
  std::uint64_t synapse_events() const { return events_; }
  const Network& network() const { return *net_; }

 private:
  const Network* net_;
  State state_;
  InputBits last_inputs_;
  std::vector<std::int64_t> acc_;
  std::vector<std::int64_t> threshold_;
  std::vector<NeuronId> dirty_, next_dirty_, changed_;
  std::vector<std::uint8_t> dirty_flag_;
  std::uint64_t round_ = 0;
  std::uint64_t events_ = 0;
};

}  // namespace snn
