#include "snn/simulator.hpp"

#include <limits>
#include <stdexcept>

namespace snn {

Weight potential(const Network& net, const State& state, NeuronId u) {
  const auto& off = net.in_offsets();
  std::int64_t acc = 0;
  for (auto k = off[u]; k < off[u + 1]; ++k)
    if (state[net.in_sources()[k]]) acc += net.in_weights()[k];
  return Weight::halves(acc) - net.neuron(u).bias;
}

namespace {

void check_inputs(const Network& net, const InputBits& inputs) {
  if (!net.finalized()) throw std::logic_error("network not finalized");
  if (inputs.size() != net.inputs().size()) throw std::invalid_argument("input width mismatch");
}

inline std::uint8_t evaluate(const Network& net, const State& prev, NeuronId u) {
  const auto& off = net.in_offsets();
  const auto* src = net.in_sources().data();
  const auto* w = net.in_weights().data();
  std::int64_t acc = 0;
  for (auto k = off[u]; k < off[u + 1]; ++k)
    if (prev[src[k]]) acc += w[k];
  return acc - net.neuron(u).bias.raw() >= 0;
}

void apply_inputs(const Network& net, const InputBits& inputs, State& next) {
  for (std::size_t i = 0; i < inputs.size(); ++i) next[net.inputs()[i]] = inputs[i] ? 1 : 0;
}

}  // namespace

State step_reference(const Network& net, const State& prev, const InputBits& inputs) {
  check_inputs(net, inputs);
  State next(net.size(), 0);
  for (NeuronId u = 0; u < net.size(); ++u)
    if (!net.neuron(u).input) next[u] = evaluate(net, prev, u);
  apply_inputs(net, inputs, next);
  return next;
}

State step_parallel(const Network& net, const State& prev, const InputBits& inputs) {
  check_inputs(net, inputs);
  const auto n = static_cast<std::int64_t>(net.size());
  State next(net.size(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < n; ++u)
    if (!net.neuron(static_cast<NeuronId>(u)).input) next[u] = evaluate(net, prev, static_cast<NeuronId>(u));
  apply_inputs(net, inputs, next);
  return next;
}

std::uint64_t decode_binary(const State& state, std::span<const NeuronId> bits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (state[bits[i]]) v |= std::uint64_t{1} << i;
  return v;
}

int InputSchedule::total_rounds() const {
  int r = 0;
  for (const auto& p : phases) r += p.second;
  return r;
}

std::vector<State> run(const Network& net, const InputSchedule& schedule) {
  Simulator sim(net);
  std::vector<State> trace;
  trace.push_back(sim.state());
  for (const auto& [bits, rounds] : schedule.phases)
    for (int r = 0; r < rounds; ++r) {
      sim.step(bits);
      trace.push_back(sim.state());
    }
  return trace;
}

Simulator::Simulator(const Network& net) : net_(&net) {
  if (!net.finalized()) throw std::logic_error("network not finalized");
  reset();
}

void Simulator::reset() {
  state_.assign(net_->size(), 0);
  acc_.assign(net_->size(), 0);
  threshold_.resize(net_->size());
  for (NeuronId u = 0; u < net_->size(); ++u) {
    const auto& nu = net_->neuron(u);
    // Inputs never cross their threshold; they are driven by the caller.
    threshold_[u] = nu.input ? std::numeric_limits<std::int64_t>::max() : nu.bias.raw();
  }
  dirty_flag_.assign(net_->size(), 0);
  last_inputs_.assign(net_->inputs().size(), 0);
  dirty_.clear();
  next_dirty_.clear();
  round_ = 0;
  events_ = 0;
}

void Simulator::step(const InputBits& inputs) {
  if (inputs.size() != net_->inputs().size()) throw std::invalid_argument("input width mismatch");
  changed_.clear();
  const auto* thr = threshold_.data();
  auto consider = [&](NeuronId u) {
    std::uint8_t s = acc_[u] >= thr[u];
    if (s != state_[u]) changed_.push_back(u);
  };
  if (round_ == 0) {
    for (NeuronId u = 0; u < net_->size(); ++u)
      if (thr[u] != std::numeric_limits<std::int64_t>::max()) consider(u);
  } else {
    for (NeuronId u : dirty_) {
      dirty_flag_[u] = 0;
      if (thr[u] != std::numeric_limits<std::int64_t>::max()) consider(u);
    }
  }
  dirty_.clear();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::uint8_t b = inputs[i] ? 1 : 0;
    NeuronId u = net_->inputs()[i];
    if (b != state_[u]) changed_.push_back(u);
    last_inputs_[i] = b;
  }

  const auto* off = net_->out_offsets().data();
  const auto* dst = net_->out_targets().data();
  const auto* w = net_->out_weights().data();
  for (NeuronId v : changed_) {
    state_[v] ^= 1;
    const bool on = state_[v];
    for (auto k = off[v]; k < off[v + 1]; ++k) {
      NeuronId u = dst[k];
      acc_[u] += on ? w[k] : -w[k];
      if (!dirty_flag_[u]) {
        dirty_flag_[u] = 1;
        dirty_.push_back(u);
      }
    }
    events_ += off[v + 1] - off[v];
  }
  ++round_;
}

void Simulator::step_idle() { step(InputBits(net_->inputs().size(), 0)); }

void Simulator::hold(const InputBits& inputs, int rounds) {
  for (int r = 0; r < rounds; ++r) step(inputs);
}

void Simulator::idle(int rounds) {
  InputBits zero(net_->inputs().size(), 0);
  for (int r = 0; r < rounds; ++r) step(zero);
}

Weight Simulator::potential(NeuronId id) const { return Weight::halves(acc_[id]) - net_->neuron(id).bias; }

}  // namespace snn
