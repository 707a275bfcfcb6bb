#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snn/weight.hpp"

namespace snn {

using NeuronId = std::uint32_t;

enum class Polarity : std::uint8_t { Excitatory, Inhibitory };

struct Neuron {
  Weight bias;
  Polarity pol = Polarity::Excitatory;
  bool input = false;
  std::uint32_t label = 0;
};

struct Synapse {
  NeuronId src;
  NeuronId dst;
  Weight w;
};

// A spiking network of deterministic threshold gates. Builders append
// neurons and synapses, then call finalize() once; the simulator only works
// on finalized networks.
class Network {
 public:
  Network();

  NeuronId add_neuron(Weight bias, Polarity pol, std::string_view label = {});
  NeuronId add_input(std::string_view label = {});
  void add_synapse(NeuronId src, NeuronId dst, Weight w);
  // Inhibitory edge whose magnitude is fixed at finalize() to
  // 4 * (sum of |w| over the target's ordinary in-edges + |bias| + 1).
  void add_dominant(NeuronId src, NeuronId dst);
  void add_output(NeuronId id) { outputs_.push_back(id); }
  // Replaces the input list (used when reading an exported network).
  void mark_inputs(const std::vector<NeuronId>& ids);

  void finalize();
  bool finalized() const { return finalized_; }

  std::size_t size() const { return neurons_.size(); }
  const Neuron& neuron(NeuronId id) const { return neurons_[id]; }
  Neuron& neuron(NeuronId id) { return neurons_[id]; }
  const std::vector<Neuron>& neurons() const { return neurons_; }
  const std::vector<Synapse>& synapses() const { return synapses_; }
  std::vector<Synapse>& synapses() { return synapses_; }
  const std::vector<NeuronId>& inputs() const { return inputs_; }
  const std::vector<NeuronId>& outputs() const { return outputs_; }
  std::size_t auxiliary_count() const;

  const std::string& label(NeuronId id) const { return labels_[neurons_[id].label]; }
  std::uint32_t intern_label(std::string_view label);

  // Compressed adjacency, valid after finalize().
  const std::vector<std::uint32_t>& out_offsets() const { return out_off_; }
  const std::vector<NeuronId>& out_targets() const { return out_dst_; }
  const std::vector<std::int64_t>& out_weights() const { return out_w_; }
  const std::vector<std::uint32_t>& in_offsets() const { return in_off_; }
  const std::vector<NeuronId>& in_sources() const { return in_src_; }
  const std::vector<std::int64_t>& in_weights() const { return in_w_; }

  // Export metadata.
  std::string builder = "custom";
  std::uint64_t param_n = 0;
  std::uint64_t param_m = 0;
  std::vector<std::string> header_lines;  // e.g. serialized hash matrices
  double param_eps = 0;
  double param_delta = 0;
  std::uint64_t seed = 0;
  int persistence = 0;  // rounds an update must be held

 private:
  std::vector<Neuron> neurons_;
  std::vector<Synapse> synapses_;
  std::vector<std::pair<NeuronId, NeuronId>> dominant_;
  std::vector<NeuronId> inputs_;
  std::vector<NeuronId> outputs_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  bool finalized_ = false;

  std::vector<std::uint32_t> out_off_, in_off_;
  std::vector<NeuronId> out_dst_, in_src_;
  std::vector<std::int64_t> out_w_, in_w_;
};

// Structural checks: polarity of every outgoing weight, edges into input
// neurons, dangling ids. Empty result means the network is well formed.
std::vector<std::string> validate(const Network& net);

void export_network(const Network& net, std::ostream& os);
std::string export_network(const Network& net);
// Throws std::runtime_error with a line number on malformed text.
Network import_network(std::istream& is);

}  // namespace snn
