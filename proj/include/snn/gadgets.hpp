#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "snn/network.hpp"

namespace snn {

struct Term {
  NeuronId src;
  Weight w;
};

// ceil(log2(v + 1)), at least 1: bits needed to hold values 0..v.
int bits_for(std::uint64_t v);

NeuronId make_neuron(Network& net, Weight bias, Polarity pol, std::string_view label,
                     std::span<const Term> in);
NeuronId make_neuron(Network& net, Weight bias, Polarity pol, std::string_view label,
                     std::initializer_list<Term> in);
NeuronId relay(Network& net, NeuronId src, Polarity pol, std::string_view label = "relay");
NeuronId and_gate(Network& net, std::span<const NeuronId> src, Polarity pol = Polarity::Excitatory,
                  std::string_view label = "and");
NeuronId or_gate(Network& net, std::span<const NeuronId> src, Polarity pol = Polarity::Excitatory,
                 std::string_view label = "or");
// length relays after src; element k fires exactly k+1 rounds after src.
std::vector<NeuronId> delay_chain(Network& net, NeuronId src, int length, std::string_view label = "delay");

// Binary encoding of an integer potential. `copies` share the target's
// in-edges and bias; out[i] is bit i. The target potential must be an
// integer in [0, 2^width) for the output to be exact; negative potentials
// give all-zero output.
struct Pot {
  int width = 0;
  std::vector<NeuronId> copies;
  std::vector<NeuronId> always_on;  // one per bit, fire every round from round 1
  std::vector<NeuronId> guards;     // bit i > 0 silences all lower copies
  std::vector<NeuronId> out;
  std::vector<NeuronId> out_inh;    // inhibitory twins of out, empty unless requested
};

Pot build_pot(Network& net, std::span<const Term> in, Weight bias, int width, bool dual,
              std::string_view label = "pot");
// Encodes the potential of an existing neuron, copying its in-edges.
Pot build_pot(Network& net, NeuronId target, int width, bool dual = false);
// Rounds from the round the target's inputs become stable to stable outputs.
constexpr int pot_latency(int width) { return 2 * width; }

// Ripple-carry counter of input spikes. Spikes must be at least two rounds
// apart; each spike settles within counter_latency(bits) rounds. Values wrap
// past capacity.
struct Counter {
  std::vector<NeuronId> bits;
  std::vector<NeuronId> carries;
  std::vector<NeuronId> toggles;
};
Counter build_counter(Network& net, NeuronId inc, std::uint64_t capacity, std::string_view label = "counter");
constexpr int counter_latency(int bits) { return bits + 2; }

// Output fires in rounds r+1..r+t after an input spike at round r;
// later spikes restart the window.
struct Timer {
  NeuronId out;
  std::vector<NeuronId> aux;
};
Timer build_timer(Network& net, NeuronId x, int t, std::string_view label = "timer");

enum class ExtremumMode { Max, Min, Median };

// Selects one of k input vectors (ties go to the lower index) and copies it
// to `out`. Median picks the ceil(k/2)-th smallest. Inputs must be held for
// kExtremumLatency rounds.
struct Extremum {
  std::vector<NeuronId> out;
  std::vector<NeuronId> select;  // exactly one fires once settled
  std::size_t aux = 0;
};
Extremum build_extremum(Network& net, const std::vector<std::vector<NeuronId>>& vectors, ExtremumMode mode,
                        std::string_view label = "extremum");
constexpr int kExtremumLatency = 6;
constexpr std::size_t extremum_budget(std::size_t k, std::size_t w) { return 4 * (k * k + k * w); }

// Rising-edge detector on the OR of `sources` followed by a delay chain.
// If some source starts firing at round t0 after an idle round, taps[k]
// fires exactly once, at round t0 + 2 + k.
struct Sequencer {
  NeuronId any;
  NeuronId pulse;
  std::vector<NeuronId> taps;
};
Sequencer build_sequencer(Network& net, std::span<const NeuronId> sources, int length,
                          std::string_view label = "seq");
// taps[0] = start, taps[k] fires k rounds after start.
std::vector<NeuronId> build_chain(Network& net, NeuronId start, int length, std::string_view label = "chain");

// One-hot decoding of a binary value given excitatory bits and inhibitory
// twins. Wide values use a two-level decoder to keep fan-out low. With an
// enable neuron, no line fires while it is idle. With a strobe, strobed[j]
// fires exactly once, two rounds after a strobe spike, if line j is stable
// from the strobe round on.
struct Index {
  std::vector<NeuronId> lines;
  std::vector<NeuronId> strobed;
  int latency = 1;
};
Index build_index(Network& net, std::span<const NeuronId> bits, std::span<const NeuronId> bits_inh,
                  std::string_view label = "index", std::optional<NeuronId> enable = std::nullopt,
                  std::optional<NeuronId> strobe = std::nullopt);
constexpr int kStrobeLatency = 2;

// One-hot to binary: neuron i encodes value i + offset.
std::vector<NeuronId> build_binary_encoder(Network& net, std::span<const NeuronId> onehot, int width,
                                           std::uint64_t offset, std::string_view label = "encoder");

}  // namespace snn
