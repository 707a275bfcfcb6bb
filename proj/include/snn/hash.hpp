#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "snn/gadgets.hpp"
#include "snn/network.hpp"

namespace snn {

// Linear map over GF(2): output bit j is the parity of row j AND x.
// No affine offset, so h(0) = 0.
struct HashMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint64_t> row;  // bit k of row[j] is entry (j, k)

  static HashMatrix random(int rows, int cols, std::mt19937_64& rng);
  std::uint64_t apply(std::uint64_t x) const;
  // "H <rows> <cols> <hex row>..."
  std::string serialize() const;
  static HashMatrix parse(const std::string& line);
  bool operator==(const HashMatrix&) const = default;
};

struct HashNet {
  std::vector<NeuronId> out;      // out[j] is output bit j
  std::vector<NeuronId> out_inh;  // inhibitory twins
  std::vector<NeuronId> copies;   // every potential copy, for callers that silence the net
  std::vector<Pot> pots;
};

HashNet build_hash_net(Network& net, std::span<const NeuronId> inputs, const HashMatrix& h,
                       std::string_view label = "hash");
// Rounds from inputs becoming stable to stable outputs.
int hash_latency(int cols);
int hash_pot_width(int cols);

}  // namespace snn
