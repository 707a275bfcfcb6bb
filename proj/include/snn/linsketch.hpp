#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "snn/gadgets.hpp"
#include "snn/network.hpp"
#include "snn/simulator.hpp"

namespace snn {

using Matrix = std::vector<std::vector<std::int64_t>>;

// "r n" followed by r rows of n integers. Throws with a line number.
Matrix parse_matrix(std::istream& is);

// Same layout, but entries may be fractions (3/4) or decimals (0.25). The
// matrix is multiplied by the least common denominator `scale`, so sketch
// readings are the true values times scale.
struct ScaledMatrix {
  Matrix a;
  std::int64_t scale = 1;
};
ScaledMatrix parse_scaled_matrix(std::istream& is);

// Maintains y = A z for a turnstile stream of unit updates to z. Inputs are
// n item neurons followed by a sign neuron (fires for a deletion); output
// row i is `ell` magnitude bits plus a sign neuron.
struct LinSketchNet {
  Network net;
  Matrix a;
  int rows = 0;
  int items = 0;
  int ell = 0;
  int entry_bits = 0;
  std::vector<std::vector<NeuronId>> magnitude;
  std::vector<NeuronId> sign;
  std::vector<NeuronId> work;  // per-update computation neurons, idle between updates
  // Per row: gates carrying the positive / negative part of the update.
  std::vector<std::vector<NeuronId>> positive_part, negative_part;
  Sequencer seq;
  int write_tap = 0;  // taps[write_tap] latches the new value
  int hold = 0;       // rounds an update is presented
  int gap = 1;        // idle rounds after it
};

LinSketchNet build_linsketch_net(const Matrix& a, int ell);
std::size_t linsketch_budget(int rows, int ell);
int linsketch_persistence_budget(int ell);

class LinSketchMachine {
 public:
  explicit LinSketchMachine(const LinSketchNet& net);
  // item in [1, n]; negative = deletion.
  void update(int item, bool negative);
  std::vector<std::int64_t> read() const;
  Simulator& sim() { return sim_; }

 private:
  const LinSketchNet* net_;
  Simulator sim_;
};

}  // namespace snn
