#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snn/linsketch.hpp"
#include "snn/stream.hpp"

namespace snn {

enum class SketchKind { CountMin, LogLog, Median, LinSketch };

SketchKind parse_sketch_kind(const std::string& name);
std::string sketch_name(SketchKind kind);

// Bad flags or missing inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A stream the chosen sketch cannot accept (wrong op, item out of range,
// more than m updates).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  SketchKind kind = SketchKind::CountMin;
  std::uint64_t n = 1024;
  std::uint64_t m = 1024;
  double eps = 0.1;
  double delta = 0.125;
  std::uint64_t seed = 1;
  std::optional<ScaledMatrix> matrix;  // linsketch only
  bool trace = false;
  bool oracle_check = false;
  int trials = 1;
};

// Throws UsageError.
void validate_config(const RunConfig& c);

// Feeds the stream through the network, answering queries inline, and writes
// a key=value report: a header block with network statistics, one block per
// query, and a closing summary. `export_net`, when given, receives the
// exported network. Throws ContractError.
void run_stream(const RunConfig& c, const std::vector<StreamOp>& ops, std::ostream& report,
                std::ostream* export_net = nullptr);

// Runs c.trials independent trials on random streams of length m, trial t
// using seed c.seed + t, and writes one block per trial plus an aggregate
// block with the failure rate and latency percentiles.
void run_bench(const RunConfig& c, std::ostream& report);

}  // namespace snn
