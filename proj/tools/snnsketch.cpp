#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "snn/harness.hpp"

using namespace snn;

namespace {

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot read ") + what + " '" + path + "'");
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile streaming sketches into spiking networks, simulate them and compare with oracles"};
  app.require_subcommand(1);

  std::string sketch = "countmin", stream_path, matrix_path, report_path, export_path;
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--sketch", sketch, "countmin, loglog, median or linsketch")->capture_default_str();
    sub->add_option("--n", cfg.n, "universe size")->capture_default_str();
    sub->add_option("--m", cfg.m, "maximum stream length")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "accuracy parameter")->capture_default_str();
    sub->add_option("--delta", cfg.delta, "failure probability")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for the hash matrices")->capture_default_str();
    sub->add_option("--matrix", matrix_path, "sketch matrix file (linsketch)");
    sub->add_option("--report", report_path, "report file, default stdout");
    sub->add_flag("--oracle-check", cfg.oracle_check, "compare every answer with the oracle");
  };

  auto* run = app.add_subcommand("run", "feed a stream file through one network");
  common(run);
  run->add_option("--stream", stream_path, "stream file")->required();
  run->add_option("--export-net", export_path, "write the network in text form");
  run->add_flag("--trace", cfg.trace, "include per-update and search-phase lines");

  auto* bench = app.add_subcommand("bench", "run independent trials on random streams");
  common(bench);
  bench->add_option("--trials", cfg.trials, "number of trials")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.kind = parse_sketch_kind(sketch);
    if (!matrix_path.empty()) {
      auto in = open_input(matrix_path, "matrix");
      try {
        cfg.matrix = parse_scaled_matrix(in);
      } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
    validate_config(cfg);

    std::ofstream report_file;
    if (!report_path.empty()) {
      report_file.open(report_path);
      if (!report_file) throw UsageError("cannot write report '" + report_path + "'");
    }
    std::ostream& report = report_path.empty() ? std::cout : report_file;

    if (run->parsed()) {
      std::vector<StreamOp> ops;
      auto in = open_input(stream_path, "stream");
      try {
        ops = parse_stream(in);
      } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      std::ofstream net_file;
      if (!export_path.empty()) {
        net_file.open(export_path);
        if (!net_file) throw UsageError("cannot write network '" + export_path + "'");
      }
      run_stream(cfg, ops, report, export_path.empty() ? nullptr : &net_file);
    } else {
      run_bench(cfg, report);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
