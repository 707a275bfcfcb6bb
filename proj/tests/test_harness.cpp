#include <gtest/gtest.h>

#include <sstream>

#include "snn/harness.hpp"

using namespace snn;

namespace {

std::string value_of(const std::string& report, const std::string& key, int occurrence = 0) {
  std::istringstream is(report);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + "=", 0) == 0 && occurrence-- == 0) return line.substr(key.size() + 1);
  return "";
}

int count_of(const std::string& report, const std::string& key) {
  int k = 0;
  while (!value_of(report, key, k).empty()) ++k;
  return k;
}

}  // namespace

TEST(Harness, CountMinSevenInserts) {
  RunConfig c;
  c.oracle_check = true;
  std::ostringstream out;
  run_stream(c, parse_stream_text("ins 5\nins 5\nins 5\nins 5\nins 5\nins 5\nins 5\ncount 5\n"), out);
  EXPECT_EQ(value_of(out.str(), "answer"), "7");
  EXPECT_EQ(value_of(out.str(), "oracle"), "7");
  EXPECT_EQ(value_of(out.str(), "mismatches"), "0");
}

TEST(Harness, MedianOfOneToN) {
  RunConfig c;
  c.kind = SketchKind::Median;
  c.n = c.m = 1024;
  c.eps = c.delta = 0.25;
  c.oracle_check = true;
  c.trace = true;
  std::string text;
  for (int x = 1; x <= 1024; ++x) text += "ins " + std::to_string(x) + "\n";
  text += "median\n";
  std::ostringstream out;
  run_stream(c, parse_stream_text(text), out);
  const auto rank = std::stoi(value_of(out.str(), "rank"));
  EXPECT_GE(rank, 512 - 256);
  EXPECT_LE(rank, 512 + 256);
  EXPECT_EQ(value_of(out.str(), "within"), "true");
  EXPECT_EQ(value_of(out.str(), "prefix_sums"), "true");
  EXPECT_NE(out.str().find("PHASE 10 chi=511"), std::string::npos);
}

TEST(Harness, EmptyMedianQueryHasNoAnswer) {
  RunConfig c;
  c.kind = SketchKind::Median;
  c.n = 16;
  c.m = 16;
  std::ostringstream out;
  run_stream(c, parse_stream_text("median\n"), out);
  EXPECT_EQ(value_of(out.str(), "answer"), "none");
  EXPECT_EQ(value_of(out.str(), "length"), "0");
}

TEST(Harness, LinSketchScaledReadings) {
  RunConfig c;
  c.kind = SketchKind::LinSketch;
  c.m = 16;
  std::istringstream a("2 3\n1/2 0 1\n-0.25 2 0\n");
  c.matrix = parse_scaled_matrix(a);
  c.oracle_check = true;
  std::ostringstream out;
  run_stream(c, parse_stream_text("ins 1\ncount 1\ncount 2\ndel 1\nins 2\ncount 2\n"), out);
  EXPECT_EQ(value_of(out.str(), "answer", 0), "1/2");
  EXPECT_EQ(value_of(out.str(), "answer", 1), "-1/4");
  EXPECT_EQ(value_of(out.str(), "answer", 2), "2");
  EXPECT_EQ(value_of(out.str(), "mismatches"), "0");
}

TEST(Harness, LogLogAgreesWithOracle) {
  RunConfig c;
  c.kind = SketchKind::LogLog;
  c.n = 64;
  c.eps = 0.5;
  c.delta = 0.5;
  c.oracle_check = true;
  std::string text;
  for (int x = 1; x <= 40; ++x) text += "ins " + std::to_string(x) + "\n";
  text += "distinct\n";
  std::ostringstream out;
  run_stream(c, parse_stream_text(text), out);
  EXPECT_EQ(value_of(out.str(), "agree"), "true");
  EXPECT_EQ(value_of(out.str(), "exact"), "40");
}

TEST(Harness, ContractViolations) {
  RunConfig c;
  c.n = 16;
  c.m = 2;
  std::ostringstream out;
  EXPECT_THROW(run_stream(c, parse_stream_text("ins 1\ndel 1\n"), out), ContractError);
  EXPECT_THROW(run_stream(c, parse_stream_text("ins 17\n"), out), ContractError);
  EXPECT_THROW(run_stream(c, parse_stream_text("ins 1\nins 2\nins 3\n"), out), ContractError);
  EXPECT_THROW(run_stream(c, parse_stream_text("median\n"), out), ContractError);
  EXPECT_TRUE(out.str().empty());
  try {
    run_stream(c, parse_stream_text("ins 1\n\nmedian\n"), out);
  } catch (const ContractError& e) {
    EXPECT_EQ(std::string(e.what()), "stream line 3: 'median' is not supported by countmin");
  }
}

TEST(Harness, UsageErrors) {
  RunConfig c;
  c.kind = SketchKind::LinSketch;
  EXPECT_THROW(validate_config(c), UsageError);
  c.kind = SketchKind::Median;
  c.n = 100;
  EXPECT_THROW(validate_config(c), UsageError);
  c.n = 128;
  c.eps = 1.5;
  EXPECT_THROW(validate_config(c), UsageError);
  EXPECT_THROW(parse_sketch_kind("bloom"), UsageError);
  EXPECT_EQ(parse_sketch_kind("loglog"), SketchKind::LogLog);
}

TEST(Harness, BenchOneTrialOneRow) {
  RunConfig c;
  c.n = 64;
  c.m = 50;
  c.trials = 1;
  std::ostringstream out;
  run_bench(c, out);
  EXPECT_EQ(count_of(out.str(), "trial"), 1);
  EXPECT_EQ(value_of(out.str(), "failures"), "0");
}

TEST(Harness, BenchIsDeterministic) {
  RunConfig c;
  c.kind = SketchKind::LogLog;
  c.n = 64;
  c.m = 40;
  c.eps = 0.5;
  c.delta = 0.5;
  c.trials = 4;
  std::ostringstream a, b;
  run_bench(c, a);
  run_bench(c, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(count_of(a.str(), "trial"), 4);
  EXPECT_FALSE(value_of(a.str(), "failure_rate").empty());
}

TEST(Harness, RunReportIsDeterministic) {
  RunConfig c;
  c.n = 32;
  c.m = 64;
  const auto ops = parse_stream_text("ins 3\nins 9\nins 3\ncount 3\ncount 9\n");
  std::ostringstream a, b, na, nb;
  run_stream(c, ops, a, &na);
  run_stream(c, ops, b, &nb);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(na.str(), nb.str());
  EXPECT_FALSE(na.str().empty());
}
