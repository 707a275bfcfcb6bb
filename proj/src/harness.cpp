#include "snn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>

#include "snn/countmin.hpp"
#include "snn/distinct.hpp"
#include "snn/median.hpp"
#include "snn/oracles.hpp"

namespace snn {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

// Sketch value scaled back by the matrix scale, as an integer or p/q.
std::string scaled(std::int64_t v, std::int64_t scale) {
  const auto g = std::gcd(v < 0 ? -v : v, scale);
  const auto d = g ? scale / g : scale;
  if (d == 1) return std::to_string(g ? v / g : v);
  return std::to_string(v / g) + "/" + std::to_string(d);
}

struct Block {
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::string> lines;
  void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
  void write(std::ostream& os) const {
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
    for (const auto& l : lines) os << l << '\n';
    os << '\n';
  }
};

class Session {
 public:
  virtual ~Session() = default;
  virtual const Network& net() const = 0;
  virtual std::uint64_t round() = 0;
  virtual void update(const StreamOp& op) = 0;
  // Fills answer fields; returns whether the answer equals the oracle's.
  virtual bool query(const StreamOp& op, bool oracle, bool trace, Block& b) = 0;
  std::uint64_t items = 0;
};

class CountMinSession : public Session {
 public:
  explicit CountMinSession(const RunConfig& c) {
    CountMinParams p;
    p.n = c.n;
    p.m = c.m;
    p.eps = c.eps;
    p.delta = c.delta;
    p.seed = c.seed;
    items = c.n;
    net_ = build_countmin_net(p);
    machine_ = std::make_unique<CountMinMachine>(net_);
    oracle_ = std::make_unique<CountMinOracle>(net_.core.hashes);
  }
  const Network& net() const override { return net_.net; }
  std::uint64_t round() override { return machine_->sim().round(); }
  void update(const StreamOp& op) override {
    machine_->inc(op.item);
    oracle_->inc(op.item);
    stream_.push_back(op.item);
  }
  bool query(const StreamOp& op, bool oracle, bool, Block& b) override {
    const auto c = machine_->count(op.item);
    b.add("answer", std::to_string(c));
    b.add("settle", std::to_string(machine_->last_settle()));
    const auto o = oracle_->count(op.item);
    if (oracle) {
      b.add("oracle", std::to_string(o));
      b.add("exact", std::to_string(brute_frequency(stream_, op.item)));
      b.add("agree", yes(c == o));
    }
    return c == o;
  }
  CountMinMachine& machine() { return *machine_; }
  const std::vector<std::uint64_t>& stream() const { return stream_; }

 private:
  CountMinNet net_;
  std::unique_ptr<CountMinMachine> machine_;
  std::unique_ptr<CountMinOracle> oracle_;
  std::vector<std::uint64_t> stream_;
};

class LogLogSession : public Session {
 public:
  explicit LogLogSession(const RunConfig& c) {
    LogLogParams p;
    p.n = c.n;
    p.eps = c.eps;
    p.delta = c.delta;
    p.seed = c.seed;
    items = c.n;
    net_ = build_distinct_net(p);
    machine_ = std::make_unique<DistinctMachine>(net_);
    for (const auto& h : net_.hashes) oracle_.emplace_back(h, p.bucket_bits());
  }
  const Network& net() const override { return net_.net; }
  std::uint64_t round() override { return machine_->sim().round(); }
  void update(const StreamOp& op) override {
    machine_->insert(op.item);
    for (auto& o : oracle_) o.insert(op.item);
    stream_.push_back(op.item);
  }
  double oracle_estimate() const {
    std::vector<std::uint64_t> s;
    for (const auto& o : oracle_) s.push_back(o.sum());
    std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
    return loglog_estimate(s[s.size() / 2], net_.params.buckets());
  }
  bool query(const StreamOp&, bool oracle, bool, Block& b) override {
    const double e = machine_->estimate();
    b.add("answer", num(e));
    b.add("median_sum", std::to_string(machine_->median_sum()));
    const double o = oracle_estimate();
    if (oracle) {
      b.add("oracle", num(o));
      b.add("exact", std::to_string(brute_distinct(stream_)));
      b.add("agree", yes(e == o));
    }
    return e == o;
  }
  double estimate() const { return machine_->estimate(); }
  const std::vector<std::uint64_t>& stream() const { return stream_; }

 private:
  DistinctNet net_;
  std::unique_ptr<DistinctMachine> machine_;
  std::vector<LogLogOracle> oracle_;
  std::vector<std::uint64_t> stream_;
};

class MedianSession : public Session {
 public:
  explicit MedianSession(const RunConfig& c) {
    MedianParams p;
    p.n = c.n;
    p.m = c.m;
    p.eps = c.eps;
    p.delta = c.delta;
    p.seed = c.seed;
    items = c.n;
    eps_ = c.eps;
    net_ = build_median_net(p);
    machine_ = std::make_unique<MedianMachine>(net_);
    std::vector<std::vector<HashMatrix>> lh;
    for (const auto& core : net_.levels) lh.push_back(core.hashes);
    oracle_ = std::make_unique<DyadicMedianOracle>(p.levels(), lh, net_.element.hashes, net_.eps_num, net_.eps_den);
  }
  const Network& net() const override { return net_.net; }
  std::uint64_t round() override { return machine_->sim().round(); }
  void update(const StreamOp& op) override {
    machine_->insert(op.item);
    oracle_->insert(op.item);
  }
  bool query(const StreamOp&, bool oracle, bool trace, Block& b) override {
    last_ = machine_->query();
    const auto& s = oracle_->stream();
    b.add("answer", last_.has_output ? std::to_string(last_.value) : "none");
    b.add("length", std::to_string(machine_->length()));
    b.add("forced", yes(last_.forced));
    b.add("settle", std::to_string(last_.settle));
    const auto o = oracle_->query();
    bool prefix_ok = true;
    for (const auto& rec : last_.trace) prefix_ok = prefix_ok && rec.est == oracle_->prefix_estimate(rec.chi);
    if (oracle) {
      b.add("oracle", o.has_output ? std::to_string(o.value) : "none");
      if (last_.has_output) {
        b.add("rank", std::to_string(brute_rank(s, last_.value)));
        b.add("within", yes(rank_within(s, last_.value, eps_)));
        b.add("member", yes(brute_frequency(s, last_.value) > 0));
      }
      b.add("prefix_sums", yes(prefix_ok));
      b.add("agree", yes(last_.value == o.value && last_.trace == o.trace));
    }
    if (trace)
      for (const auto& rec : last_.trace) b.lines.push_back(format_phase(rec));
    return last_.value == o.value && last_.trace == o.trace && prefix_ok;
  }
  const MedianResult& last() const { return last_; }
  const std::vector<std::uint64_t>& stream() const { return oracle_->stream(); }

 private:
  MedianNet net_;
  std::unique_ptr<MedianMachine> machine_;
  std::unique_ptr<DyadicMedianOracle> oracle_;
  MedianResult last_;
  double eps_ = 0;
};

class LinSketchSession : public Session {
 public:
  explicit LinSketchSession(const RunConfig& c) : scale_(c.matrix->scale), oracle_(c.matrix->a) {
    const auto& a = c.matrix->a;
    std::int64_t amax = 1;
    for (const auto& row : a)
      for (auto v : row) amax = std::max<std::int64_t>(amax, v < 0 ? -v : v);
    items = a.front().size();
    // Room for m updates of the largest entry.
    ell_ = bits_for(static_cast<std::uint64_t>(amax) * std::max<std::uint64_t>(c.m, 1));
    net_ = build_linsketch_net(a, ell_);
    net_.net.seed = c.seed;
    net_.net.param_m = c.m;
    machine_ = std::make_unique<LinSketchMachine>(net_);
  }
  const Network& net() const override { return net_.net; }
  std::uint64_t round() override { return machine_->sim().round(); }
  void update(const StreamOp& op) override {
    const bool neg = op.kind == OpKind::Delete;
    machine_->update(static_cast<int>(op.item), neg);
    oracle_.update(static_cast<int>(op.item), neg);
  }
  // `count i` reads row i of the sketch.
  bool query(const StreamOp& op, bool oracle, bool, Block& b) override {
    const auto y = machine_->read()[op.item - 1];
    const auto o = oracle_.value()[op.item - 1];
    b.add("answer", scaled(y, scale_));
    if (oracle) {
      b.add("oracle", scaled(o, scale_));
      b.add("agree", yes(y == o));
    }
    return y == o;
  }
  int ell() const { return ell_; }
  bool exact() const { return machine_->read() == oracle_.value(); }
  std::string reading() const {
    std::string s;
    for (auto v : machine_->read()) s += (s.empty() ? "" : ",") + scaled(v, scale_);
    return s;
  }
  std::string truth() const {
    std::string s;
    for (auto v : oracle_.value()) s += (s.empty() ? "" : ",") + scaled(v, scale_);
    return s;
  }

 private:
  std::int64_t scale_;
  int ell_ = 0;
  LinSketchNet net_;
  std::unique_ptr<LinSketchMachine> machine_;
  LinearSketchOracle oracle_;
};

std::unique_ptr<Session> make_session(const RunConfig& c) {
  switch (c.kind) {
    case SketchKind::CountMin: return std::make_unique<CountMinSession>(c);
    case SketchKind::LogLog: return std::make_unique<LogLogSession>(c);
    case SketchKind::Median: return std::make_unique<MedianSession>(c);
    case SketchKind::LinSketch: return std::make_unique<LinSketchSession>(c);
  }
  throw UsageError("unknown sketch");
}

Block header(const RunConfig& c, const Session& s) {
  Block b;
  b.add("sketch", sketch_name(c.kind));
  b.add("n", std::to_string(s.items));
  b.add("m", std::to_string(c.m));
  if (c.kind != SketchKind::LinSketch) {
    b.add("eps", num(c.eps));
    b.add("delta", num(c.delta));
  } else {
    b.add("rows", std::to_string(c.matrix->a.size()));
    b.add("scale", std::to_string(c.matrix->scale));
  }
  b.add("seed", std::to_string(c.seed));
  b.add("neurons", std::to_string(s.net().size()));
  b.add("auxiliary", std::to_string(s.net().auxiliary_count()));
  b.add("synapses", std::to_string(s.net().synapses().size()));
  b.add("persistence", std::to_string(s.net().persistence));
  return b;
}

const char* op_word(OpKind k) {
  switch (k) {
    case OpKind::Insert: return "ins";
    case OpKind::Delete: return "del";
    case OpKind::Count: return "count";
    case OpKind::Distinct: return "distinct";
    case OpKind::Median: return "median";
  }
  return "";
}

}  // namespace

SketchKind parse_sketch_kind(const std::string& name) {
  if (name == "countmin") return SketchKind::CountMin;
  if (name == "loglog") return SketchKind::LogLog;
  if (name == "median") return SketchKind::Median;
  if (name == "linsketch") return SketchKind::LinSketch;
  throw UsageError("unknown sketch '" + name + "' (expected countmin, loglog, median or linsketch)");
}

std::string sketch_name(SketchKind kind) {
  switch (kind) {
    case SketchKind::CountMin: return "countmin";
    case SketchKind::LogLog: return "loglog";
    case SketchKind::Median: return "median";
    case SketchKind::LinSketch: return "linsketch";
  }
  return "";
}

void validate_config(const RunConfig& c) {
  if (c.trials < 1) throw UsageError("--trials must be at least 1");
  if (c.m < 1) throw UsageError("--m must be at least 1");
  if (c.kind == SketchKind::LinSketch) {
    if (!c.matrix) throw UsageError("linsketch needs --matrix");
    return;
  }
  if (c.matrix) throw UsageError("--matrix applies to linsketch only");
  if (!(c.eps > 0 && c.eps < 1)) throw UsageError("--eps must lie in (0, 1)");
  if (!(c.delta > 0 && c.delta < 1)) throw UsageError("--delta must lie in (0, 1)");
  if (c.n < 2) throw UsageError("--n must be at least 2");
  if (c.kind == SketchKind::Median && (c.n & (c.n - 1)) != 0) throw UsageError("median needs --n a power of two");
}

void run_stream(const RunConfig& c, const std::vector<StreamOp>& ops, std::ostream& report, std::ostream* export_net) {
  validate_config(c);
  const std::uint64_t items = c.kind == SketchKind::LinSketch ? c.matrix->a.front().size() : c.n;
  std::uint64_t pending = 0;
  for (const auto& op : ops) {
    const std::string where = "stream line " + std::to_string(op.line);
    const bool ok = op.kind == OpKind::Insert || (c.kind == SketchKind::LinSketch && op.kind == OpKind::Delete) ||
                    (op.kind == OpKind::Count && (c.kind == SketchKind::CountMin || c.kind == SketchKind::LinSketch)) ||
                    (op.kind == OpKind::Distinct && c.kind == SketchKind::LogLog) ||
                    (op.kind == OpKind::Median && c.kind == SketchKind::Median);
    if (!ok) throw ContractError(where + ": '" + op_word(op.kind) + "' is not supported by " + sketch_name(c.kind));
    if (op.kind == OpKind::Insert || op.kind == OpKind::Delete) {
      if (op.item > items) throw ContractError(where + ": item " + std::to_string(op.item) + " exceeds n");
      if (++pending > c.m) throw ContractError(where + ": more than m = " + std::to_string(c.m) + " updates");
    }
    if (op.kind == OpKind::Count) {
      const std::uint64_t limit = c.kind == SketchKind::LinSketch ? c.matrix->a.size() : items;
      if (op.item > limit)
        throw ContractError(where + ": " + (c.kind == SketchKind::LinSketch ? "row " : "item ") +
                            std::to_string(op.item) + " out of range");
    }
  }

  auto s = make_session(c);
  if (export_net) export_network(s->net(), *export_net);
  header(c, *s).write(report);
  std::uint64_t updates = 0, queries = 0, mismatches = 0;
  std::vector<std::string> trace;
  for (const auto& op : ops) {
    if (op.kind == OpKind::Insert || op.kind == OpKind::Delete) {
      s->update(op);
      ++updates;
      if (c.trace) trace.push_back("UPDATE line=" + std::to_string(op.line) + " " + format_op(op) +
                                   " round=" + std::to_string(s->round()));
      continue;
    }
    Block b;
    b.add("query", std::to_string(++queries));
    b.add("line", std::to_string(op.line));
    b.add("op", format_op(op));
    b.add("after_updates", std::to_string(updates));
    const bool agree = s->query(op, c.oracle_check, c.trace, b);
    mismatches += !agree;
    b.add("round", std::to_string(s->round()));
    b.lines.insert(b.lines.begin(), trace.begin(), trace.end());
    trace.clear();
    b.write(report);
  }
  Block end;
  end.add("updates", std::to_string(updates));
  end.add("queries", std::to_string(queries));
  end.add("rounds", std::to_string(s->round()));
  if (c.oracle_check) end.add("mismatches", std::to_string(mismatches));
  end.lines = trace;
  end.write(report);
}

void run_bench(const RunConfig& c, std::ostream& report) {
  validate_config(c);
  struct Row {
    Block block;
    bool pass = false;
    int latency = 0;
  };
  std::vector<Row> rows(c.trials);
  const double eps = c.eps;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < c.trials; ++t) {
    RunConfig tc = c;
    tc.seed = c.seed + static_cast<std::uint64_t>(t);
    std::mt19937_64 rng(tc.seed);
    auto s = make_session(tc);
    Row& r = rows[t];
    r.block.add("trial", std::to_string(t));
    r.block.add("seed", std::to_string(tc.seed));
    const std::uint64_t n = s->items;
    for (std::uint64_t k = 0; k < c.m; ++k) {
      StreamOp op;
      op.item = 1 + rng() % n;
      op.kind = c.kind == SketchKind::LinSketch && rng() % 2 ? OpKind::Delete : OpKind::Insert;
      s->update(op);
    }
    switch (c.kind) {
      case SketchKind::CountMin: {
        auto& cm = static_cast<CountMinSession&>(*s);
        const std::uint64_t x = 1 + rng() % n;
        const auto answer = cm.machine().count(x), f = brute_frequency(cm.stream(), x);
        r.pass = static_cast<double>(answer) <= static_cast<double>(f) + eps * static_cast<double>(c.m);
        r.latency = cm.machine().last_settle();
        r.block.add("item", std::to_string(x));
        r.block.add("answer", std::to_string(answer));
        r.block.add("truth", std::to_string(f));
        break;
      }
      case SketchKind::LogLog: {
        auto& ll = static_cast<LogLogSession&>(*s);
        const double e = ll.estimate();
        const auto d = brute_distinct(ll.stream());
        r.pass = std::abs(e / static_cast<double>(d) - 1) <= eps;
        r.latency = s->net().persistence;
        r.block.add("answer", num(e));
        r.block.add("truth", std::to_string(d));
        break;
      }
      case SketchKind::Median: {
        auto& md = static_cast<MedianSession&>(*s);
        Block scratch;
        md.query({OpKind::Median, 0, 0}, false, false, scratch);
        const auto& res = md.last();
        r.pass = rank_within(md.stream(), res.value, eps);
        r.latency = res.settle;
        r.block.add("answer", std::to_string(res.value));
        r.block.add("truth", std::to_string(brute_rank(md.stream(), res.value)));
        r.block.add("forced", yes(res.forced));
        break;
      }
      case SketchKind::LinSketch: {
        auto& ls = static_cast<LinSketchSession&>(*s);
        r.pass = ls.exact();
        r.latency = s->net().persistence;
        r.block.add("answer", ls.reading());
        r.block.add("truth", ls.truth());
        break;
      }
    }
    r.block.add("pass", yes(r.pass));
    r.block.add("latency", std::to_string(r.latency));
  }
  Block head;
  head.add("sketch", sketch_name(c.kind));
  head.add("trials", std::to_string(c.trials));
  head.add("m", std::to_string(c.m));
  if (c.kind != SketchKind::LinSketch) {
    head.add("n", std::to_string(c.n));
    head.add("eps", num(c.eps));
    head.add("delta", num(c.delta));
  }
  head.add("seed", std::to_string(c.seed));
  head.write(report);
  std::vector<int> lat;
  int failures = 0;
  for (const auto& r : rows) {
    r.block.write(report);
    failures += !r.pass;
    lat.push_back(r.latency);
  }
  std::sort(lat.begin(), lat.end());
  auto pct = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(lat.size())));
    return lat[std::clamp<std::size_t>(k, 1, lat.size()) - 1];
  };
  Block agg;
  agg.add("failures", std::to_string(failures));
  agg.add("failure_rate", num(static_cast<double>(failures) / c.trials));
  agg.add("latency_p50", std::to_string(pct(0.5)));
  agg.add("latency_p90", std::to_string(pct(0.9)));
  agg.add("latency_max", std::to_string(lat.back()));
  agg.write(report);
}

}  // namespace snn
