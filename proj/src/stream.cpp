#include "snn/stream.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace snn {

std::vector<StreamOp> parse_stream(std::istream& is) {
  std::vector<StreamOp> ops;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error("stream line " + std::to_string(lineno) + ": " + msg);
    };
    auto p = line.find('#');
    if (p != std::string::npos) line.erase(p);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    StreamOp op;
    op.line = lineno;
    bool takes_item = true;
    if (word == "ins") op.kind = OpKind::Insert;
    else if (word == "del") op.kind = OpKind::Delete;
    else if (word == "count") op.kind = OpKind::Count;
    else if (word == "distinct") op.kind = OpKind::Distinct, takes_item = false;
    else if (word == "median") op.kind = OpKind::Median, takes_item = false;
    else fail("unknown operation '" + word + "'");
    if (takes_item) {
      std::string tok;
      if (!(ls >> tok)) fail("'" + word + "' needs an item");
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || used == 0) fail("item '" + tok + "' is not an integer");
      if (v < 1) fail("item must be positive");
      op.item = static_cast<std::uint64_t>(v);
    }
    std::string extra;
    if (ls >> extra) fail("unexpected '" + extra + "'");
    ops.push_back(op);
  }
  return ops;
}

std::vector<StreamOp> parse_stream_text(const std::string& text) {
  std::istringstream is(text);
  return parse_stream(is);
}

std::string format_op(const StreamOp& op) {
  switch (op.kind) {
    case OpKind::Insert: return "ins " + std::to_string(op.item);
    case OpKind::Delete: return "del " + std::to_string(op.item);
    case OpKind::Count: return "count " + std::to_string(op.item);
    case OpKind::Distinct: return "distinct";
    case OpKind::Median: return "median";
  }
  return {};
}

std::string format_stream(const std::vector<StreamOp>& ops) {
  std::string out;
  for (const auto& op : ops) out += format_op(op) + "\n";
  return out;
}

}  // namespace snn
