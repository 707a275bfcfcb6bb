#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace snn {

enum class OpKind { Insert, Delete, Count, Distinct, Median };

struct StreamOp {
  OpKind kind = OpKind::Insert;
  std::uint64_t item = 0;  // Insert, Delete, Count only
  std::size_t line = 0;    // source line, 0 when built in code
  bool operator==(const StreamOp& o) const { return kind == o.kind && item == o.item; }
};

// One op per line: `ins x`, `del x`, `count x`, `distinct`, `median`; `#`
// starts a comment. Items are positive. Errors read "stream line N: ...".
std::vector<StreamOp> parse_stream(std::istream& is);
std::vector<StreamOp> parse_stream_text(const std::string& text);
std::string format_op(const StreamOp& op);
std::string format_stream(const std::vector<StreamOp>& ops);

}  // namespace snn
