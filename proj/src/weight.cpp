#include "snn/weight.hpp"

#include <charconv>
#include <numeric>

namespace snn {

std::string Weight::str() const {
  if (h_ % 2 == 0) return std::to_string(h_ / 2) + "/1";
  return std::to_string(h_) + "/2";
}

std::optional<Weight> Weight::parse(std::string_view s) {
  auto to_int = [](std::string_view t, std::int64_t& out) {
    if (t.empty()) return false;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && p == t.data() + t.size();
  };
  std::int64_t p = 0, q = 1;
  auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    if (!to_int(s, p)) return std::nullopt;
  } else {
    if (!to_int(s.substr(0, slash), p) || !to_int(s.substr(slash + 1), q)) return std::nullopt;
    if (q <= 0) return std::nullopt;
  }
  std::int64_t g = std::gcd(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  if (q == 1) return Weight(p);
  if (q == 2) return Weight::halves(p);
  return std::nullopt;
}

}  // namespace snn
