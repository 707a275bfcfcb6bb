#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace snn {

// Exact synaptic weight or bias. Stored in half units: every value used by
// the builders is an integer or an odd multiple of 1/2.
class Weight {
 public:
  constexpr Weight() = default;
  constexpr Weight(std::int64_t v) : h_(v * 2) {}  // NOLINT: implicit from integers

  static constexpr Weight halves(std::int64_t h) {
    Weight w;
    w.h_ = h;
    return w;
  }

  constexpr std::int64_t raw() const { return h_; }
  constexpr bool is_integer() const { return h_ % 2 == 0; }

  constexpr Weight operator-() const { return halves(-h_); }
  constexpr Weight operator+(Weight o) const { return halves(h_ + o.h_); }
  constexpr Weight operator-(Weight o) const { return halves(h_ - o.h_); }
  constexpr Weight operator*(std::int64_t k) const { return halves(h_ * k); }
  constexpr Weight& operator+=(Weight o) {
    h_ += o.h_;
    return *this;
  }
  constexpr auto operator<=>(const Weight&) const = default;

  // Rational text form p/q in lowest terms (q is 1 or 2).
  std::string str() const;
  // Accepts "p", "p/q" with q dividing 2 after reduction.
  static std::optional<Weight> parse(std::string_view s);

 private:
  std::int64_t h_ = 0;
};

}  // namespace snn
