#pragma once

#include <stdexcept>
#include <string>

namespace evt {

// Extended real restricted to [-inf, +inf) for second-order tail indices.
// The -inf state is a tagged value, not an IEEE infinity: there are no
// arithmetic operators, so -inf cannot leak into computations unnoticed.
class ExtReal {
 public:
  static ExtReal minus_infinity() noexcept { return ExtReal(true, 0.0); }
  static ExtReal finite(double v) { return ExtReal(false, v); }

  bool is_minus_infinity() const noexcept { return neg_inf_; }
  bool is_finite() const noexcept { return !neg_inf_; }

  double finite_value() const {
    if (neg_inf_) throw std::logic_error("ExtReal: value is -inf");
    return value_;
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }
  friend bool operator!=(const ExtReal& a, const ExtReal& b) noexcept {
    return !(a == b);
  }
  // Total order with -inf below every finite value.
  friend bool operator<(const ExtReal& a, const ExtReal& b) noexcept {
    if (a.neg_inf_) return !b.neg_inf_;
    if (b.neg_inf_) return false;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) noexcept {
    return a < b || a == b;
  }

  std::string str() const;

 private:
  ExtReal(bool neg_inf, double v) noexcept : neg_inf_(neg_inf), value_(v) {}
  bool neg_inf_;
  double value_;
};

}  // namespace evt
