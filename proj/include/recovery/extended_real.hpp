#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace recovery {

// Nonnegative extended real: a finite value >= 0 or +infinity.
// Infinity is carried as an explicit state, never as a large float.
template <typename Scalar>
class ExtendedReal {
 public:
  ExtendedReal() : value_(0), infinite_(false) {}

  ExtendedReal(Scalar value) : value_(value), infinite_(false) {
    if (std::isinf(value_)) {
      value_ = 0;
      infinite_ = true;
      return;
    }
    if (!(value_ >= Scalar(0)) || std::isnan(value_)) {
      throw std::domain_error("ExtendedReal: value must be nonnegative");
    }
  }

  static ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  bool finite() const { return !infinite_; }
  bool is_infinite() const { return infinite_; }

  Scalar value() const {
    if (infinite_) throw std::domain_error("ExtendedReal: infinite has no finite value");
    return value_;
  }

  // Finite value, or +inf as a float for contexts that tolerate it (printing, min/max scans).
  Scalar as_double() const {
    return infinite_ ? std::numeric_limits<Scalar>::infinity() : value_;
  }

  friend bool operator==(const ExtendedReal& x, const ExtendedReal& y) {
    if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
    return x.value_ == y.value_;
  }
  friend bool operator!=(const ExtendedReal& x, const ExtendedReal& y) { return !(x == y); }
  friend bool operator<(const ExtendedReal& x, const ExtendedReal& y) {
    if (x.infinite_) return false;
    if (y.infinite_) return true;
    return x.value_ < y.value_;
  }
  friend bool operator<=(const ExtendedReal& x, const ExtendedReal& y) { return !(y < x); }
  friend bool operator>(const ExtendedReal& x, const ExtendedReal& y) { return y < x; }
  friend bool operator>=(const ExtendedReal& x, const ExtendedReal& y) { return !(x < y); }

  friend ExtendedReal operator+(const ExtendedReal& x, const ExtendedReal& y) {
    if (x.infinite_ || y.infinite_) return infinity();
    return ExtendedReal(x.value_ + y.value_);
  }

  friend ExtendedReal operator*(Scalar s, const ExtendedReal& x) {
    if (!(s >= Scalar(0))) throw std::domain_error("ExtendedReal: scale must be nonnegative");
    if (x.infinite_) return s == Scalar(0) ? ExtendedReal(Scalar(0)) : infinity();
    return ExtendedReal(s * x.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    if (x.infinite_) return os << "inf";
    return os << x.value_;
  }

 private:
  Scalar value_;
  bool infinite_;
};

using XReal = ExtendedReal<double>;

}  // namespace recovery
