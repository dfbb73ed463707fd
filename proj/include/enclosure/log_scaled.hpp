#pragma once
// Signed log-magnitude arithmetic.  Indicator values behave like
// C(tau) * exp(-tau * L) with tau * L up to ~700, far past double range once
// squared terms enter, so all indicator/integral plumbing carries
// {log|x|, sign} pairs instead of raw doubles.

#include <cmath>
#include <limits>

namespace enclosure {

struct LogScaled {
  double log_abs = -std::numeric_limits<double>::infinity();
  int sign = 0;  // -1, 0, +1

  static LogScaled zero() { return LogScaled{}; }

  static LogScaled from_value(double v) {
    if (v == 0.0 || !std::isfinite(v)) return zero();
    return LogScaled{std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }

  static LogScaled from_log(double log_abs, int sign = 1) {
    if (sign == 0) return zero();
    return LogScaled{log_abs, sign > 0 ? 1 : -1};
  }

  bool is_zero() const { return sign == 0; }

  // May under/overflow; fine for values known to be representable.
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  LogScaled operator-() const { return LogScaled{log_abs, -sign}; }

  friend LogScaled operator*(const LogScaled& a, const LogScaled& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return LogScaled{a.log_abs + b.log_abs, a.sign * b.sign};
  }

  friend LogScaled operator/(const LogScaled& a, const LogScaled& b) {
    if (a.sign == 0) return zero();
    return LogScaled{a.log_abs - b.log_abs, a.sign * b.sign};
  }

  friend LogScaled operator*(double a, const LogScaled& b) {
    return from_value(a) * b;
  }

  friend LogScaled operator+(const LogScaled& a, const LogScaled& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const LogScaled& hi = (a.log_abs >= b.log_abs) ? a : b;
    const LogScaled& lo = (a.log_abs >= b.log_abs) ? b : a;
    const double r = hi.sign * lo.sign * std::exp(lo.log_abs - hi.log_abs);
    const double m = 1.0 + r;  // in [0, 2]
    if (m == 0.0) return zero();
    return LogScaled{hi.log_abs + std::log(std::fabs(m)),
                     m > 0 ? hi.sign : -hi.sign};
  }

  friend LogScaled operator-(const LogScaled& a, const LogScaled& b) {
    return a + (-b);
  }
};

// exp(t) as LogScaled, valid for any t.
inline LogScaled log_exp(double t) { return LogScaled::from_log(t, 1); }

// Running signed sum of LogScaled terms.  Keeps a max-shifted double
// accumulator; deterministic for a fixed insertion order.
class LogAccumulator {
 public:
  void add(const LogScaled& t) {
    if (t.sign == 0) return;
    if (sum_ == 0.0 && !have_shift_) {
      shift_ = t.log_abs;
      have_shift_ = true;
      sum_ = static_cast<double>(t.sign);
      return;
    }
    if (t.log_abs <= shift_) {
      sum_ += t.sign * std::exp(t.log_abs - shift_);
    } else {
      sum_ = sum_ * std::exp(shift_ - t.log_abs) + t.sign;
      shift_ = t.log_abs;
    }
  }

  void add_value(double v) { add(LogScaled::from_value(v)); }

  LogScaled total() const {
    if (!have_shift_ || sum_ == 0.0) return LogScaled::zero();
    return LogScaled{shift_ + std::log(std::fabs(sum_)), sum_ > 0 ? 1 : -1};
  }

 private:
  double shift_ = 0.0;
  double sum_ = 0.0;
  bool have_shift_ = false;
};

}  // namespace enclosure
