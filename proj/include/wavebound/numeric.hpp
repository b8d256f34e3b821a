#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace wavebound {

// Real number stored as mantissa * 2^exponent with |mantissa| in [0.5, 1).
// Used where magnitudes run past double range (trace orbits off the spectrum).
class ScaledReal {
 public:
  ScaledReal() = default;
  explicit ScaledReal(double v);
  static ScaledReal from_parts(double mantissa, std::int64_t exponent);

  double mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  bool is_zero() const { return mant_ == 0.0; }
  double to_double() const;
  // natural log of |value|; -inf for zero
  double log_abs() const;

  ScaledReal operator-() const { return from_parts(-mant_, exp_); }
  friend ScaledReal operator+(const ScaledReal& x, const ScaledReal& y);
  friend ScaledReal operator-(const ScaledReal& x, const ScaledReal& y) { return x + (-y); }
  friend ScaledReal operator*(const ScaledReal& x, const ScaledReal& y);
  friend ScaledReal operator/(const ScaledReal& x, const ScaledReal& y);
  friend ScaledReal abs(const ScaledReal& x) { return from_parts(std::fabs(x.mant_), x.exp_); }
  friend bool operator<(const ScaledReal& x, const ScaledReal& y) { return (x - y).mant_ < 0.0; }

 private:
  double mant_ = 0.0;
  std::int64_t exp_ = 0;
};

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  DoubleDouble() = default;
  DoubleDouble(double h) : hi(h), lo(0.0) {}
  DoubleDouble(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
  DoubleDouble operator-() const { return {-hi, -lo}; }
};

DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b);
DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b);
DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b);
DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b);
inline bool operator<(const DoubleDouble& a, const DoubleDouble& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator<=(const DoubleDouble& a, const DoubleDouble& b) { return !(b < a); }
inline bool operator>(const DoubleDouble& a, const DoubleDouble& b) { return b < a; }
inline bool operator>=(const DoubleDouble& a, const DoubleDouble& b) { return !(a < b); }
inline bool operator==(const DoubleDouble& a, const DoubleDouble& b) { return a.hi == b.hi && a.lo == b.lo; }
inline DoubleDouble abs(const DoubleDouble& a) { return a.hi < 0.0 ? -a : a; }
DoubleDouble dd_sqrt(const DoubleDouble& a);

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
// Uniform in [0,1) from 53 high bits.
double uniform01(std::uint64_t bits);

// Largest singular value of [[p, q], [r, s]].
double sigma_max_2x2(double p, double q, double r, double s);

// Runs f(i) for i in [0, n). Each index is handled exactly once and the
// caller writes results into per-index slots, so output does not depend on
// the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);
int default_thread_count();

struct Grid {
  enum class Spacing { linear, log };
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  Spacing spacing = Spacing::linear;

  std::vector<double> values() const;
  // ratio stop/start in decades (log grids)
  double decades() const;
};

Grid linear_grid(double start, double stop, int count);
Grid log_grid(double start, double stop, int count);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wavebound
