#include "wavebound/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "wavebound/errors.hpp"

namespace wavebound {

ScaledReal::ScaledReal(double v) {
  if (v == 0.0 || !std::isfinite(v)) {
    mant_ = v;
    exp_ = 0;
    return;
  }
  int e = 0;
  mant_ = std::frexp(v, &e);
  exp_ = e;
}

ScaledReal ScaledReal::from_parts(double mantissa, std::int64_t exponent) {
  ScaledReal r(mantissa);
  if (r.mant_ != 0.0) r.exp_ += exponent;
  return r;
}

double ScaledReal::to_double() const {
  if (mant_ == 0.0) return 0.0;
  if (exp_ > 2000) return std::copysign(std::numeric_limits<double>::infinity(), mant_);
  if (exp_ < -2000) return std::copysign(0.0, mant_);
  return std::ldexp(mant_, static_cast<int>(exp_));
}

double ScaledReal::log_abs() const {
  if (mant_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::fabs(mant_)) + static_cast<double>(exp_) * std::log(2.0);
}

ScaledReal operator+(const ScaledReal& x, const ScaledReal& y) {
  if (x.mant_ == 0.0) return y;
  if (y.mant_ == 0.0) return x;
  const std::int64_t d = x.exp_ - y.exp_;
  if (d > 120) return x;
  if (d < -120) return y;
  if (d >= 0) return ScaledReal::from_parts(x.mant_ + std::ldexp(y.mant_, static_cast<int>(-d)), x.exp_);
  return ScaledReal::from_parts(std::ldexp(x.mant_, static_cast<int>(d)) + y.mant_, y.exp_);
}

ScaledReal operator*(const ScaledReal& x, const ScaledReal& y) {
  if (x.mant_ == 0.0 || y.mant_ == 0.0) return ScaledReal();
  return ScaledReal::from_parts(x.mant_ * y.mant_, x.exp_ + y.exp_);
}

ScaledReal operator/(const ScaledReal& x, const ScaledReal& y) {
  if (y.mant_ == 0.0) throw DomainError("ScaledReal division by zero");
  if (x.mant_ == 0.0) return ScaledReal();
  return ScaledReal::from_parts(x.mant_ / y.mant_, x.exp_ - y.exp_);
}

namespace {

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace

DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }

DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a - b * DoubleDouble(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DoubleDouble(q2);
  const double q3 = r.hi / b.hi;
  DoubleDouble q = quick_two_sum(q1, q2);
  return q + DoubleDouble(q3);
}

DoubleDouble dd_sqrt(const DoubleDouble& a) {
  if (a.hi <= 0.0) return DoubleDouble(0.0);
  const double x = std::sqrt(a.hi);
  const DoubleDouble xx = two_prod(x, x);
  const double corr = ((a - xx).hi) / (2.0 * x);
  return quick_two_sum(x, corr);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double sigma_max_2x2(double p, double q, double r, double s) {
  return 0.5 * (std::hypot(p + s, q - r) + std::hypot(p - s, q + r));
}

int default_thread_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> Grid::values() const {
  if (count < 1) throw ValidationError("grid count must be positive");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = start;
    return v;
  }
  if (spacing == Spacing::log) {
    if (!(start > 0.0) || !(stop > 0.0)) throw ValidationError("log grid needs positive endpoints");
    const double ratio = stop / start;
    for (int i = 0; i < count; ++i) v[i] = start * std::pow(ratio, static_cast<double>(i) / (count - 1));
    v.front() = start;
    v.back() = stop;
  } else {
    for (int i = 0; i < count; ++i) v[i] = start + (stop - start) * i / (count - 1);
  }
  return v;
}

double Grid::decades() const {
  if (!(start > 0.0) || !(stop > 0.0)) return 0.0;
  return std::fabs(std::log10(stop / start));
}

Grid linear_grid(double start, double stop, int count) { return {start, stop, count, Grid::Spacing::linear}; }
Grid log_grid(double start, double stop, int count) { return {start, stop, count, Grid::Spacing::log}; }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

}  // namespace wavebound
