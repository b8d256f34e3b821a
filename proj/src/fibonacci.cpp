#include "wavebound/fibonacci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavebound/errors.hpp"

namespace wavebound::fibonacci {

double omega() { return 0.5 * (std::sqrt(5.0) - 1.0); }

std::uint64_t q(int k) {
  if (k < 0) throw ValidationError("q_k needs k >= 0");
  if (k > 90) throw RangeError("q_k overflows 64 bits beyond k = 90");
  std::uint64_t a = 1, b = 1;
  for (int i = 1; i < k; ++i) {
    const std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  return b;
}

std::vector<int> fib_potential(long n_max) {
  if (n_max < 1) throw ValidationError("fib_potential needs n_max >= 1");
  // S_1 = "1", S_2 = "10"; V(1..) is the limit word
  std::vector<int> prev = {1};
  std::vector<int> cur = {1, 0};
  while (static_cast<long>(cur.size()) < n_max) {
    std::vector<int> next = cur;
    next.insert(next.end(), prev.begin(), prev.end());
    prev = std::move(cur);
    cur = std::move(next);
  }
  std::vector<int> v(static_cast<std::size_t>(n_max) + 1);
  v[0] = 0;
  std::copy(cur.begin(), cur.begin() + n_max, v.begin() + 1);
  return v;
}

int potential_at(long n) {
  if (n == 0) return 0;
  if (n == -1) return 1;
  if (n < 0) return potential_at(-n - 1);
  // V(q_k + m) = V(m) for m <= q_k, k >= 3
  while (n > 3) {
    std::uint64_t a = 2, b = 3;  // q_2, q_3
    while (b < static_cast<std::uint64_t>(n)) {
      const std::uint64_t c = a + b;
      a = b;
      b = c;
    }
    // largest q_k strictly below n is a
    n -= static_cast<long>(a);
  }
  return n == 2 ? 0 : 1;
}

double TraceOrbit::max_invariant_residual() const {
  double m = 0.0;
  for (double r : invariant_residual) m = std::max(m, r);
  return m;
}

namespace {

template <class T>
T invariant(const T& x2, const T& x1, const T& x0) {
  return x2 * x2 + x1 * x1 + x0 * x0 - x2 * x1 * x0;
}

ScaledReal to_scaled(const DoubleDouble& v) { return ScaledReal(v.hi) + ScaledReal(v.lo); }

constexpr double kSwitch = 1e150;

}  // namespace

TraceOrbit trace_orbit(double lambda, const DoubleDouble& E, int k_max) {
  if (k_max < 1) throw ValidationError("trace_orbit needs k_max >= 1");
  TraceOrbit o;
  o.lambda = lambda;
  o.energy = E.to_double();
  o.k_max = k_max;
  const std::size_t m = static_cast<std::size_t>(k_max) + 2;
  o.x.resize(m);
  o.dx.resize(m);
  const double inv_ref = 4.0 + lambda * lambda;

  std::vector<DoubleDouble> x(m), dx(m);
  x[0] = DoubleDouble(2.0);
  x[1] = E;
  x[2] = E - DoubleDouble(lambda);
  dx[0] = DoubleDouble(0.0);
  dx[1] = DoubleDouble(1.0);
  dx[2] = DoubleDouble(1.0);
  std::size_t i = 3;
  bool escaped = false;
  for (; i < m; ++i) {
    x[i] = x[i - 1] * x[i - 2] - x[i - 3];
    dx[i] = dx[i - 1] * x[i - 2] + x[i - 1] * dx[i - 2] - dx[i - 3];
    if (std::fabs(x[i].hi) > kSwitch || std::fabs(dx[i].hi) > kSwitch || !std::isfinite(x[i].hi)) {
      escaped = true;
      break;
    }
  }
  const std::size_t dd_end = escaped ? i : m;  // entries [0, dd_end) are double-double
  for (std::size_t j = 0; j < dd_end; ++j) {
    o.x[j] = to_scaled(x[j]);
    o.dx[j] = to_scaled(dx[j]);
  }
  if (escaped) {
    // recompute the entry that crossed the threshold in scaled arithmetic
    for (std::size_t j = dd_end; j < m; ++j) {
      o.x[j] = o.x[j - 1] * o.x[j - 2] - o.x[j - 3];
      o.dx[j] = o.dx[j - 1] * o.x[j - 2] + o.x[j - 1] * o.dx[j - 2] - o.dx[j - 3];
    }
  }
  o.invariant_residual.resize(static_cast<std::size_t>(k_max));
  for (int k = 0; k < k_max; ++k) {
    const std::size_t j = static_cast<std::size_t>(k) + 1;  // x_k
    double r;
    if (j + 1 < dd_end) {
      const DoubleDouble I = invariant(x[j + 1], x[j], x[j - 1]);
      r = std::fabs((I - DoubleDouble(inv_ref)).to_double()) / inv_ref;
    } else {
      const ScaledReal I = invariant(o.x[j + 1], o.x[j], o.x[j - 1]);
      r = std::fabs((I - ScaledReal(inv_ref)).to_double()) / inv_ref;
    }
    o.invariant_residual[static_cast<std::size_t>(k)] = r;
  }
  return o;
}

TraceOrbit trace_orbit(double lambda, double E, int k_max) { return trace_orbit(lambda, DoubleDouble(E), k_max); }

double trace_value(double lambda, double E, int k) {
  if (k < -1) throw ValidationError("trace index k >= -1");
  if (k == -1) return 2.0;
  if (k == 0) return E;
  double x0 = 2.0, x1 = E, x2 = E - lambda;
  for (int j = 2; j <= k; ++j) {
    const double x3 = x2 * x1 - x0;
    x0 = x1;
    x1 = x2;
    x2 = x3;
  }
  return x2;
}

DoubleDouble trace_value(double lambda, const DoubleDouble& E, int k) {
  if (k < -1) throw ValidationError("trace index k >= -1");
  if (k == -1) return DoubleDouble(2.0);
  if (k == 0) return E;
  DoubleDouble x0(2.0), x1 = E, x2 = E - DoubleDouble(lambda);
  for (int j = 2; j <= k; ++j) {
    const DoubleDouble x3 = x2 * x1 - x0;
    x0 = x1;
    x1 = x2;
    x2 = x3;
  }
  return x2;
}

const char* to_string(BandType t) { return t == BandType::A ? "A" : "B"; }

double xi(double lambda) {
  const double t = lambda - 4.0;
  const double disc = t * t - 12.0;
  if (!(lambda > 4.0 + 2.0 * std::sqrt(3.0)) || disc < 0.0)
    throw DomainError("xi(lambda) needs lambda > 4 + 2 sqrt(3)");
  return 0.5 * (t + std::sqrt(disc));
}

Constants constants(double lambda, std::optional<double> c_estimate) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("constants need lambda > 0");
  Constants c;
  c.lambda = lambda;
  const double lw = std::log(1.0 / omega());
  if (lambda > 4.0 + 2.0 * std::sqrt(3.0)) {
    c.xi_defined = true;
    c.xi = xi(lambda);
    c.zeta1 = std::log(c.xi) / (3.0 * lw);
    c.p1 = 6.0 * lw / std::log(c.xi);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.xi = c.zeta1 = c.p1 = nan;
  }
  c.c_from_tree = c_estimate.has_value();
  c.c = c_estimate ? *c_estimate : lambda + 2.0;
  c.a = std::max(c.c, 2.0);
  c.b = 2.0 * c.c + 1.0;
  c.d = c.a * c.b * c.b;
  c.zeta2 = 2.0 * std::log(c.d) * std::log(std::sqrt(5.0)) / lw;
  c.kappa_growth = std::sqrt(17.0) / 4.0;
  c.kappa_window_ratio = std::pow(1.0 / omega(), 5.0);
  c.kappa = std::log(c.kappa_growth) / (5.0 * lw);
  c.kappa_literal = std::log(std::sqrt(17.0) / (20.0 * lw));
  c.alpha = 2.0 * c.kappa / (c.kappa + c.zeta2);
  c.p2 = c.alpha;
  return c;
}

double f_plus(double x, double y, double lambda) {
  return 0.5 * (x * y + std::sqrt(4.0 * lambda * lambda + (4.0 - x * x) * (4.0 - y * y)));
}

double f_minus(double x, double y, double lambda) {
  return 0.5 * (x * y - std::sqrt(4.0 * lambda * lambda + (4.0 - x * x) * (4.0 - y * y)));
}

}  // namespace wavebound::fibonacci
