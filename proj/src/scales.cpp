#include "wavebound/scales.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wavebound/errors.hpp"

namespace wavebound {

const char* to_string(ScaleSide s) { return s == ScaleSide::plus ? "plus" : "minus"; }
const char* to_string(ScaleKind k) { return k == ScaleKind::solution ? "solution" : "transfer"; }

double GramMatrix::max_eig() const {
  const double m = 0.5 * (q00 + q11);
  const double r = std::hypot(0.5 * (q00 - q11), q01);
  return m + r;
}

double GramMatrix::min_eig() const {
  const double mx = max_eig();
  return mx > 0.0 ? det() / mx : 0.0;
}

double GramMatrix::theta_max() const { return 0.5 * std::atan2(2.0 * q01, q00 - q11); }

double GramMatrix::norm_theta(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return c * c * q00 + 2.0 * c * s * q01 + s * s * q11;
}

GramMatrix gram_matrix(const SolutionPair& pair, double L) {
  const std::vector<double> f = u0_values(pair);
  const std::vector<double> g = upi2_values(pair);
  GramMatrix q;
  q.q00 = norm_L(f, L);
  q.q11 = norm_L(g, L);
  q.q01 = inner_L(f, g, L);
  return q;
}

namespace {

// Upper-triangular factor of the weighted 2-column row stack.
struct TwoColumnQR {
  double r11 = 0.0, r12 = 0.0, r22 = 0.0;

  void add(double x, double y) {
    const double rho = std::hypot(r11, x);
    if (rho == 0.0) {
      r22 = std::hypot(r22, y);
      return;
    }
    const double c = r11 / rho, s = x / rho;
    const double n12 = c * r12 + s * y;
    const double y2 = -s * r12 + c * y;
    r11 = rho;
    r12 = n12;
    r22 = std::hypot(r22, y2);
  }
  double det() const {
    const double p = r11 * r22;
    return p * p;
  }
  void scale(double k) {
    r11 *= k;
    r12 *= k;
    r22 *= k;
  }
};

// Streams (u0(n), upi2(n)) with a common power-of-two rescaling.
class PairStream {
 public:
  PairStream(const JacobiOperator& op, double E) : op_(op), E_(E), a_prev_(op.a(0)) {}

  long n() const { return n_; }
  double f() const { return f_; }
  double g() const { return g_; }
  double f_prev() const { return fp_; }
  double g_prev() const { return gp_; }

  // Moves to n+1. Returns the power s by which values were divided (0 if none).
  int advance() {
    if (op_.finite() && n_ + 1 > op_.last_site()) throw ResourceError("solution window reached the end of a finite operator", n_, n_ + 1);
    const double an = op_.a(n_);
    const double c = E_ - op_.b(n_);
    const double fn = (c * f_ - a_prev_ * fp_) / an;
    const double gn = (c * g_ - a_prev_ * gp_) / an;
    fp_ = f_;
    gp_ = g_;
    f_ = fn;
    g_ = gn;
    a_prev_ = an;
    ++n_;
    const double big = std::max(std::fabs(f_), std::fabs(g_));
    if (big > 1e150 && std::isfinite(big)) {
      int s = 0;
      std::frexp(big, &s);
      const double k = std::ldexp(1.0, -s);
      f_ *= k;
      g_ *= k;
      fp_ *= k;
      gp_ *= k;
      return s;
    }
    return 0;
  }

 private:
  const JacobiOperator& op_;
  double E_;
  double a_prev_;
  long n_ = 1;
  double fp_ = 0.0, f_ = 1.0;  // u0(n-1), u0(n)
  double gp_ = 1.0, g_ = 0.0;  // upi2(n-1), upi2(n)
};

template <class F>
double bisect_cell(F&& value_minus_target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    if (m <= lo || m >= hi) break;
    if (value_minus_target(m) >= 0.0)
      hi = m;
    else
      lo = m;
  }
  return 0.5 * (lo + hi);
}

void check_args(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive and finite");
}

JacobiOperator side_operator(const JacobiOperator& op, ScaleSide side) {
  if (side == ScaleSide::plus) return op;
  return op.reflected();
}

}  // namespace

// Same determinant as gram_matrix(pair, L).det(), accumulated by Givens
// rotations so that nearly parallel solutions do not cancel.
double hs_norm(const SolutionPair& pair, double L) {
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const long fl = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(fl);
  const long top = frac > 0.0 ? fl + 1 : fl;
  if (top > pair.n_max()) throw RangeError("L exceeds the solved range");
  int emax = 0;
  for (long n = 1; n <= top; ++n) emax = std::max(emax, pair.exponent_at(n));
  TwoColumnQR qr;
  for (long n = 1; n <= top; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double w = n <= fl ? 1.0 : std::sqrt(frac);
    const int e = pair.exponent_at(n) - emax;
    qr.add(w * std::ldexp(pair.u0[i], e), w * std::ldexp(pair.upi2[i], e));
  }
  return std::ldexp(qr.det(), 4 * emax);
}

LengthScaleResult length_scale(const JacobiOperator& op_in, double E, double epsilon, ScaleSide side,
                               const ScaleOptions& options) {
  check_args(epsilon);
  const JacobiOperator op = side_operator(op_in, side);
  const double target2 = 1.0 / (epsilon * epsilon);
  PairStream st(op, E);
  TwoColumnQR qr;
  qr.add(st.f(), st.g());
  double t2 = target2;  // target in current units
  long N = 1;
  for (;;) {
    if (N >= options.n_cap) throw ResourceError("length_scale exceeded n_cap", N, N + 1);
    const int s = st.advance();
    if (s != 0) {
      const double k = std::ldexp(1.0, -s);
      qr.scale(k);
      t2 = std::ldexp(t2, -4 * s);
    }
    TwoColumnQR next = qr;
    next.add(st.f(), st.g());
    if (next.det() >= t2) {
      const double x = st.f(), y = st.g();
      const double frac = bisect_cell([&](double w) {
        TwoColumnQR c = qr;
        const double r = std::sqrt(w);
        c.add(r * x, r * y);
        return c.det() - t2;
      });
      TwoColumnQR c = qr;
      c.add(std::sqrt(frac) * x, std::sqrt(frac) * y);
      LengthScaleResult res;
      res.energy = E;
      res.epsilon = epsilon;
      res.L = static_cast<double>(N) + frac;
      res.side = side;
      res.kind = ScaleKind::solution;
      res.bracket_lo = N;
      res.bracket_hi = N + 1;
      res.residual = std::fabs(std::sqrt(c.det() / t2) - 1.0);
      return res;
    }
    qr = next;
    ++N;
  }
}

LengthScaleResult length_scale_transfer(const JacobiOperator& op_in, double E, double epsilon, ScaleSide side,
                                        const ScaleOptions& options) {
  check_args(epsilon);
  const JacobiOperator op = side_operator(op_in, side);
  PairStream st(op, E);
  st.advance();  // now u(2), u(1): Phi(1)
  const double phi1 = sigma_max_2x2(st.f(), st.g(), st.f_prev(), st.g_prev());
  const double det1 = std::fabs(st.f() * st.g_prev() - st.g() * st.f_prev());
  const double inv1 = phi1 / det1;
  const double c = 2.0 * inv1;
  double t2 = c * c / (epsilon * epsilon);
  // f(N) = sum_{n=1}^{N-1} ||Phi(n)||^2 ; at N = 1 the sum is empty
  double prefix = 0.0;
  long N = 1;
  double phiN = phi1;  // ||Phi(N)|| in current units
  for (;;) {
    if (N >= options.n_cap) throw ResourceError("length_scale_transfer exceeded n_cap", N, N + 1);
    const double next = prefix + phiN * phiN;
    if (next >= t2) {
      const double frac = bisect_cell([&](double w) { return prefix + w * phiN * phiN - t2; });
      LengthScaleResult res;
      res.energy = E;
      res.epsilon = epsilon;
      res.L = static_cast<double>(N) + frac;
      res.side = side;
      res.kind = ScaleKind::transfer;
      res.bracket_lo = N;
      res.bracket_hi = N + 1;
      res.residual = std::fabs(std::sqrt((prefix + frac * phiN * phiN) / t2) - 1.0);
      return res;
    }
    prefix = next;
    ++N;
    const int s = st.advance();
    if (s != 0) {
      prefix = std::ldexp(prefix, -2 * s);
      t2 = std::ldexp(t2, -2 * s);
    }
    phiN = sigma_max_2x2(st.f(), st.g(), st.f_prev(), st.g_prev());
  }
}

LambdaExponents lambda_exponents(const JacobiOperator& op, double E, const Grid& eps_grid, ScaleSide side,
                                 const ScaleOptions& options) {
  if (eps_grid.spacing != Grid::Spacing::log) throw ValidationError("lambda_exponents needs a log grid");
  if (eps_grid.decades() < 4.0 - 1e-9) throw ValidationError("lambda_exponents needs a grid spanning >= 4 decades");
  LambdaExponents r;
  r.eps = eps_grid.values();
  std::sort(r.eps.begin(), r.eps.end(), std::greater<double>());
  for (double e : r.eps) {
    if (!(e < 1.0)) throw ValidationError("lambda_exponents needs eps < 1");
    const LengthScaleResult ls = length_scale(op, E, e, side, options);
    r.L.push_back(ls.L);
    r.ratio_slopes.push_back(std::log(ls.L) / std::log(1.0 / e));
  }
  const double top = std::log10(r.eps.front());
  const double half = 0.5 * eps_grid.decades();
  r.tail_start = r.eps.size() - 1;
  for (std::size_t i = 0; i < r.eps.size(); ++i) {
    if (top - std::log10(r.eps[i]) >= half - 1e-12) {
      r.tail_start = i;
      break;
    }
  }
  if (r.tail_start + 1 >= r.eps.size() && r.tail_start > 0) --r.tail_start;
  for (std::size_t i = r.tail_start; i + 1 < r.eps.size(); ++i) {
    const double dl = std::log(r.L[i + 1]) - std::log(r.L[i]);
    const double de = std::log(r.eps[i]) - std::log(r.eps[i + 1]);
    r.secant_slopes.push_back(dl / de);
  }
  r.lambda_up = *std::max_element(r.secant_slopes.begin(), r.secant_slopes.end());
  r.lambda_down = *std::min_element(r.secant_slopes.begin(), r.secant_slopes.end());
  bool inc = true, dec = true;
  for (std::size_t i = r.tail_start; i + 1 < r.ratio_slopes.size(); ++i) {
    if (r.ratio_slopes[i + 1] < r.ratio_slopes[i]) inc = false;
    if (r.ratio_slopes[i + 1] > r.ratio_slopes[i]) dec = false;
  }
  r.stable = inc || dec;
  return r;
}

}  // namespace wavebound
