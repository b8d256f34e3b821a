#include "wavebound/solutions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wavebound/errors.hpp"
#include "wavebound/numeric.hpp"

namespace wavebound {

namespace {

constexpr double kRescaleAbove = 1e150;

double mag(double x) { return std::fabs(x); }
double mag(const std::complex<double>& x) { return std::max(std::fabs(x.real()), std::fabs(x.imag())); }

template <class T>
BasicSolutionPair<T> solve_impl(const JacobiOperator& op, T z, long n_max) {
  if (n_max < 2) throw ValidationError("solve_pair needs n_max >= 2");
  if (op.side() != Side::half_line) throw DomainError("solve_pair runs on a half-line operator");
  if (op.finite() && n_max > op.last_site()) throw RangeError("n_max exceeds operator size");
  BasicSolutionPair<T> p;
  p.energy = z;
  const std::size_t m = static_cast<std::size_t>(n_max) + 1;
  p.u0.assign(m, T{});
  p.upi2.assign(m, T{});
  std::vector<int> ex(m, 0);
  bool scaled = false;
  p.u0[0] = T(0.0);
  p.u0[1] = T(1.0);
  p.upi2[0] = T(1.0);
  p.upi2[1] = T(0.0);
  // working pair in the current scale
  T f_prev = p.u0[0], f_cur = p.u0[1];
  T g_prev = p.upi2[0], g_cur = p.upi2[1];
  int e = 0;
  double a_prev = op.a(0);
  for (long n = 1; n < n_max; ++n) {
    const double an = op.a(n);
    const T c = z - T(op.b(n));
    const T f_next = (c * f_cur - T(a_prev) * f_prev) / T(an);
    const T g_next = (c * g_cur - T(a_prev) * g_prev) / T(an);
    f_prev = f_cur;
    f_cur = f_next;
    g_prev = g_cur;
    g_cur = g_next;
    const double big = std::max(mag(f_cur), mag(g_cur));
    if (big > kRescaleAbove && std::isfinite(big)) {
      int s = 0;
      std::frexp(big, &s);
      const double k = std::ldexp(1.0, -s);
      f_prev *= k;
      f_cur *= k;
      g_prev *= k;
      g_cur *= k;
      e += s;
      scaled = true;
    }
    const std::size_t i = static_cast<std::size_t>(n) + 1;
    p.u0[i] = f_cur;
    p.upi2[i] = g_cur;
    ex[i] = e;
    a_prev = an;
  }
  if (scaled) p.exponent = std::move(ex);
  return p;
}

template <class T>
double norm_impl(std::span<const T> phi, double L) {
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const double fl = std::floor(L);
  const double frac = L - fl;
  const long n = static_cast<long>(fl);
  const long need = frac > 0.0 ? n + 1 : n;
  if (need >= static_cast<long>(phi.size())) throw RangeError("L = " + std::to_string(L) + " exceeds sequence length");
  double s = 0.0;
  for (long i = 1; i <= n; ++i) s += std::norm(phi[static_cast<std::size_t>(i)]);
  if (frac > 0.0) s += frac * std::norm(phi[static_cast<std::size_t>(n + 1)]);
  return s;
}

template <class T>
T inner_impl(std::span<const T> f, std::span<const T> g, double L) {
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const double fl = std::floor(L);
  const double frac = L - fl;
  const long n = static_cast<long>(fl);
  const long need = frac > 0.0 ? n + 1 : n;
  if (need >= static_cast<long>(std::min(f.size(), g.size()))) throw RangeError("L exceeds sequence length");
  T s{};
  for (long i = 1; i <= n; ++i) s += f[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
  if (frac > 0.0) s += T(frac) * f[static_cast<std::size_t>(n + 1)] * g[static_cast<std::size_t>(n + 1)];
  return s;
}

}  // namespace

template <class T>
T BasicSolutionPair<T>::u0_at(long n) const {
  const T v = u0.at(static_cast<std::size_t>(n));
  return exponent.empty() ? v : v * std::ldexp(1.0, exponent_at(n));
}

template <class T>
T BasicSolutionPair<T>::upi2_at(long n) const {
  const T v = upi2.at(static_cast<std::size_t>(n));
  return exponent.empty() ? v : v * std::ldexp(1.0, exponent_at(n));
}

template <class T>
T BasicSolutionPair<T>::u_theta_at(double theta, long n) const {
  const std::size_t i = static_cast<std::size_t>(n);
  const T v = std::cos(theta) * u0.at(i) + std::sin(theta) * upi2.at(i);
  return exponent.empty() ? v : v * std::ldexp(1.0, exponent_at(n));
}

template struct BasicSolutionPair<double>;
template struct BasicSolutionPair<std::complex<double>>;

SolutionPair solve_pair(const JacobiOperator& op, double E, long n_max) { return solve_impl<double>(op, E, n_max); }

ComplexSolutionPair solve_pair(const JacobiOperator& op, std::complex<double> z, long n_max) {
  return solve_impl<std::complex<double>>(op, z, n_max);
}

double norm_L(std::span<const double> phi, double L) { return norm_impl(phi, L); }
double norm_L(std::span<const std::complex<double>> phi, double L) { return norm_impl(phi, L); }
double inner_L(std::span<const double> f, std::span<const double> g, double L) { return inner_impl(f, g, L); }
std::complex<double> inner_L(std::span<const std::complex<double>> f, std::span<const std::complex<double>> g,
                             double L) {
  return inner_impl(f, g, L);
}

std::complex<double> WholeLineSequence::at(long n) const {
  if (n < first || n > last()) throw RangeError("site " + std::to_string(n) + " outside sequence window");
  return values[static_cast<std::size_t>(n - first)];
}

double norm_L1L2(const WholeLineSequence& phi, double L1, double L2) {
  if (!(L1 >= 0.0) || !(L2 >= 0.0)) throw ValidationError("L1, L2 must be >= 0");
  const long n1 = static_cast<long>(std::floor(L1));
  const long n2 = static_cast<long>(std::floor(L2));
  const double f1 = L1 - static_cast<double>(n1);
  const double f2 = L2 - static_cast<double>(n2);
  double s = 0.0;
  for (long n = -n1; n <= n2; ++n) s += std::norm(phi.at(n));
  if (f1 > 0.0) s += f1 * std::norm(phi.at(-n1 - 1));
  if (f2 > 0.0) s += f2 * std::norm(phi.at(n2 + 1));
  return s;
}

std::vector<double> u0_values(const SolutionPair& p) {
  std::vector<double> v(p.u0.size());
  for (long n = 0; n <= p.n_max(); ++n) v[static_cast<std::size_t>(n)] = p.u0_at(n);
  return v;
}

std::vector<double> upi2_values(const SolutionPair& p) {
  std::vector<double> v(p.upi2.size());
  for (long n = 0; n <= p.n_max(); ++n) v[static_cast<std::size_t>(n)] = p.upi2_at(n);
  return v;
}

std::array<double, 4> TransferChain::matrix(long n) const {
  auto m = matrices.at(static_cast<std::size_t>(n));
  const int e = exponent.empty() ? 0 : exponent[static_cast<std::size_t>(n)];
  if (e != 0)
    for (double& x : m) x = std::ldexp(x, e);
  return m;
}

double TransferChain::det(long n) const {
  const auto m = matrices.at(static_cast<std::size_t>(n));
  const int e = exponent.empty() ? 0 : exponent[static_cast<std::size_t>(n)];
  return std::ldexp(m[0] * m[3] - m[1] * m[2], 2 * e);
}

double TransferChain::cum_sq_norm(double L) const {
  if (!(L >= 0.0)) throw ValidationError("L must be >= 0");
  const double fl = std::floor(L);
  const long n = static_cast<long>(fl);
  const double frac = L - fl;
  if (n > n_max() || (frac > 0.0 && n > n_max())) throw RangeError("L exceeds transfer chain length");
  double s = n >= 2 ? prefix[static_cast<std::size_t>(n - 1)] : 0.0;
  if (frac > 0.0 && n >= 1) s += frac * op_norms[static_cast<std::size_t>(n)] * op_norms[static_cast<std::size_t>(n)];
  return s;
}

double TransferChain::inverse_norm_at_1() const {
  const double d = std::fabs(det(1));
  return op_norms.at(1) / d;
}

TransferChain transfer_chain(const JacobiOperator& op, double E, long n_max) {
  if (n_max < 1) throw ValidationError("transfer_chain needs n_max >= 1");
  const SolutionPair p = solve_pair(op, E, std::max<long>(n_max + 1, 2));
  TransferChain c;
  c.energy = E;
  const std::size_t m = static_cast<std::size_t>(n_max) + 1;
  c.matrices.resize(m);
  c.op_norms.resize(m);
  c.log_op_norms.resize(m);
  c.a_coeff.resize(m);
  c.prefix.assign(m, 0.0);
  std::vector<int> ex(m, 0);
  bool scaled = false;
  for (long n = 0; n <= n_max; ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    const int e0 = p.exponent_at(n);
    const int e1 = p.exponent_at(n + 1);
    const double k = std::ldexp(1.0, e1 - e0);
    std::array<double, 4> mat = {p.u0[i + 1] * k, p.upi2[i + 1] * k, p.u0[i], p.upi2[i]};
    c.matrices[i] = mat;
    ex[i] = e0;
    if (e0 != 0) scaled = true;
    const double s = sigma_max_2x2(mat[0], mat[1], mat[2], mat[3]);
    c.log_op_norms[i] = std::log(s) + e0 * std::log(2.0);
    c.op_norms[i] = std::ldexp(s, e0);
    c.a_coeff[i] = op.a(n);
    if (n >= 1) c.prefix[i] = c.prefix[i - 1] + c.op_norms[i] * c.op_norms[i];
  }
  if (scaled) c.exponent = std::move(ex);
  return c;
}

double landauer_resistance(const TransferChain& chain, long n) {
  if (n < 0 || n > chain.n_max()) throw RangeError("landauer_resistance: n outside chain");
  const auto m = chain.matrix(n);
  const double tr = m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3];
  return 0.5 * (0.5 * tr - 1.0);
}

}  // namespace wavebound
