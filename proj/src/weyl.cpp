#include "wavebound/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavebound/errors.hpp"
#include "wavebound/scales.hpp"
#include "wavebound/solutions.hpp"

namespace wavebound {

namespace {

void require_upper(cplx z) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("z must lie in the open upper half plane");
}

long initial_depth(cplx z) {
  const double d = std::ceil(8.0 / z.imag());
  return std::max<long>(64, d > 1e18 ? (1L << 40) : static_cast<long>(d));
}

}  // namespace

ResolventEngine::ResolventEngine(const JacobiOperator& op, long depth_cap) : op_(op) {
  if (op.side() == Side::half_line) {
    if (op.first_site() != 1) throw DomainError("half-line operator must start at site 1");
  } else if (op.first_site() != kNoSite && op.first_site() > 0) {
    throw DomainError("whole-line operator must contain sites 0 and 1");
  }
  if (depth_cap < 1) throw ValidationError("depth cap must be positive");
  max_depth_ = op.last_site() == kUnbounded ? depth_cap : std::min(depth_cap, op.last_site());
  if (max_depth_ < 1) throw DomainError("operator has no sites to the right of 0");
  a_.assign(1, op.a(0));
  a2_.assign(1, a_[0] * a_[0]);
  b_.assign(1, 0.0);
}

void ResolventEngine::ensure(long depth) {
  const long have = static_cast<long>(b_.size()) - 1;
  if (depth <= have) return;
  const long target = std::min(max_depth_, std::max(depth, 2 * have));
  const long count = target - have;
  const std::size_t old = b_.size();
  a_.resize(old + static_cast<std::size_t>(count));
  b_.resize(old + static_cast<std::size_t>(count));
  op_.fill(have + 1, count, a_.data() + old, b_.data() + old);
  if (op_.last_site() != kUnbounded && target == op_.last_site()) a_.back() = 0.0;
  a2_.resize(a_.size());
  for (std::size_t i = old; i < a_.size(); ++i) a2_[i] = a_[i] * a_[i];
}

cplx ResolventEngine::g1(cplx z, long depth) {
  const long N = std::min(std::max<long>(depth, 1), max_depth_);
  ensure(N);
  const double zr = z.real(), zi = z.imag();
  double gr = 0.0, gi = 0.0;
  for (long n = N; n >= 1; --n) {
    const double wr = b_[n] - zr - a2_[n] * gr;
    const double wi = -zi - a2_[n] * gi;
    const double d = wr * wr + wi * wi;
    gr = wr / d;
    gi = -wi / d;
  }
  return {gr, gi};
}

cplx ResolventEngine::column(cplx z, long depth, long keep, std::vector<cplx>& x, double& tail_ratio) {
  const long N = std::min(std::max<long>(depth, 1), max_depth_);
  ensure(N);
  keep = std::clamp<long>(keep, 1, N);
  if (static_cast<long>(g_.size()) < keep + 1) g_.resize(static_cast<std::size_t>(keep + 1));
  const double zr = z.real(), zi = z.imag();
  double gr = 0.0, gi = 0.0;
  // running product of a(n-1)^2 |g_n|^2 for n = N..2, in log form
  double prod = 1.0, log_prod = 0.0;
  double log_head[8];
  int heads = 0;
  for (long n = N; n >= 1; --n) {
    const double wr = b_[n] - zr - a2_[n] * gr;
    const double wi = -zi - a2_[n] * gi;
    const double d = wr * wr + wi * wi;
    gr = wr / d;
    gi = -wi / d;
    if (n <= keep) g_[static_cast<std::size_t>(n)] = {gr, gi};
    if (heads < 8) log_head[heads++] = log_prod + std::log(prod);
    if (n >= 2) {
      prod *= a2_[n - 1] / d;
      if (prod < 1e-200 || prod > 1e200) {
        log_prod += std::log(prod);
        prod = 1.0;
      }
    }
  }
  const double log_total = log_prod + std::log(prod);
  tail_ratio = 0.0;
  if (!exact_at(N)) {
    // |x(N - j) / x(1)|^2 = total / head_j
    for (int j = 0; j < heads && N - j >= 2; ++j) tail_ratio = std::max(tail_ratio, std::exp(log_total - log_head[j]));
  }
  x.resize(static_cast<std::size_t>(keep));
  cplx v{gr, gi};
  x[0] = v;
  for (long n = 1; n < keep; ++n) {
    v = -a_[n] * g_[static_cast<std::size_t>(n + 1)] * v;
    x[static_cast<std::size_t>(n)] = v;
  }
  return {gr, gi};
}

ResolventEngine::Adaptive ResolventEngine::column_adaptive(cplx z, long keep, double tail_tol, std::vector<cplx>& x) {
  long depth = std::max<long>(64, keep + 8);
  for (;;) {
    depth = std::min(depth, max_depth_);
    Adaptive r;
    r.g1 = column(z, depth, keep, x, r.tail_ratio);
    r.depth = depth;
    if (exact_at(depth) || r.tail_ratio <= tail_tol) return r;
    if (depth >= max_depth_)
      throw ConvergenceError("resolvent column did not decay within the depth cap", std::abs(r.g1), r.tail_ratio);
    depth *= 2;
  }
}

namespace {

struct HalfValue {
  cplx g;
  long depth = 0;
  double increment = 0.0;
};

// g_1 of the half-line part right of site 0, by depth doubling.
HalfValue half_line_g(ResolventEngine& eng, cplx z, const WeylOptions& options) {
  long N = std::min(initial_depth(z), eng.max_depth());
  cplx prev = eng.g1(z, N);
  if (eng.exact_at(N)) return {prev, N, 0.0};
  const double a0 = std::fabs(eng.op().a(0));
  for (;;) {
    const long next = std::min(2 * N, eng.max_depth());
    if (next == N)
      throw ConvergenceError("m-function depth cap reached", std::abs(a0 * prev), a0 * std::abs(prev));
    const cplx cur = eng.g1(z, next);
    const double inc = a0 * std::abs(cur - prev);
    if (eng.exact_at(next)) return {cur, next, 0.0};
    if (inc < options.tol) return {cur, next, inc};
    if (next >= eng.max_depth()) throw ConvergenceError("m-function depth cap reached", std::abs(a0 * cur), inc);
    prev = cur;
    N = next;
  }
}

}  // namespace

cplx assemble_M(cplx m_plus, cplx m_minus, double a0) { return m_plus * m_minus / (a0 * (m_plus + m_minus)); }

MFunctionValue m_plus(const JacobiOperator& op, cplx z, const WeylOptions& options) {
  require_upper(z);
  if (!(options.tol > 0.0)) throw ValidationError("tolerance must be positive");
  MFunctionValue out;
  out.z = z;
  const double a0 = op.a(0);
  ResolventEngine plus(op, options.depth_cap);
  const HalfValue hp = half_line_g(plus, z, options);
  out.m_plus = a0 * hp.g;
  out.truncation_depth = hp.depth;
  out.est_error = hp.increment;
  if (op.side() == Side::whole_line) {
    out.whole_line = true;
    ResolventEngine minus(op.reflected(), options.depth_cap);
    const HalfValue hm = half_line_g(minus, z, options);
    out.m_minus = -1.0 / (a0 * hm.g);
    out.M = hp.g / (1.0 - a0 * a0 * hp.g * hm.g);
    out.truncation_depth_minus = hm.depth;
    out.est_error = std::max(out.est_error, hm.increment);
  }
  return out;
}

WeylSolution weyl_solution(const JacobiOperator& op, cplx z, long n_max, const WeylOptions& options) {
  require_upper(z);
  if (n_max < 1) throw ValidationError("n_max must be positive");
  if (op.last_site() != kUnbounded && n_max > op.last_site())
    throw RangeError("n_max exceeds the operator's last site");
  ResolventEngine eng(op, options.depth_cap);
  const double a0 = op.a(0);
  WeylSolution out;
  out.z = z;
  std::vector<cplx> x, prev;
  long N = std::min(std::max(initial_depth(z), n_max + 8), eng.max_depth());
  double tail = 0.0;
  eng.column(z, N, n_max, x, tail);
  bool done = eng.exact_at(N);
  while (!done) {
    prev = x;
    const long next = std::min(2 * N, eng.max_depth());
    if (next == N) throw ConvergenceError("Weyl solution depth cap reached", std::abs(x[0]), out.change);
    eng.column(z, next, n_max, x, tail);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      diff += std::norm(x[i] - prev[i]);
      norm += std::norm(x[i]);
    }
    out.change = std::fabs(a0) * std::sqrt(diff);
    N = next;
    done = eng.exact_at(N) || out.change < options.tol * std::max(1.0, std::fabs(a0) * std::sqrt(norm));
    if (!done && N >= eng.max_depth())
      throw ConvergenceError("Weyl solution depth cap reached", std::abs(x[0]), out.change);
  }
  if (eng.exact_at(N)) out.change = 0.0;
  out.depth = N;
  out.u.resize(static_cast<std::size_t>(n_max + 1));
  out.u[0] = 1.0;
  for (long n = 1; n <= n_max; ++n) out.u[static_cast<std::size_t>(n)] = -a0 * x[static_cast<std::size_t>(n - 1)];
  return out;
}

namespace {

// Solves the tridiagonal system with partial pivoting (row interchanges as
// in the LAPACK gtsv scheme). dl, d, du are overwritten.
void solve_tridiagonal(std::vector<cplx>& dl, std::vector<cplx>& d, std::vector<cplx>& du, std::vector<cplx>& rhs) {
  const std::size_t n = d.size();
  auto mag = [](cplx v) { return std::fabs(v.real()) + std::fabs(v.imag()); };
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (dl[k] == cplx{}) {
      if (d[k] == cplx{}) throw ConvergenceError("singular tridiagonal system", 0.0, 0.0);
      continue;
    }
    if (mag(d[k]) >= mag(dl[k])) {
      const cplx mult = dl[k] / d[k];
      d[k + 1] -= mult * du[k];
      rhs[k + 1] -= mult * rhs[k];
      if (k + 2 < n) dl[k] = 0.0;
    } else {
      const cplx mult = d[k] / dl[k];
      d[k] = dl[k];
      const cplx tmp = d[k + 1];
      d[k + 1] = du[k] - mult * tmp;
      if (k + 2 < n) {
        dl[k] = du[k + 1];
        du[k + 1] = -mult * dl[k];
      }
      du[k] = tmp;
      const cplx t = rhs[k];
      rhs[k] = rhs[k + 1];
      rhs[k + 1] = t - mult * rhs[k + 1];
    }
  }
  if (d[n - 1] == cplx{}) throw ConvergenceError("singular tridiagonal system", 0.0, 0.0);
  rhs[n - 1] /= d[n - 1];
  if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
  for (std::size_t j = n - 2; j-- > 0;) rhs[j] = (rhs[j] - du[j] * rhs[j + 1] - dl[j] * rhs[j + 2]) / d[j];
}

// G(1, n) for n in [lo, hi] from the window [1 - W, W] clipped to the operator.
std::vector<cplx> window_row(const JacobiOperator& op, cplx z, long W, long& first) {
  long lo = 1 - W, hi = W;
  if (op.first_site() != kNoSite) lo = std::max(lo, op.first_site());
  if (op.last_site() != kUnbounded) hi = std::min(hi, op.last_site());
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<cplx> d(n), dl(n > 1 ? n - 1 : 1), du(n > 1 ? n - 1 : 1), rhs(n);
  for (long s = lo; s <= hi; ++s) {
    const std::size_t i = static_cast<std::size_t>(s - lo);
    d[i] = op.b(s) - z;
    if (s < hi) {
      dl[i] = op.a(s);
      du[i] = op.a(s);
    }
  }
  rhs[static_cast<std::size_t>(1 - lo)] = 1.0;
  solve_tridiagonal(dl, d, du, rhs);
  first = lo;
  return rhs;
}

}  // namespace

GreenRow green_row(const JacobiOperator& op, cplx z, long L1, long L2, const WeylOptions& options) {
  require_upper(z);
  if (op.side() != Side::whole_line) throw DomainError("green_row needs a whole-line operator");
  if (L1 < 0 || L2 < 0) throw ValidationError("window extents must be nonnegative");
  long lo = -L1 - 1, hi = L2 + 1;
  if (op.first_site() != kNoSite) lo = std::max(lo, op.first_site());
  if (op.last_site() != kUnbounded) hi = std::min(hi, op.last_site());
  const bool finite = op.first_site() != kNoSite && op.last_site() != kUnbounded;
  long W = std::max({initial_depth(z), L1 + 40, L2 + 40});
  GreenRow out;
  out.z = z;
  std::vector<cplx> prev;
  for (;;) {
    long first = 0;
    const std::vector<cplx> row = window_row(op, z, W, first);
    std::vector<cplx> cur(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) cur[static_cast<std::size_t>(n - lo)] = row[static_cast<std::size_t>(n - first)];
    const bool whole = finite && first == op.first_site() && first + static_cast<long>(row.size()) - 1 == op.last_site();
    bool done = whole;
    if (!done && !prev.empty()) {
      double diff = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        diff += std::norm(cur[i] - prev[i]);
        norm += std::norm(cur[i]);
      }
      done = std::sqrt(diff) < options.tol * std::max(1e-300, std::sqrt(norm));
    }
    if (done) {
      out.first = lo;
      out.values = std::move(cur);
      out.window = W;
      break;
    }
    if (W >= options.depth_cap) throw ConvergenceError("Green row window cap reached", std::abs(cur[static_cast<std::size_t>(1 - lo)]), 0.0);
    prev = std::move(cur);
    W *= 2;
  }

  // Two-sided formula: G(1,n) = -m_-/(a0(m_+ + m_-)) u_+(n) for n >= 1 and
  // m_+/(a0(m_+ + m_-)) u_-(n) for n <= 0, with u_-(n) = m_- ~u_+(1 - n).
  const long check_hi = std::min<long>(20, hi), check_lo = std::max<long>(-20, lo);
  const MFunctionValue mv = m_plus(op, z, options);
  const double a0 = op.a(0);
  const cplx mp = mv.m_plus, mm = mv.m_minus;
  double dev = 0.0, scale = 0.0;
  if (check_hi >= 1) {
    const WeylSolution up = weyl_solution(op, z, check_hi, options);
    for (long n = std::max<long>(1, check_lo); n <= check_hi; ++n) {
      const cplx f = -mm / (a0 * (mp + mm)) * up.u[static_cast<std::size_t>(n)];
      dev = std::max(dev, std::abs(f - out.at(n)));
      scale = std::max(scale, std::abs(f));
    }
  }
  if (check_lo <= 0) {
    const WeylSolution um = weyl_solution(op.reflected(), z, 1 - check_lo, options);
    for (long n = check_lo; n <= std::min<long>(0, check_hi); ++n) {
      const cplx f = mp / (a0 * (mp + mm)) * mm * um.u[static_cast<std::size_t>(1 - n)];
      dev = std::max(dev, std::abs(f - out.at(n)));
      scale = std::max(scale, std::abs(f));
    }
  }
  out.formula_deviation = scale > 0.0 ? dev / scale : dev;
  return out;
}

double SpectralAtoms::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double SpectralAtoms::mass(const IntervalUnion& S) const {
  double s = 0.0;
  for (std::size_t j = 0; j < energies.size(); ++j)
    if (S.contains(energies[j])) s += weights[j];
  return s;
}

cplx SpectralAtoms::stieltjes(cplx z) const {
  cplx s = 0.0;
  for (std::size_t j = 0; j < energies.size(); ++j) s += weights[j] / (energies[j] - z);
  return s;
}

namespace {

struct Window {
  long lo = 1;
  long n = 0;
};

Window atoms_window(const JacobiOperator& op, long N) {
  if (N < 1) throw ValidationError("truncation size must be positive");
  Window w;
  if (op.side() == Side::half_line) {
    w.lo = 1;
  } else {
    w.lo = 1 - N / 2;
    if (op.first_site() != kNoSite && w.lo < op.first_site()) w.lo = op.first_site();
  }
  if (op.last_site() != kUnbounded && w.lo + N - 1 > op.last_site())
    throw RangeError("truncation exceeds the operator's sites");
  w.n = N;
  return w;
}

TridiagonalEigen window_eigen(const JacobiOperator& op, const Window& w, long rows) {
  std::vector<double> a(static_cast<std::size_t>(w.n)), b(static_cast<std::size_t>(w.n));
  op.fill(w.lo, w.n, a.data(), b.data());
  std::vector<double> off(a.begin(), a.end() - 1);
  return tridiagonal_eigen(b, off, rows);
}

}  // namespace

SpectralAtoms spectral_measure_atoms(const JacobiOperator& op, long N) {
  const Window w = atoms_window(op, N);
  const long row = 1 - w.lo;
  const TridiagonalEigen eig = window_eigen(op, w, row + 1);
  SpectralAtoms out;
  out.truncation = N;
  out.energies = eig.values;
  out.weights.resize(eig.values.size());
  for (long j = 0; j < eig.n; ++j) {
    const double c = eig.component(row, j);
    out.weights[static_cast<std::size_t>(j)] = c * c;
  }
  return out;
}

SpectralDecomposition spectral_decomposition(const JacobiOperator& op, long N, long rows) {
  if (op.side() != Side::half_line) throw DomainError("spectral decomposition needs a half-line operator");
  const Window w = atoms_window(op, N);
  rows = std::clamp<long>(rows, 1, N);
  const TridiagonalEigen eig = window_eigen(op, w, rows);
  SpectralDecomposition out;
  out.rows = rows;
  out.atoms.truncation = N;
  out.atoms.energies = eig.values;
  out.atoms.weights.resize(eig.values.size());
  for (long j = 0; j < N; ++j) {
    const double c = eig.component(0, j);
    out.atoms.weights[static_cast<std::size_t>(j)] = c * c;
  }
  out.phi.assign(static_cast<std::size_t>(rows * N), 0.0);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < N; ++j) out.phi[static_cast<std::size_t>(i * N + j)] = eig.component(i, j);
  return out;
}

namespace {

double weyl_norm_sq(const JacobiOperator& op, cplx z, double L) {
  const long n_max = static_cast<long>(std::floor(L)) + 1;
  const WeylSolution w = weyl_solution(op, z, n_max);
  return norm_L(std::span<const cplx>(w.u), L);
}

}  // namespace

MainmReport verify_mainm(const JacobiOperator& op, double E, double epsilon, double slack) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (op.side() != Side::half_line) throw DomainError("verify_mainm needs a half-line operator");
  MainmReport r;
  r.energy = E;
  r.epsilon = epsilon;
  r.L = length_scale(op, E, epsilon).L;
  const long n_max = std::max<long>(2, static_cast<long>(std::floor(r.L)) + 2);
  const SolutionPair pair = solve_pair(op, E, n_max);
  const std::vector<double> f = u0_values(pair), g = upi2_values(pair);
  const double n0 = std::sqrt(norm_L(f, r.L)), n1 = std::sqrt(norm_L(g, r.L));
  r.m = m_plus(op, {E, epsilon}).m_plus;
  r.ratio = n0 * std::abs(r.m) / n1;
  r.jlb_ok = r.ratio >= 2.0 - std::sqrt(3.0) - slack && r.ratio <= 2.0 + std::sqrt(3.0) + slack;
  r.betam_lhs = epsilon * weyl_norm_sq(op, {E, epsilon}, r.L);
  r.betam_mid = std::abs(r.m) / (4.0 * epsilon * n0 * n1);
  r.betam_rhs = (2.0 - std::sqrt(3.0)) / 16.0 * r.m.imag();
  r.betam_left_ok = r.betam_lhs >= r.betam_mid * (1.0 - slack);
  r.betam_right_ok = r.betam_mid >= r.betam_rhs * (1.0 - slack);
  r.all_ok = r.jlb_ok && r.betam_left_ok && r.betam_right_ok;
  const double c = (3.0 - 2.0 * std::sqrt(2.0)) / 36.0;
  for (double s : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    BigTwoSample b;
    b.energy_shift = s * epsilon;
    const cplx z{E + b.energy_shift, epsilon};
    b.lhs = epsilon * weyl_norm_sq(op, z, r.L);
    b.rhs = c * m_plus(op, z).m_plus.imag();
    b.ok = b.lhs >= b.rhs * (1.0 - slack);
    r.all_ok = r.all_ok && b.ok;
    r.bigtwo.push_back(b);
  }
  return r;
}

}  // namespace wavebound
