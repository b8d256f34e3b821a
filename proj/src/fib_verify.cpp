#include <algorithm>
#include <cmath>
#include <random>

#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/solutions.hpp"

namespace wavebound::fibonacci {

namespace {

JacobiOperator fib_operator(double lambda) { return build_operator(fibonacci_spec(lambda)); }

std::vector<double> sample_energies(const BandInterval& b, int samples_per_band) {
  std::vector<double> e = {b.center.to_double()};
  const int m = samples_per_band - 1;
  const double l = b.left.to_double();
  const double r = b.right.to_double();
  for (int j = 1; j <= m; ++j) e.push_back(l + (r - l) * (2.0 * j - 1.0) / (2.0 * m));
  return e;
}

double abs_dx(const TraceOrbit& o, int k) { return std::fabs(o.dx_at(k).to_double()); }

}  // namespace

double estimate_trace_sup(const BandTree& tree) {
  double c = 0.0;
  for (const BandInterval& b : tree.bands) {
    for (const DoubleDouble& e : {b.left, b.center, b.right}) {
      const TraceOrbit o = trace_orbit(tree.lambda, e, std::max(1, b.level));
      for (int k = -1; k <= b.level; ++k) c = std::max(c, std::fabs(o.x_at(k).to_double()));
    }
  }
  return c;
}

double trace_derivative_from_solutions(double lambda, double E, int k) {
  if (k < 1) throw ValidationError("solution-sum derivative needs k >= 1");
  const long N = static_cast<long>(q(k));
  // the sum cancels heavily, so the solutions and the sum use long double
  const std::vector<int> v = fib_potential(N + 1);
  std::vector<long double> f(static_cast<std::size_t>(N) + 2), g(f.size());
  f[0] = 0.0L;
  f[1] = 1.0L;
  g[0] = 1.0L;
  g[1] = 0.0L;
  for (long n = 1; n <= N; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const long double c = static_cast<long double>(E) - static_cast<long double>(lambda) * v[i];
    f[i + 1] = c * f[i] - f[i - 1];
    g[i + 1] = c * g[i] - g[i - 1];
  }
  const auto Ni = static_cast<std::size_t>(N);
  long double s = 0.0L;
  for (std::size_t i = 1; i <= Ni; ++i)
    s += -g[Ni + 1] * f[i] * f[i] + f[Ni] * g[i] * g[i] + (f[Ni + 1] - g[Ni]) * f[i] * g[i];
  return static_cast<double>(s);
}

TraceBoundReport verify_trace_derivative_bound(double lambda, int k_max, int samples_per_band) {
  if (samples_per_band < 1) throw ValidationError("samples_per_band >= 1");
  TraceBoundReport rep;
  rep.lambda = lambda;
  rep.xi = xi(lambda);
  rep.k_max = k_max;
  const BandTree tree = band_tree(lambda, k_max);
  const JacobiOperator op = fib_operator(lambda);
  for (const BandInterval& b : tree.bands) {
    const int k = b.level;
    for (double E : sample_energies(b, samples_per_band)) {
      const TraceOrbit o = trace_orbit(lambda, E, std::max(1, k));
      TraceBoundSample s;
      s.k = k;
      s.energy = E;
      s.dx_abs = abs_dx(o, k);
      s.bound = std::pow(rep.xi, 0.5 * k);
      s.exempt = (k == 1);
      s.ok = s.exempt || s.dx_abs >= s.bound;
      rep.samples.push_back(s);

      PhiSample ph;
      ph.k = k;
      ph.energy = E;
      const long n = static_cast<long>(q(k));
      const TransferChain ch = transfer_chain(op, E, n + 1);
      ph.phi_cubed = std::pow(ch.cum_sq_norm(static_cast<double>(n + 1)), 1.5);
      ph.dx_abs = s.dx_abs;
      ph.lower_ok = ph.phi_cubed >= 0.25 * s.bound;
      ph.upper_ok = ph.dx_abs <= 4.0 * ph.phi_cubed * (1.0 + 1e-12);
      rep.phi.push_back(ph);

      if (b.parent >= 0) {
        const BandInterval& pb = tree.bands[static_cast<std::size_t>(b.parent)];
        StepRatioSample st;
        st.parent_band = b.parent;
        st.child_band = static_cast<int>(&b - tree.bands.data());
        st.k_parent = pb.level;
        st.k_child = k;
        st.energy = E;
        const double denom = abs_dx(o, pb.level);
        st.ratio = abs_dx(o, k) / denom;
        st.ok = st.ratio >= rep.xi;
        rep.steps.push_back(st);
      }
    }
  }
  for (const auto& s : rep.samples) rep.violations += s.ok ? 0 : 1;
  for (const auto& s : rep.steps) rep.violations += s.ok ? 0 : 1;
  for (const auto& s : rep.phi) rep.violations += (s.lower_ok && s.upper_ok) ? 0 : 1;
  rep.all_ok = rep.violations == 0;
  return rep;
}

FBoundReport verify_f_bound(double lambda, int grid) {
  if (grid < 2) throw ValidationError("grid >= 2");
  FBoundReport r;
  r.lambda = lambda;
  r.grid = grid;
  double m = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -2.0 + 4.0 * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double y = -2.0 + 4.0 * j / (grid - 1);
      const double root = std::sqrt(4.0 * lambda * lambda + (4.0 - x * x) * (4.0 - y * y));
      // d/dx of (xy +- root)/2 and the symmetric d/dy
      const double gx = x * (4.0 - y * y) / root;
      const double gy = y * (4.0 - x * x) / root;
      for (double sgn : {1.0, -1.0}) {
        m = std::max(m, std::fabs(0.5 * (y - sgn * gx)));
        m = std::max(m, std::fabs(0.5 * (x - sgn * gy)));
      }
    }
  }
  r.max_partial = m;
  r.ok = m <= 1.0 + 1e-12;
  return r;
}

KeyitReport verify_keyit(double lambda, int level, const std::vector<double>& thetas, int n_lo, int n_hi) {
  if (n_lo < 0 || n_hi < n_lo) throw ValidationError("keyit window");
  KeyitReport rep;
  rep.lambda = lambda;
  rep.level = level;
  rep.threshold = std::sqrt(17.0) / 4.0 - 1e-6;
  const BandTree tree = band_tree(lambda, level);
  const JacobiOperator op = fib_operator(lambda);
  const long n_top = static_cast<long>(q(n_hi + 5));
  for (int id : tree.level(level)) {
    const double E = tree.bands[static_cast<std::size_t>(id)].center.to_double();
    const SolutionPair p = solve_pair(op, E, n_top + 1);
    for (double th : thetas) {
      std::vector<double> u(static_cast<std::size_t>(n_top) + 2);
      for (long n = 0; n <= n_top + 1; ++n) u[static_cast<std::size_t>(n)] = p.u_theta_at(th, n);
      for (int n = n_lo; n <= n_hi; ++n) {
        const double lo = norm_L(u, static_cast<double>(q(n)));
        const double hi = norm_L(u, static_cast<double>(q(n + 5)));
        KeyitSample s;
        s.energy = E;
        s.theta = th;
        s.n = n;
        s.ratio = std::sqrt(hi / lo);
        s.ok = s.ratio >= rep.threshold;
        rep.all_ok = rep.all_ok && s.ok;
        rep.samples.push_back(s);
      }
    }
  }
  return rep;
}

std::pair<double, double> corsq_sides(const double B[4], const double psi[2]) {
  const double b1 = B[0] * psi[0] + B[1] * psi[1];
  const double b2 = B[2] * psi[0] + B[3] * psi[1];
  const double c1 = B[0] * b1 + B[1] * b2;
  const double c2 = B[2] * b1 + B[3] * b2;
  const double lhs = b1 * b1 + b2 * b2 + c1 * c1 + c2 * c2;
  const double tr = B[0] + B[3];
  const double rhs = (psi[0] * psi[0] + psi[1] * psi[1]) / (4.0 * std::max(1.0, tr * tr));
  return {lhs, rhs};
}

CorsqReport verify_corsq(int trials, std::uint64_t seed) {
  CorsqReport r;
  r.trials = trials;
  r.min_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int t = 0; t < trials; ++t) {
    double B[4];
    if (t % 2 == 0) {
      // rotation * diag(s, 1/s) * rotation, random sign
      const double s = std::exp(2.0 * nd(gen));
      const double a1 = ang(gen), a2 = ang(gen);
      const double c1 = std::cos(a1), s1 = std::sin(a1), c2 = std::cos(a2), s2 = std::sin(a2);
      const double D[4] = {s * c2, -s * s2, s2 / s, c2 / s};
      B[0] = c1 * D[0] - s1 * D[2];
      B[1] = c1 * D[1] - s1 * D[3];
      B[2] = s1 * D[0] + c1 * D[2];
      B[3] = s1 * D[1] + c1 * D[3];
      if (gen() & 1u)
        for (double& x : B) x = -x;
    } else {
      double a = nd(gen);
      if (std::fabs(a) < 1e-3) a = 1e-3;
      const double b = 3.0 * nd(gen), c = 3.0 * nd(gen);
      B[0] = a;
      B[1] = b;
      B[2] = c;
      B[3] = (1.0 + b * c) / a;
    }
    const double psi[2] = {nd(gen), nd(gen)};
    const auto [lhs, rhs] = corsq_sides(B, psi);
    const double margin = lhs / rhs;
    r.min_margin = std::min(r.min_margin, margin);
    if (!(lhs > rhs)) ++r.violations;
  }
  r.ok = r.violations == 0;
  return r;
}

EnvelopeReport iochum_testard_envelope(double lambda, long n_max, int energies) {
  if (n_max < 2) throw ValidationError("envelope needs n_max >= 2");
  EnvelopeReport rep;
  rep.lambda = lambda;
  rep.n_max = n_max;
  int level = 0;
  while (static_cast<int>(q(level)) < energies) ++level;
  const BandTree tree = band_tree(lambda, level);
  rep.c_estimate = estimate_trace_sup(tree);
  const Constants cs = constants(lambda, rep.c_estimate);
  rep.d = cs.d;
  rep.zeta2 = cs.zeta2;
  const double expo = std::log(cs.d) * std::log(std::sqrt(5.0)) / std::log(1.0 / omega());
  const JacobiOperator op = fib_operator(lambda);
  const auto& ids = tree.level(level);
  double worst_fit = 0.0;
  for (int i = 0; i < energies && i < static_cast<int>(ids.size()); ++i) {
    const double E = tree.bands[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])].center.to_double();
    const TransferChain ch = transfer_chain(op, E, n_max);
    rep.ratio_at_1 = std::max(rep.ratio_at_1, ch.op_norms[1]);
    for (long n = 2; n <= n_max; ++n) {
      const double log_env = expo * std::log(static_cast<double>(n));
      rep.max_ratio = std::max(rep.max_ratio, std::exp(ch.log_op_norms[static_cast<std::size_t>(n)] - log_env));
    }
    std::vector<double> lx, ly;
    for (double L = 10.0; L <= static_cast<double>(n_max); L *= 1.5) {
      lx.push_back(std::log(L));
      ly.push_back(std::log(ch.cum_sq_norm(L)));
    }
    if (lx.size() >= 2) worst_fit = std::max(worst_fit, fit_slope(lx, ly));
  }
  rep.fitted_exponent = worst_fit;
  rep.ok = rep.max_ratio <= 1.0 + 1e-9 && rep.fitted_exponent <= rep.zeta2;
  return rep;
}

}  // namespace wavebound::fibonacci
