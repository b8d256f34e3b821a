// One PASS/FAIL line per acceptance criterion. Exit status 1 if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/multidim.hpp"
#include "wavebound/scales.hpp"
#include "wavebound/solutions.hpp"
#include "wavebound/weyl.hpp"

using namespace wavebound;
namespace fib = wavebound::fibonacci;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

JacobiOperator sized(OperatorSpec s, long n) {
  s.size = n;
  return build_operator(s);
}

Outcome parseval_and_total(bool totals) {
  const std::vector<JacobiOperator> ops = {sized(free_spec(), 512), sized(random_spec(2.0, 7), 512)};
  const std::vector<double> Ls = {4.0, 16.0, 64.0};
  double worst = 0.0, worst_total = 0.0;
  for (const JacobiOperator& op : ops)
    for (double T : {1.0, 5.0, 20.0}) {
      const TimeAveragedProfile a = profile_resolvent(op, T, Ls);
      worst_total = std::max(worst_total, std::fabs(a.total - 1.0));
      if (totals) continue;
      const TimeAveragedProfile b = profile_propagate(op, T, Ls);
      for (std::size_t k = 0; k < Ls.size(); ++k) worst = std::max(worst, std::fabs(a.values[k] - b.values[k]));
    }
  if (totals) return {worst_total < 1e-4, fmt("max |total - 1| = %.3e over 6 (operator, T)", worst_total)};
  return {worst < 1e-3, fmt("max |resolvent - propagation| = %.3e over 18 points", worst)};
}

Outcome mainm() {
  const std::vector<JacobiOperator> ops = {build_operator(free_spec()), build_operator(random_spec(2.0, 11)),
                                           build_operator(fibonacci_spec(5.0)), build_operator(fibonacci_spec(10.0))};
  const std::vector<double> eps = log_grid(1e-1, 1e-3, 5).values();
  long samples = 0, violations = 0;
  double rmin = INFINITY, rmax = 0.0;
  for (const JacobiOperator& op : ops) {
    const auto [lo, hi] = op.spectral_bounds();
    const double w = hi - lo;
    for (double E : linear_grid(lo + 0.1 * w, hi - 0.1 * w, 15).values())
      for (double e : eps) {
        const MainmReport m = verify_mainm(op, E, e);
        ++samples;
        violations += m.all_ok ? 0 : 1;
        rmin = std::min(rmin, m.ratio);
        rmax = std::max(rmax, m.ratio);
      }
  }
  return {samples >= 300 && violations == 0,
          fmt("%ld samples, %ld violations, ratio in [%.4f, %.4f]", samples, violations, rmin, rmax)};
}

// Brute-force sum of w_n w_m k(n,m)^2 over every ordered pair in the window,
// k(n,m) = u0(n)upi2(m) - upi2(n)u0(m). Column m runs forward from
// k(m,m) = 0, k(m+1,m) = a(0)/a(m); k(m,n)^2 = k(n,m)^2 covers the other half.
long double kernel_double_sum(const JacobiOperator& op, double E, double L) {
  const long fl = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(fl);
  const long top = frac > 0.0 ? fl + 1 : fl;
  auto w = [&](long n) { return n <= fl ? 1.0L : static_cast<long double>(frac); };
  std::vector<long double> K(static_cast<std::size_t>(top * top), 0.0L);
  auto at = [&](long n, long m) -> long double& { return K[static_cast<std::size_t>((n - 1) * top + (m - 1))]; };
  for (long m = 1; m <= top; ++m) {
    long double km = 0.0L, k = static_cast<long double>(op.a(0)) / op.a(m);
    for (long n = m + 1; n <= top; ++n) {
      at(n, m) = k;
      at(m, n) = -k;
      const long double next = ((E - op.b(n)) * k - op.a(n - 1) * km) / op.a(n);
      km = k;
      k = next;
    }
  }
  long double s = 0.0L;
  for (long n = 1; n <= top; ++n)
    for (long m = 1; m <= top; ++m) s += w(n) * w(m) * at(n, m) * at(n, m);
  return s;
}

Outcome hs_identity() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uE(-1.9, 1.9), uL(1.0, 40.0);
  double worst = 0.0;
  int non_integer = 0;
  for (int i = 0; i < 200; ++i) {
    OperatorSpec s = i % 3 == 0   ? free_spec()
                     : i % 3 == 1 ? random_spec(2.0, static_cast<std::uint64_t>(1000 + i))
                                  : fibonacci_spec(0.3);
    const JacobiOperator op = build_operator(s);
    const double E = uE(rng);
    const double L = i % 10 == 0 ? std::floor(uL(rng)) : uL(rng);
    non_integer += L != std::floor(L) ? 1 : 0;
    const double det = hs_norm(solve_pair(op, E, 45), L);
    // the ordered double sum counts each unordered pair twice
    const double brute = static_cast<double>(kernel_double_sum(op, E, L) / 2.0L);
    if (brute > 0.0) worst = std::max(worst, std::fabs(det - brute) / brute);
    else worst = std::max(worst, std::fabs(det));
  }
  return {worst < 1e-11 && non_integer > 0,
          fmt("200 instances (%d non-integer L), max relative error %.3e", non_integer, worst)};
}

Outcome trans() {
  const std::vector<JacobiOperator> ops = {build_operator(free_spec()), build_operator(random_spec(1.0, 3)),
                                           build_operator(random_spec(3.0, 5)), build_operator(fibonacci_spec(5.0)),
                                           build_operator(fibonacci_spec(10.0))};
  const std::vector<double> eps = log_grid(1e-1, 1e-2, 5).values();
  long points = 0, checked = 0, violations = 0;
  for (const JacobiOperator& op : ops) {
    const auto [lo, hi] = op.spectral_bounds();
    const double w = hi - lo;
    for (double E : linear_grid(lo + 0.05 * w, hi - 0.05 * w, 20).values())
      for (double e : eps) {
        const double a = length_scale(op, E, e).L;
        const double b = length_scale_transfer(op, E, e).L;
        ++points;
        if (a >= 2.0) {
          ++checked;
          violations += b >= a ? 0 : 1;
        }
      }
  }
  return {points >= 500 && violations == 0,
          fmt("%ld points, %ld with L >= 2, %ld violations", points, checked, violations)};
}

Outcome trace_invariant() {
  double worst = 0.0;
  int count = 0;
  for (double lambda : {5.0, 8.0, 10.0, 20.0})
    for (const DoubleDouble& E : fib::random_deep_energies(lambda, 25, 100, 17)) {
      worst = std::max(worst, fib::trace_orbit(lambda, E, 25).max_invariant_residual());
      ++count;
    }
  return {worst < 1e-9 && count == 400, fmt("%d orbits to k = 25, max relative residual %.3e", count, worst)};
}

bool overlaps(const fib::BandInterval& x, const fib::BandInterval& y) {
  return !(x.right < y.left || y.right < x.left);
}

Outcome band_tree() {
  const int K = 12;
  fib::BandTree t;
  try {
    t = fib::band_tree(10.0, K);
  } catch (const Error& e) {
    return {false, std::string("band tree construction failed: ") + e.what()};
  }
  long errors = 0;
  std::string counts;
  for (int k = 0; k <= K; ++k) {
    counts += (k ? "," : "") + std::to_string(t.level(k).size());
    if (t.level(k).size() != fib::q(k)) ++errors;
  }
  // every band with both lower levels built obeys the A/B child rules
  for (int k = 0; k + 2 <= K; ++k)
    for (int id : t.level(k)) {
      const fib::BandInterval& p = t.bands[static_cast<std::size_t>(id)];
      std::vector<int> a1, b1, a2, b2;
      for (int lvl : {k + 1, k + 2})
        for (int cid : t.level(lvl)) {
          const fib::BandInterval& c = t.bands[static_cast<std::size_t>(cid)];
          if (!overlaps(p, c)) continue;
          if (c.left < p.left || p.right < c.right) ++errors;  // must be nested
          auto& bucket = lvl == k + 1 ? (c.type == fib::BandType::A ? a1 : b1) : (c.type == fib::BandType::A ? a2 : b2);
          bucket.push_back(cid);
        }
      if (p.type == fib::BandType::A) {
        if (!(a1.empty() && b1.empty() && a2.empty() && b2.size() == 1)) ++errors;
      } else {
        if (!(a1.size() == 1 && b1.empty() && a2.empty() && b2.size() == 2)) {
          ++errors;
          continue;
        }
        const fib::BandInterval& mid = t.bands[static_cast<std::size_t>(a1[0])];
        const fib::BandInterval& u = t.bands[static_cast<std::size_t>(b2[0])];
        const fib::BandInterval& v = t.bands[static_cast<std::size_t>(b2[1])];
        const bool around = (u.right < mid.left && mid.right < v.left) || (v.right < mid.left && mid.right < u.left);
        if (!around) ++errors;
      }
    }
  return {errors == 0, fmt("level totals %s, %ld structural errors", counts.c_str(), errors)};
}

Outcome trace_bound() {
  const fib::TraceBoundReport r = fib::verify_trace_derivative_bound(10.0, 12, 1);
  const double xi10 = 0.5 * (6.0 + std::sqrt(24.0));
  double min_excess = INFINITY, min_step = INFINITY;
  long checked = 0, exempt = 0;
  for (const auto& s : r.samples) {
    if (s.exempt) {
      ++exempt;
      continue;
    }
    ++checked;
    min_excess = std::min(min_excess, s.dx_abs / std::pow(xi10, s.k / 2.0));
  }
  for (const auto& s : r.steps) min_step = std::min(min_step, s.ratio);
  const bool ok = r.all_ok && r.violations == 0 && min_excess >= 1.0 && min_step >= xi10 && !r.steps.empty();
  return {ok, fmt("%ld band centers (%ld at k = 1 exempt), min |x'_k|/xi^{k/2} = %.3f, min step ratio %.3f vs xi %.4f",
                  checked, exempt, min_excess, min_step, xi10)};
}

Outcome derivative_cross_check() {
  const double lambda = 10.0;
  const fib::BandTree t = fib::band_tree(lambda, 10);
  const std::vector<int>& lvl = t.level(10);
  double worst = 0.0;
  int energies = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t pick = static_cast<std::size_t>(i) * lvl.size() / 50;
    const double E = t.bands[static_cast<std::size_t>(lvl[pick])].center.to_double();
    const fib::TraceOrbit o = fib::trace_orbit(lambda, E, 10);
    for (int k = 1; k <= 10; ++k) {
      const double a = o.dx_at(k).to_double();
      const double b = fib::trace_derivative_from_solutions(lambda, E, k);
      worst = std::max(worst, std::fabs(a - b) / std::max(std::fabs(a), 1e-300));
    }
    ++energies;
  }
  return {worst < 1e-8, fmt("%d level-10 band centers, k <= 10, max relative error %.3e", energies, worst)};
}

Outcome unifbeh() {
  const fib::CorsqReport c = fib::verify_corsq(10000, 99);
  const fib::KeyitReport k =
      fib::verify_keyit(10.0, 8, {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0}, 8, 12);
  double kmin = INFINITY;
  for (const auto& s : k.samples) kmin = std::min(kmin, s.ratio);
  const double thr = std::sqrt(17.0) / 4.0 - 1e-6;
  const bool ok = c.ok && c.trials == 10000 && c.violations == 0 && k.all_ok && !k.samples.empty() && kmin >= thr;
  return {ok, fmt("corsq %d trials, %d violations, min lhs/rhs %.3f; keyit %zu samples, min ratio %.4f (threshold %.4f)",
                  c.trials, c.violations, c.min_margin, k.samples.size(), kmin, thr)};
}

Outcome lanczos() {
  long worst_excess = -1000;
  double worst_mom = 0.0, a1 = 0.0, b1 = 1.0;
  for (int which = 0; which < 2; ++which) {
    const PotentialFn v = which == 0 ? free_potential() : random_potential(2.0, 4);
    const Lattice lat = make_lattice(2, 43, v);
    const LanczosBasis basis = lanczos_tridiag(lat, 40);
    // basis_support_radii[i] is the radius of rho_{i+1}
    for (std::size_t i = 0; i < basis.basis_support_radii.size(); ++i)
      worst_excess = std::max(worst_excess, basis.basis_support_radii[i] - static_cast<long>(i + 2));
    const std::vector<double> m1 = lattice_moments(lat, 20);
    const std::vector<double> m2 = jacobi_moments(basis.jacobi, static_cast<long>(basis.b.size()), 20);
    for (std::size_t n = 0; n < m1.size(); ++n)
      worst_mom = std::max(worst_mom, std::fabs(m1[n] - m2[n]) / std::max(1.0, std::fabs(m1[n])));
    if (which == 0) {
      a1 = basis.a.at(0);
      b1 = basis.b.at(0);
    }
  }
  const bool ok = worst_excess <= 0 && worst_mom < 1e-8 && std::fabs(a1 - 2.0) < 1e-12 && std::fabs(b1) < 1e-12;
  return {ok, fmt("max radius(rho_n) - (n+1) = %ld, moment relative error %.3e, free a(1) = %.15f, b(1) = %.3e",
                  worst_excess, worst_mom, a1, b1)};
}

Outcome hld() {
  const JacobiOperator op = build_operator(fibonacci_spec(10.0));
  HldOptions o;
  o.atoms = 2000;
  const HldSweep s = hld_sweep(op, {1e2, 1e3, 1e4}, {0.25, 0.5, 0.75}, o);
  std::string per_T;
  for (double m : s.min_ratio_per_T) per_T += fmt("%s%.3e", per_T.empty() ? "" : ", ", m);
  const bool ok = s.positive && s.min_ratio > 0.0 && s.stability < 10.0;
  return {ok, fmt("%zu reports, per-T minimum ratio [%s], stability (max/min) %.3f", s.reports.size(),
                  per_T.c_str(), s.stability)};
}

Outcome beta() {
  const std::vector<double> Ts = log_grid(10.0, 1e4, 7).values();
  const BetaExponents f = beta_exponents(build_operator(free_spec()), Ts, 0.1);
  const BetaExponents g = beta_exponents(build_operator(fibonacci_spec(10.0)), Ts, 0.1);
  const bool free_ok = f.beta_down > 0.9 && f.beta_up < 1.1;
  const bool fib_ok = g.beta_down > 0.05 && g.beta_up < 0.95;
  return {free_ok && fib_ok,
          fmt("free beta in [%.4f, %.4f] (%s); fibonacci lambda=10 beta in [%.3e, %.3e] over T 10..1e4 (%s)",
              f.beta_down, f.beta_up, free_ok ? "ok" : "outside (0.9, 1.1)", g.beta_down, g.beta_up,
              fib_ok ? "ok" : "outside (0.05, 0.95)")};
}

Outcome constants_scaling() {
  const fib::Constants c8 = fib::constants(8.0);
  const double target = 6.0 * std::log(1.0 / fib::omega());
  const double p1 = fib::constants(1e6).p1 * std::log(1e6);
  const double a4 = fib::constants(1e4).alpha * std::log(1e4);
  const double a6 = fib::constants(1e6).alpha * std::log(1e6);
  const bool ok = fib::xi(8.0) == 3.0 && c8.xi == 3.0 && std::fabs(p1 / target - 1.0) < 0.05 && a4 > 0.0 &&
                  a6 > 0.0 && std::fabs(a4 / a6 - 1.0) < 0.1;
  return {ok, fmt("xi(8) = %.17g, p1 log(lambda) at 1e6 = %.4f vs %.4f, alpha log(lambda) %.4f (1e4) vs %.4f (1e6)",
                  fib::xi(8.0), p1, target, a4, a6)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"parseval", [] { return parseval_and_total(false); }},
      {"normalization", [] { return parseval_and_total(true); }},
      {"mainm", mainm},
      {"hs-norm", hs_identity},
      {"trans", trans},
      {"trace-invariant", trace_invariant},
      {"band-tree", band_tree},
      {"trace-derivative-bound", trace_bound},
      {"derivative-cross-check", derivative_cross_check},
      {"corsq-keyit", unifbeh},
      {"lanczos", lanczos},
      {"hld-constant", hld},
      {"beta-intermediate", beta},
      {"constants-scaling", constants_scaling},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += r.pass ? 0 : 1;
    std::printf("criterion %2zu %-24s %s  %s  [%.1f s]\n", i + 1, criteria[i].first, r.pass ? "PASS" : "FAIL",
                r.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed ? 1 : 0;
}
