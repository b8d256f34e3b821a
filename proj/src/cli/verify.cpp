#include <algorithm>
#include <cmath>
#include <numbers>

#include "cli/commands.hpp"
#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/multidim.hpp"
#include "wavebound/scales.hpp"
#include "wavebound/weyl.hpp"

namespace wavebound::cli {

using nlohmann::json;

namespace {

Cell flag(bool b) { return static_cast<long>(b ? 1 : 0); }

std::vector<double> interior_energies(const JacobiOperator& op, const std::optional<Grid>& g) {
  if (g) return g->values();
  const auto [lo, hi] = op.spectral_bounds();
  const double w = hi - lo;
  return linear_grid(lo + 0.1 * w, hi - 0.1 * w, 7).values();
}

CommandResult suite_mainm(const RunConfig& c) {
  const JacobiOperator op = build_operator(operator_spec(c.op));
  const std::vector<double> Es = interior_energies(op, c.E);
  const std::vector<double> eps = (c.eps ? *c.eps : log_grid(1e-1, 1e-3, 4)).values();
  CommandResult r;
  r.table.columns = {"energy", "epsilon", "L", "ratio", "jlb_ok", "betam_left_ok", "betam_right_ok", "bigtwo_ok", "all_ok"};
  long violations = 0;
  for (double E : Es)
    for (double e : eps) {
      const MainmReport m = verify_mainm(op, E, e);
      bool big = true;
      for (const auto& s : m.bigtwo) big = big && s.ok;
      r.table.add({E, e, m.L, m.ratio, flag(m.jlb_ok), flag(m.betam_left_ok), flag(m.betam_right_ok), flag(big),
                   flag(m.all_ok)});
      violations += m.all_ok ? 0 : 1;
    }
  r.summary["samples"] = r.table.rows.size();
  r.summary["violations"] = violations;
  r.verification_failed = violations > 0;
  return r;
}

CommandResult suite_parseval(const RunConfig& c) {
  OperatorConfig oc = c.op;
  if (!oc.size && oc.family != "explicit") oc.size = 512;
  const JacobiOperator op = build_operator(operator_spec(oc));
  const std::vector<double> Ts = (c.T ? *c.T : Grid{1.0, 20.0, 3, Grid::Spacing::log}).values();
  const std::vector<double> Ls = c.L ? c.L->values() : std::vector<double>{4.0, 16.0, 64.0};
  ProfileOptions po;
  po.abs_tol = c.abs_tol;
  po.tail_tol = c.tail_tol;
  po.threads = c.threads;
  CommandResult r;
  r.table.columns = {"T", "L", "resolvent", "propagation", "difference", "total", "ok"};
  long violations = 0;
  for (double T : Ts) {
    const TimeAveragedProfile a = profile_resolvent(op, T, Ls, po);
    const TimeAveragedProfile b = profile_propagate(op, T, Ls);
    for (std::size_t k = 0; k < Ls.size(); ++k) {
      const double d = std::fabs(a.values[k] - b.values[k]);
      const bool ok = d < 1e-3 && std::fabs(a.total - 1.0) < 1e-4;
      violations += ok ? 0 : 1;
      r.table.add({T, Ls[k], a.values[k], b.values[k], d, a.total, flag(ok)});
    }
  }
  r.summary["violations"] = violations;
  r.verification_failed = violations > 0;
  return r;
}

CommandResult suite_trans(const RunConfig& c) {
  const JacobiOperator op = build_operator(operator_spec(c.op));
  const std::vector<double> Es = interior_energies(op, c.E);
  const std::vector<double> eps = (c.eps ? *c.eps : log_grid(1e-1, 1e-2, 5)).values();
  CommandResult r;
  r.table.columns = {"energy", "epsilon", "L_solution", "L_transfer", "ok"};
  long violations = 0;
  for (double E : Es)
    for (double e : eps) {
      const double a = length_scale(op, E, e).L;
      const double b = length_scale_transfer(op, E, e).L;
      const bool ok = a < 2.0 || b >= a;
      violations += ok ? 0 : 1;
      r.table.add({E, e, a, b, flag(ok)});
    }
  r.summary["violations"] = violations;
  r.verification_failed = violations > 0;
  return r;
}

CommandResult suite_fib(const RunConfig& c) {
  const double lambda = c.op.family == "fibonacci" && c.op.lambda > 0.0 ? c.op.lambda : 10.0;
  CommandResult r;
  r.table.columns = {"check", "value", "ok"};
  long failures = 0;
  auto row = [&](const std::string& name, double v, bool ok) {
    r.table.add({name, v, flag(ok)});
    failures += ok ? 0 : 1;
  };
  {
    double worst = 0.0;
    // off the spectrum the orbit escapes and the invariant cancels catastrophically
    for (const DoubleDouble& E : fibonacci::random_deep_energies(lambda, 25, 100, c.op.seed))
      worst = std::max(worst, fibonacci::trace_orbit(lambda, E, 25).max_invariant_residual());
    row("trace_invariant_residual", worst, worst < 1e-9);
  }
  if (lambda > 4.0 + 2.0 * std::sqrt(3.0)) {
    const fibonacci::TraceBoundReport t = fibonacci::verify_trace_derivative_bound(lambda, 12, 1);
    row("trace_derivative_violations", static_cast<double>(t.violations), t.all_ok);
  }
  const fibonacci::CorsqReport q = fibonacci::verify_corsq(static_cast<int>(c.params.trials), c.op.seed);
  row("corsq_min_margin", q.min_margin, q.ok);
  const fibonacci::KeyitReport k =
      fibonacci::verify_keyit(lambda, 8, {0.0, std::numbers::pi / 4.0, std::numbers::pi / 2.0}, 8, 12);
  double kmin = INFINITY;
  for (const auto& s : k.samples) kmin = std::min(kmin, s.ratio);
  row("keyit_min_ratio", kmin, k.all_ok);
  const fibonacci::FBoundReport f = fibonacci::verify_f_bound(lambda);
  row("f_max_partial", f.max_partial, f.ok);
  r.summary["lambda"] = lambda;
  r.summary["failures"] = failures;
  r.verification_failed = failures > 0;
  return r;
}

CommandResult suite_lanczos(const RunConfig& c) {
  const long N = c.lattice.lanczos_size;
  const long extent = c.lattice.extent > 0 ? c.lattice.extent : N + 3;
  const PotentialFn v = c.op.family == "random" ? random_potential(c.op.width, c.op.seed) : free_potential();
  const Lattice lat = make_lattice(c.lattice.dim, extent, v);
  const LanczosBasis basis = lanczos_tridiag(lat, N);
  CommandResult r;
  r.table.columns = {"check", "value", "ok"};
  long failures = 0;
  auto row = [&](const std::string& name, double val, bool ok) {
    r.table.add({name, val, flag(ok)});
    failures += ok ? 0 : 1;
  };
  long worst_excess = -1000;
  for (std::size_t n = 0; n < basis.basis_support_radii.size(); ++n)
    worst_excess = std::max(worst_excess, basis.basis_support_radii[n] - static_cast<long>(n) - 1);
  row("support_radius_excess", static_cast<double>(worst_excess), worst_excess <= 0);
  const int n_mom = static_cast<int>(std::min<long>(20, 2 * static_cast<long>(basis.b.size()) - 1));
  const std::vector<double> m1 = lattice_moments(lat, n_mom);
  const std::vector<double> m2 = jacobi_moments(basis.jacobi, static_cast<long>(basis.b.size()), n_mom);
  double rel = 0.0;
  for (int n = 0; n <= n_mom; ++n) {
    const double scale = std::max(1.0, std::fabs(m1[static_cast<std::size_t>(n)]));
    rel = std::max(rel, std::fabs(m1[static_cast<std::size_t>(n)] - m2[static_cast<std::size_t>(n)]) / scale);
  }
  row("moment_relative_error", rel, rel < 1e-8);
  const double orth = basis.max_orthonormality_error();
  row("orthonormality_error", orth, orth < 1e-10);
  r.summary["failures"] = failures;
  r.verification_failed = failures > 0;
  return r;
}

}  // namespace

CommandResult cmd_verify(const RunConfig& c) {
  const std::string& s = c.params.suite;
  CommandResult r;
  if (s == "mainm")
    r = suite_mainm(c);
  else if (s == "parseval")
    r = suite_parseval(c);
  else if (s == "trans")
    r = suite_trans(c);
  else if (s == "fib")
    r = suite_fib(c);
  else if (s == "lanczos")
    r = suite_lanczos(c);
  else
    throw ValidationError("verify needs --suite mainm, parseval, trans, fib or lanczos");
  r.summary["suite"] = s;
  r.summary["passed"] = !r.verification_failed;
  return r;
}

}  // namespace wavebound::cli
