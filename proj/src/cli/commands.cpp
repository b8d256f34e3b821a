#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>

#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/multidim.hpp"
#include "wavebound/scales.hpp"
#include "wavebound/weyl.hpp"

namespace wavebound::cli {

using nlohmann::json;

namespace {

const Grid& need(const std::optional<Grid>& g, const char* name) {
  if (!g) throw ValidationError(std::string("grid '") + name + "' is required for this command");
  return *g;
}

Grid or_default(const std::optional<Grid>& g, Grid fallback) { return g ? *g : fallback; }

ProfileOptions profile_options(const RunConfig& c) {
  ProfileOptions o;
  o.abs_tol = c.abs_tol;
  o.tail_tol = c.tail_tol;
  o.threads = c.threads;
  return o;
}

JacobiOperator build(const RunConfig& c) { return build_operator(operator_spec(c.op)); }

Cell flag(bool b) { return static_cast<long>(b ? 1 : 0); }

Lattice build_lattice(const RunConfig& c, long extent) {
  PotentialFn v;
  if (c.op.family == "free")
    v = free_potential();
  else if (c.op.family == "random")
    v = random_potential(c.op.width, c.op.seed);
  else
    throw ValidationError("lattice potentials are 'free' or 'random'");
  return make_lattice(c.lattice.dim, extent, v);
}

}  // namespace

CommandResult cmd_scales(const RunConfig& c) {
  const JacobiOperator op = build(c);
  const std::vector<double> Es = or_default(c.E, linear_grid(0.0, 0.0, 1)).values();
  const std::vector<double> eps = or_default(c.eps, log_grid(1e-1, 1e-3, 5)).values();
  std::vector<ScaleSide> sides = {ScaleSide::plus};
  if (op.side() == Side::whole_line) sides.push_back(ScaleSide::minus);
  CommandResult r;
  r.table.columns = {"energy", "epsilon", "side", "L_solution", "L_transfer", "residual"};
  for (double E : Es)
    for (double e : eps)
      for (ScaleSide s : sides) {
        const LengthScaleResult a = length_scale(op, E, e, s);
        const LengthScaleResult b = length_scale_transfer(op, E, e, s);
        r.table.add({E, e, std::string(to_string(s)), a.L, b.L, std::max(a.residual, b.residual)});
      }
  r.summary["rows"] = r.table.rows.size();
  return r;
}

CommandResult cmd_mfun(const RunConfig& c) {
  const JacobiOperator op = build(c);
  const std::vector<double> Es = need(c.E, "E").values();
  const std::vector<double> eps = or_default(c.eps, log_grid(1e-1, 1e-3, 3)).values();
  WeylOptions wo;
  wo.tol = std::min(1e-10, c.abs_tol);
  CommandResult r;
  r.table.columns = {"energy",     "epsilon",    "re_m_plus", "im_m_plus", "re_m_minus",
                     "im_m_minus", "re_M",       "im_M",      "depth",     "est_error"};
  double worst = 0.0;
  for (double E : Es)
    for (double e : eps) {
      const MFunctionValue m = m_plus(op, {E, e}, wo);
      worst = std::max(worst, m.est_error);
      r.table.add({E, e, m.m_plus.real(), m.m_plus.imag(), m.m_minus.real(), m.m_minus.imag(), m.M.real(), m.M.imag(),
                   m.truncation_depth, m.est_error});
    }
  r.summary["max_est_error"] = worst;
  return r;
}

CommandResult cmd_profile(const RunConfig& c) {
  const JacobiOperator op = build(c);
  const std::vector<double> Ts = need(c.T, "T").values();
  const std::vector<double> Ls = need(c.L, "L").values();
  CommandResult r;
  r.table.columns = {"T", "L", "value", "total", "achieved_tol", "route"};
  double worst_tol = 0.0, worst_norm = 0.0;
  for (double T : Ts) {
    if (op.side() == Side::whole_line) {
      if (c.params.route != "resolvent") throw ValidationError("whole-line profiles use the resolvent route");
      std::vector<std::pair<double, double>> pairs;
      for (double L : Ls) pairs.push_back({L, L});
      const WholeLineProfile p = profile_resolvent_whole(op, T, pairs, profile_options(c));
      for (std::size_t k = 0; k < Ls.size(); ++k)
        r.table.add({T, Ls[k], p.values[k], p.total, p.achieved_tol, std::string("resolvent")});
      worst_tol = std::max(worst_tol, p.achieved_tol);
      worst_norm = std::max(worst_norm, std::fabs(p.total - 1.0));
      continue;
    }
    TimeAveragedProfile p;
    if (c.params.route == "resolvent") {
      p = profile_resolvent(op, T, Ls, profile_options(c));
    } else {
      p = profile_propagate(op, T, Ls);
    }
    for (std::size_t k = 0; k < Ls.size(); ++k)
      r.table.add({T, Ls[k], p.values[k], p.total, p.achieved_tol, std::string(to_string(p.route))});
    worst_tol = std::max(worst_tol, p.achieved_tol);
    worst_norm = std::max(worst_norm, std::fabs(p.total - 1.0));
  }
  r.summary["achieved_tol"] = worst_tol;
  r.summary["max_normalization_error"] = worst_norm;
  return r;
}

CommandResult cmd_hld(const RunConfig& c) {
  const JacobiOperator op = build(c);
  const std::vector<double> Ts = need(c.T, "T").values();
  HldOptions o;
  o.atoms = c.params.atoms;
  o.kind = c.params.kind == "transfer" ? ScaleKind::transfer : ScaleKind::solution;
  o.profile = profile_options(c);
  CommandResult r;
  r.table.columns = {"T", "L", "lhs", "mu_S", "ratio", "vacuous", "S"};
  auto add = [&](const BoundReport& b) {
    r.table.add({b.T, b.L, b.lhs, b.mu_S, b.ratio, flag(b.vacuous), b.S_description});
  };
  if (!c.params.quantiles.empty()) {
    const HldSweep sw = hld_sweep(op, Ts, c.params.quantiles, o);
    for (const auto& b : sw.reports) add(b);
    r.summary["min_ratio"] = sw.min_ratio;
    r.summary["stability"] = sw.stability;
    r.summary["positive"] = sw.positive;
    r.summary["min_ratio_per_T"] = sw.min_ratio_per_T;
    return r;
  }
  const std::vector<double> Ls = need(c.L, "L").values();
  double min_ratio = INFINITY;
  for (double T : Ts)
    for (double L : Ls) {
      BoundReport b = op.side() == Side::whole_line ? hld_bound_whole(op, T, L, L, o) : hld_bound(op, T, L, o);
      if (op.side() == Side::whole_line) b.L = L;
      add(b);
      if (b.mu_S > 0.01) min_ratio = std::min(min_ratio, b.ratio);
    }
  if (std::isfinite(min_ratio)) r.summary["min_ratio"] = min_ratio;
  return r;
}

CommandResult cmd_ldb(const RunConfig& c) {
  const JacobiOperator op = build(c);
  if (c.params.S.empty()) throw ValidationError("ldb needs params.S (or --S lo:hi)");
  const IntervalUnion S(c.params.S);
  const std::vector<double> Ts = need(c.T, "T").values();
  const std::vector<double> Ls = need(c.L, "L").values();
  LdbOptions o;
  o.atoms = c.params.atoms;
  CommandResult r;
  r.table.columns = {"T", "L", "lhs", "rhs", "ratio", "mu_S", "atoms_in_S"};
  double C = 0.0;
  for (double T : Ts)
    for (double L : Ls) {
      const LdbReport b = ldb_bound(op, S, T, L, o);
      r.table.add({T, L, b.lhs, b.rhs, b.ratio, b.mu_S, static_cast<long>(b.atoms_in_S)});
      C = std::max(C, b.ratio);
    }
  r.summary["empirical_C"] = C;
  return r;
}

CommandResult cmd_exponents(const RunConfig& c) {
  const JacobiOperator op = build(c);
  CommandResult r;
  if (c.params.exponent == "beta") {
    BetaOptions o;
    o.profile = profile_options(c);
    const BetaExponents b = beta_exponents(op, need(c.T, "T").values(), c.params.delta, o);
    r.table.columns = {"T", "L_delta", "ratio_slope"};
    for (std::size_t i = 0; i < b.T.size(); ++i) r.table.add({b.T[i], b.L_delta[i], b.ratio_slopes[i]});
    r.summary["beta_up"] = b.beta_up;
    r.summary["beta_down"] = b.beta_down;
    r.summary["delta"] = b.delta;
    json sweep = json::array();
    for (const auto& s : b.sweep) sweep.push_back({{"delta", s[0]}, {"beta_up", s[1]}, {"beta_down", s[2]}});
    r.summary["delta_sweep"] = sweep;
    return r;
  }
  if (c.params.exponent == "lambda") {
    const Grid eps = need(c.eps, "eps");
    r.table.columns = {"energy", "epsilon", "L", "ratio_slope"};
    json per = json::array();
    for (double E : need(c.E, "E").values()) {
      const LambdaExponents le = lambda_exponents(op, E, eps);
      for (std::size_t i = 0; i < le.eps.size(); ++i) r.table.add({E, le.eps[i], le.L[i], le.ratio_slopes[i]});
      per.push_back({{"energy", E}, {"lambda_up", le.lambda_up}, {"lambda_down", le.lambda_down}, {"stable", le.stable}});
    }
    r.summary["lambda"] = per;
    return r;
  }
  const SpectralAtoms atoms = spectral_measure_atoms(op, c.params.atoms);
  const std::vector<PbEstimate> est =
      pb_exponents(op, atoms, need(c.E, "E").values(), need(c.eps, "eps"), need(c.L, "L"));
  r.table.columns = {"energy", "alpha", "gamma", "eta", "alpha_ok", "gamma_ok"};
  for (const auto& p : est) r.table.add({p.energy, p.alpha, p.gamma, p.eta, flag(p.alpha_ok), flag(p.gamma_ok)});
  return r;
}

CommandResult cmd_fib(const RunConfig& c) {
  const double lambda = c.op.family == "fibonacci" ? c.op.lambda : 0.0;
  if (!(lambda > 0.0)) throw ValidationError("fib needs --lambda > 0");
  const int k = c.params.bands;
  const fibonacci::BandTree tree = fibonacci::band_tree(lambda, k);
  CommandResult r;
  r.table.columns = {"level", "index", "type", "left", "right", "center", "parent"};
  const auto& ids = tree.level(k);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& b = tree.bands[static_cast<std::size_t>(ids[i])];
    r.table.add({static_cast<long>(b.level), static_cast<long>(i), std::string(fibonacci::to_string(b.type)),
                 b.left.to_double(), b.right.to_double(), b.center.to_double(), static_cast<long>(b.parent)});
  }
  json totals = json::array();
  bool ok = true;
  for (int l = 0; l <= k; ++l) {
    totals.push_back(tree.level(l).size());
    ok = ok && tree.level(l).size() == fibonacci::q(l);
  }
  r.summary["level_totals"] = totals;
  r.summary["totals_match_q"] = ok;
  const fibonacci::Constants k_c = fibonacci::constants(lambda, fibonacci::estimate_trace_sup(tree));
  json cj = {{"lambda", k_c.lambda}, {"zeta1", k_c.zeta1}, {"p1", k_c.p1},       {"c", k_c.c},
             {"zeta2", k_c.zeta2},   {"kappa", k_c.kappa}, {"alpha", k_c.alpha}, {"p2", k_c.p2},
             {"kappa_literal", k_c.kappa_literal}};
  if (k_c.xi_defined) cj["xi"] = k_c.xi;
  r.summary["constants"] = cj;
  return r;
}

CommandResult cmd_lanczos(const RunConfig& c) {
  const long N = c.lattice.lanczos_size;
  const long extent = c.lattice.extent > 0 ? c.lattice.extent : N + 3;
  const Lattice lat = build_lattice(c, extent);
  const LanczosBasis basis = lanczos_tridiag(lat, N);
  CommandResult r;
  r.table.columns = {"n", "b", "a", "support_radius", "reorth_drift"};
  for (std::size_t n = 0; n < basis.b.size(); ++n) {
    const double a = n < basis.a.size() ? basis.a[n] : 0.0;
    const double d = n < basis.reorth_drift.size() ? basis.reorth_drift[n] : 0.0;
    r.table.add({static_cast<long>(n + 1), basis.b[n], a, basis.basis_support_radii[n], d});
  }
  bool radii_ok = true;
  for (std::size_t n = 0; n < basis.basis_support_radii.size(); ++n)
    radii_ok = radii_ok && basis.basis_support_radii[n] <= static_cast<long>(n) + 1;
  r.summary["terminated"] = basis.terminated;
  r.summary["termination"] = basis.termination;
  r.summary["max_orthonormality_error"] = basis.max_orthonormality_error();
  r.summary["support_radii_ok"] = radii_ok;
  r.summary["operator"] = {{"family", "explicit"}, {"side", "half"}, {"a", basis.a}, {"b", basis.b}};
  return r;
}

CommandResult cmd_mdhld(const RunConfig& c) {
  const std::vector<double> Ts = need(c.T, "T").values();
  const std::vector<double> Ls = need(c.L, "L").values();
  MdhldOptions o;
  o.lanczos_size = c.lattice.lanczos_size;
  o.profile = profile_options(c);
  CommandResult r;
  r.table.columns = {"T", "L", "lhs", "mu_S", "ratio", "half_line_profile", "drift_budget", "structural_ok"};
  bool all_ok = true;
  double drift = 0.0;
  for (double T : Ts) {
    long extent = c.lattice.extent;
    if (extent == 0) {
      const double radius = (c.op.family == "random" ? 0.5 * c.op.width : 0.0) + 2.0 * c.lattice.dim;
      extent = std::max(mdhld_required_extent(radius, T, o.propagation), o.lanczos_size + 3);
    }
    const Lattice lat = build_lattice(c, extent);
    for (const auto& m : mdhld_sweep(lat, T, Ls, o)) {
      r.table.add({m.bound.T, m.bound.L, m.bound.lhs, m.bound.mu_S, m.bound.ratio, m.half_line_profile, m.drift_budget,
                   flag(m.structural_ok)});
      all_ok = all_ok && m.structural_ok;
      drift = std::max(drift, m.unitarity_drift);
    }
  }
  r.summary["structural_ok"] = all_ok;
  r.summary["unitarity_drift"] = drift;
  return r;
}

CommandResult run_command(const RunConfig& c) {
  const std::string& n = c.command;
  if (n == "scales") return cmd_scales(c);
  if (n == "mfun") return cmd_mfun(c);
  if (n == "profile") return cmd_profile(c);
  if (n == "hld") return cmd_hld(c);
  if (n == "ldb") return cmd_ldb(c);
  if (n == "exponents") return cmd_exponents(c);
  if (n == "fib") return cmd_fib(c);
  if (n == "lanczos") return cmd_lanczos(c);
  if (n == "mdhld") return cmd_mdhld(c);
  if (n == "verify") return cmd_verify(c);
  throw ValidationError("unknown command '" + n + "'");
}

}  // namespace wavebound::cli
