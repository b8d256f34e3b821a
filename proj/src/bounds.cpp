#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/solutions.hpp"

namespace wavebound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long atom_count(const JacobiOperator& op, long requested) {
  long N = requested;
  if (op.last_site() != kUnbounded) N = std::min(N, op.last_site() - std::max<long>(op.first_site(), 1) + 1);
  if (N < 1) throw ValidationError("atom truncation must be positive");
  return N;
}

// Runs of consecutive atoms inside S, as closed intervals.
IntervalUnion describe_members(const SpectralAtoms& atoms, const std::vector<char>& in) {
  std::vector<std::pair<double, double>> parts;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (!in[j]) continue;
    if (j > 0 && in[j - 1])
      parts.back().second = atoms.energies[j];
    else
      parts.push_back({atoms.energies[j], atoms.energies[j]});
  }
  return IntervalUnion(parts);
}

std::string atoms_metadata(const SpectralAtoms& atoms, const TimeAveragedProfile* p) {
  std::ostringstream os;
  os << "atoms=" << atoms.truncation;
  if (p) os << " quad_err=" << p->achieved_tol << " panels=" << p->panels << " max_depth=" << p->max_depth;
  return os.str();
}

}  // namespace

std::vector<double> atom_scales(const JacobiOperator& op, const SpectralAtoms& atoms, double T, ScaleKind kind,
                                ScaleSide side, const ScaleOptions& options) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  std::vector<double> out(atoms.energies.size(), kInf);
  parallel_for(atoms.energies.size(), 1, [&](std::size_t j) {
    try {
      const double E = atoms.energies[j];
      out[j] = kind == ScaleKind::solution ? length_scale(op, E, 1.0 / T, side, options).L
                                           : length_scale_transfer(op, E, 1.0 / T, side, options).L;
    } catch (const ResourceError&) {
      out[j] = kInf;
    }
  });
  return out;
}

BoundReport hld_bound(const JacobiOperator& op, double T, double L, const HldOptions& options) {
  if (op.side() != Side::half_line) throw DomainError("hld_bound needs a half-line operator; use hld_bound_whole");
  if (options.kind == ScaleKind::solution && !(L > 1.0)) throw ValidationError("L must exceed 1");
  if (options.kind == ScaleKind::transfer && !(L >= 2.0)) throw ValidationError("L must be at least 2 for the transfer scale");
  const SpectralAtoms atoms = spectral_measure_atoms(op, atom_count(op, options.atoms));
  const std::vector<double> sc = atom_scales(op, atoms, T, options.kind, ScaleSide::plus, options.scales);
  std::vector<char> in(sc.size(), 0);
  BoundReport r;
  r.T = T;
  r.L = L;
  for (std::size_t j = 0; j < sc.size(); ++j) {
    if (sc[j] <= L) {
      in[j] = 1;
      r.mu_S += atoms.weights[j];
    }
  }
  r.S_description = describe_members(atoms, in).describe();
  const TimeAveragedProfile p = profile_resolvent(op, T, {L}, options.profile);
  r.lhs = p.values[0];
  r.vacuous = !(r.mu_S > 0.0);
  r.ratio = r.vacuous ? 0.0 : r.lhs / r.mu_S;
  r.metadata = atoms_metadata(atoms, &p) + " kind=" + to_string(options.kind);
  return r;
}

BoundReport hld_bound_whole(const JacobiOperator& op, double T, double L1, double L2, const HldOptions& options) {
  if (op.side() != Side::whole_line) throw DomainError("hld_bound_whole needs a whole-line operator");
  const double need = options.kind == ScaleKind::solution ? 1.0 : 2.0;
  if (!(L1 > need) || !(L2 > need)) throw ValidationError("L1 and L2 must exceed the scale minimum");
  const SpectralAtoms atoms = spectral_measure_atoms(op, options.atoms);
  const std::vector<double> sp = atom_scales(op, atoms, T, options.kind, ScaleSide::plus, options.scales);
  const std::vector<double> sm = atom_scales(op, atoms, T, options.kind, ScaleSide::minus, options.scales);
  BoundReport r;
  r.T = T;
  r.L1 = L1;
  r.L2 = L2;
  std::vector<char> in(sp.size(), 0);
  for (std::size_t j = 0; j < sp.size(); ++j) {
    if (sm[j] <= L1 && sp[j] <= L2) {
      in[j] = 1;
      r.mu_S += atoms.weights[j];
    }
  }
  r.S_description = describe_members(atoms, in).describe();
  const WholeLineProfile p = profile_resolvent_whole(op, T, {{L1, L2}}, options.profile);
  r.lhs = p.values[0];
  r.vacuous = !(r.mu_S > 0.0);
  r.ratio = r.vacuous ? 0.0 : r.lhs / r.mu_S;
  r.metadata = atoms_metadata(atoms, nullptr) + " kind=" + to_string(options.kind);
  return r;
}

HldSweep hld_sweep(const JacobiOperator& op, const std::vector<double>& T_grid, const std::vector<double>& quantiles,
                   const HldOptions& options) {
  if (op.side() != Side::half_line) throw DomainError("hld_sweep needs a half-line operator");
  if (T_grid.empty() || quantiles.empty()) throw ValidationError("empty sweep grid");
  for (double q : quantiles)
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("quantiles must lie in (0, 1]");
  const SpectralAtoms atoms = spectral_measure_atoms(op, atom_count(op, options.atoms));
  const double floor_L = options.kind == ScaleKind::solution ? 1.0 : 2.0;
  HldSweep out;
  for (double T : T_grid) {
    const std::vector<double> sc = atom_scales(op, atoms, T, options.kind, ScaleSide::plus, options.scales);
    std::vector<std::size_t> order(sc.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sc[x] < sc[y]; });
    std::vector<double> Ls;
    for (double q : quantiles) {
      double cum = 0.0, L = kInf;
      for (std::size_t j : order) {
        cum += atoms.weights[j];
        if (cum >= q * (1.0 - 1e-12)) {
          L = sc[j];
          break;
        }
      }
      if (!std::isfinite(L)) continue;
      L = std::max(L, std::nextafter(floor_L, 2.0 * floor_L + 1.0));
      Ls.push_back(L);
    }
    if (Ls.empty()) continue;
    const TimeAveragedProfile p = profile_resolvent(op, T, Ls, options.profile);
    double min_ratio = kInf;
    for (std::size_t k = 0; k < Ls.size(); ++k) {
      BoundReport r;
      r.T = T;
      r.L = Ls[k];
      std::vector<char> in(sc.size(), 0);
      for (std::size_t j = 0; j < sc.size(); ++j)
        if (sc[j] <= Ls[k]) {
          in[j] = 1;
          r.mu_S += atoms.weights[j];
        }
      r.S_description = describe_members(atoms, in).describe();
      r.lhs = p.values[k];
      r.vacuous = !(r.mu_S > 0.0);
      r.ratio = r.vacuous ? 0.0 : r.lhs / r.mu_S;
      r.metadata = atoms_metadata(atoms, &p) + " kind=" + to_string(options.kind);
      if (r.mu_S > 0.01) {
        if (!(r.ratio > 0.0)) out.positive = false;
        min_ratio = std::min(min_ratio, r.ratio);
      }
      out.reports.push_back(r);
    }
    if (std::isfinite(min_ratio)) out.min_ratio_per_T.push_back(min_ratio);
  }
  if (!out.min_ratio_per_T.empty()) {
    const auto [mn, mx] = std::minmax_element(out.min_ratio_per_T.begin(), out.min_ratio_per_T.end());
    out.min_ratio = *mn;
    out.stability = *mn > 0.0 ? *mx / *mn : kInf;
  }
  return out;
}

LdbReport ldb_bound(const JacobiOperator& op, const IntervalUnion& S, double T, double L, const LdbOptions& options) {
  if (op.side() != Side::half_line) throw DomainError("ldb_bound needs a half-line operator");
  if (!(L > 0.0)) throw ValidationError("L must be positive");
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  const long N = atom_count(op, options.atoms);
  const long rows = std::min(N, static_cast<long>(std::floor(L)) + 1);
  const SpectralDecomposition dec = spectral_decomposition(op, N, rows);
  LdbReport r;
  r.T = T;
  r.L = L;
  r.truncation = N;
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < dec.atoms.energies.size(); ++j)
    if (S.contains(dec.atoms.energies[j])) {
      members.push_back(j);
      r.mu_S += dec.atoms.weights[j];
    }
  r.atoms_in_S = members.size();
  r.lhs = projected_profile(dec, members, T, std::min(L, static_cast<double>(rows)));
  std::vector<double> term(members.size(), 0.0);
  parallel_for(members.size(), 1, [&](std::size_t i) {
    const double E = dec.atoms.energies[members[i]];
    double Ls = kInf;
    try {
      Ls = length_scale(op, E, 1.0 / T, ScaleSide::plus, options.scales).L;
    } catch (const ResourceError&) {
      Ls = kInf;
    }
    if (!std::isfinite(Ls)) return;
    const long n_max = static_cast<long>(std::floor(std::max(L, Ls))) + 2;
    const SolutionPair pair = solve_pair(op, E, n_max);
    const std::vector<double> u = u0_values(pair);
    const double num = norm_L(u, L), den = norm_L(u, Ls);
    term[i] = dec.atoms.weights[members[i]] * num / den;
  });
  for (double t : term) r.rhs += t;
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

PbReport pb_bound(const SpectralDecomposition& dec, const std::vector<double>& eta, double b, double g,
                  const std::vector<double>& T, const std::vector<double>& C_grid) {
  if (eta.size() != dec.atoms.energies.size()) throw ValidationError("eta needs one value per atom");
  if (!(b > 0.0) || !(g > 0.0)) throw ValidationError("b and g must be positive");
  if (T.empty() || C_grid.empty()) throw ValidationError("empty T or C grid");
  PbReport r;
  r.b = b;
  r.g = g;
  r.T = T;
  r.C_grid = C_grid;
  std::sort(r.C_grid.begin(), r.C_grid.end());
  std::vector<std::size_t> members;
  for (std::size_t j = 0; j < eta.size(); ++j)
    if (eta[j] >= b) {
      members.push_back(j);
      r.mu_eta += dec.atoms.weights[j];
    }
  r.rhs = 1.0 - r.mu_eta + g;
  std::vector<char> ok(r.C_grid.size(), 1);
  for (double t : T) {
    std::vector<double> row;
    for (std::size_t c = 0; c < r.C_grid.size(); ++c) {
      const double L = r.C_grid[c] * std::pow(t, b);
      const double v = projected_profile(dec, members, t, L);
      row.push_back(v);
      if (v > r.rhs) ok[c] = 0;
    }
    r.lhs.push_back(row);
  }
  // lhs grows with C, so the admissible C form an initial segment
  for (std::size_t c = 0; c < r.C_grid.size() && ok[c]; ++c) r.C_g = r.C_grid[c];
  r.satisfied = r.C_g > 0.0;
  return r;
}

}  // namespace wavebound
