#include <algorithm>
#include <cmath>
#include <limits>

#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"
#include "wavebound/solutions.hpp"

namespace wavebound {

namespace {

// Index where the last half of the log range starts.
std::size_t tail_index(const std::vector<double>& v_sorted_by_scale) {
  const double a = std::log(v_sorted_by_scale.front()), b = std::log(v_sorted_by_scale.back());
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < v_sorted_by_scale.size(); ++i) {
    const double x = std::log(v_sorted_by_scale[i]);
    if ((b > a && x >= mid - 1e-12) || (b < a && x <= mid + 1e-12)) return i;
  }
  return v_sorted_by_scale.size() - 1;
}

bool degenerate(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return true;
  for (double v : y)
    if (!std::isfinite(v)) return true;
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  return *mx - *mn <= 0.0;
}

}  // namespace

std::vector<PbEstimate> pb_exponents(const JacobiOperator& op, const SpectralAtoms& atoms,
                                     const std::vector<double>& energies, const Grid& eps_grid, const Grid& L_grid) {
  if (op.side() != Side::half_line) throw DomainError("pb_exponents needs a half-line operator");
  if (eps_grid.decades() < 3.0 - 1e-9 || L_grid.decades() < 3.0 - 1e-9)
    throw ValidationError("eps and L grids must span at least 3 decades");
  std::vector<double> eps = eps_grid.values();
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  std::vector<double> Ls = L_grid.values();
  std::sort(Ls.begin(), Ls.end());
  if (!(eps.back() > 0.0) || !(Ls.front() > 0.0)) throw ValidationError("grids must be positive");
  const std::size_t te = tail_index(eps), tl = tail_index(Ls);
  const long n_max = static_cast<long>(std::floor(Ls.back())) + 2;
  std::vector<PbEstimate> out;
  for (double E : energies) {
    PbEstimate p;
    p.energy = E;
    std::vector<double> x, y;
    for (std::size_t i = te; i < eps.size(); ++i) {
      const double m = atoms.mass(IntervalUnion::interval(E - eps[i], E + eps[i]));
      x.push_back(std::log(2.0 * eps[i]));
      y.push_back(m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity());
    }
    p.alpha_ok = !degenerate(x, y);
    if (p.alpha_ok) p.alpha = fit_slope(x, y);
    x.clear();
    y.clear();
    const SolutionPair pair = solve_pair(op, E, n_max);
    const std::vector<double> u = u0_values(pair);
    for (std::size_t i = tl; i < Ls.size(); ++i) {
      x.push_back(std::log(Ls[i]));
      y.push_back(std::log(norm_L(u, Ls[i])));
    }
    p.gamma_ok = !degenerate(x, y) && std::isfinite(y.back());
    if (p.gamma_ok) p.gamma = fit_slope(x, y);
    if (p.alpha_ok && p.gamma_ok && p.gamma > 0.0)
      p.eta = p.alpha / p.gamma;
    else
      p.gamma_ok = p.gamma_ok && p.gamma > 0.0;
    out.push_back(p);
  }
  return out;
}

double spreading_length(const TimeAveragedProfile& profile, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  const double hi_L = static_cast<double>(profile.density.size()) - 1.0;
  if (hi_L < 1.0 || profile.value_at(hi_L) <= delta)
    throw RangeError("profile does not exceed delta inside the computed window");
  double lo = 0.0, hi = hi_L;
  // integer cells first, then bisection inside the crossing cell
  long a = 0, b = static_cast<long>(hi_L);
  while (b - a > 1) {
    const long m = a + (b - a) / 2;
    if (profile.value_at(static_cast<double>(m)) > delta)
      b = m;
    else
      a = m;
  }
  lo = static_cast<double>(a);
  hi = static_cast<double>(b);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double m = 0.5 * (lo + hi);
    if (profile.value_at(m) > delta)
      hi = m;
    else
      lo = m;
  }
  return hi;
}

BetaExponents beta_exponents(const JacobiOperator& op, const std::vector<double>& T_grid, double delta,
                             const BetaOptions& options) {
  if (T_grid.size() < 3) throw ValidationError("T grid needs at least three points");
  std::vector<double> Ts = T_grid;
  std::sort(Ts.begin(), Ts.end());
  if (!(Ts.front() > 0.0)) throw ValidationError("T must be positive");
  if (std::log10(Ts.back() / Ts.front()) < 2.5 - 1e-9) throw ValidationError("T grid must span at least 2.5 decades");
  std::vector<double> deltas = options.sweep_deltas;
  if (std::find(deltas.begin(), deltas.end(), delta) == deltas.end()) deltas.push_back(delta);
  const double need = *std::max_element(deltas.begin(), deltas.end());

  // L_delta for every T and delta
  std::vector<std::vector<double>> Ld(deltas.size(), std::vector<double>(Ts.size(), 0.0));
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    double cap = 16.0;
    for (;;) {
      const TimeAveragedProfile p = profile_resolvent(op, Ts[i], {cap}, options.profile);
      const bool complete = p.lattice_size == static_cast<long>(p.density.size());
      if (p.values[0] > need || complete) {
        for (std::size_t d = 0; d < deltas.size(); ++d) Ld[d][i] = spreading_length(p, deltas[d]);
        break;
      }
      cap *= 2.0;
    }
  }
  auto exponents = [&](const std::vector<double>& L, BetaExponents& out) {
    out.ratio_slopes.clear();
    out.secant_slopes.clear();
    for (std::size_t i = 0; i < Ts.size(); ++i) out.ratio_slopes.push_back(std::log(L[i]) / std::log(Ts[i]));
    out.tail_start = tail_index(Ts);
    if (out.tail_start + 1 >= Ts.size()) out.tail_start = Ts.size() - 2;
    for (std::size_t i = out.tail_start; i + 1 < Ts.size(); ++i)
      out.secant_slopes.push_back(std::log(L[i + 1] / L[i]) / std::log(Ts[i + 1] / Ts[i]));
    out.beta_up = *std::max_element(out.secant_slopes.begin(), out.secant_slopes.end());
    out.beta_down = *std::min_element(out.secant_slopes.begin(), out.secant_slopes.end());
  };
  BetaExponents out;
  out.delta = delta;
  out.T = Ts;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    BetaExponents tmp;
    exponents(Ld[d], tmp);
    out.sweep.push_back({deltas[d], tmp.beta_up, tmp.beta_down});
    if (deltas[d] == delta) {
      out.L_delta = Ld[d];
      exponents(Ld[d], out);
    }
  }
  return out;
}

}  // namespace wavebound
