#pragma once

#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "wavebound/intervals.hpp"
#include "wavebound/numeric.hpp"
#include "wavebound/operator.hpp"
#include "wavebound/scales.hpp"
#include "wavebound/weyl.hpp"

namespace wavebound {

enum class ProfileRoute { resolvent, propagation, spectral_projection };
const char* to_string(ProfileRoute r);

// <||psi(t)||_L^2>_T on a grid of L.
struct TimeAveragedProfile {
  double T = 0.0;
  std::vector<double> L_grid;
  std::vector<double> values;
  ProfileRoute route = ProfileRoute::resolvent;
  double total = 0.0;
  // time-averaged site occupation q(n), n = 1..size (resolvent route)
  std::vector<double> density;
  // diagnostics
  double achieved_tol = 0.0;
  long evaluations = 0;
  long panels = 0;
  long max_depth = 0;
  long lattice_size = 0;
  double unitarity_drift = 0.0;
  double boundary_mass = 0.0;

  // Profile at any L covered by `density`.
  double value_at(double L) const;
};

struct ProfileOptions {
  double abs_tol = 1e-6;
  // truncation of each resolvent column: |x(N)/x(1)|^2 below this
  double tail_tol = 1e-11;
  long depth_cap = 1L << 24;
  long max_panels = 200000;
  int threads = 1;
};

// Half-line profile from (1/(pi T)) int |x(n, E + i/T)|^2 dE, x the resolvent column.
TimeAveragedProfile profile_resolvent(const JacobiOperator& op, double T, const std::vector<double>& L_grid,
                                      const ProfileOptions& options = {});

struct WholeLineProfile {
  double T = 0.0;
  std::vector<std::pair<double, double>> L;  // (L1, L2)
  std::vector<double> values;
  double total = 0.0;
  // density_right[n - 1] = q(n), n >= 1; density_left[k] = q(-k), k >= 0
  std::vector<double> density_right;
  std::vector<double> density_left;
  double achieved_tol = 0.0;
  long evaluations = 0;
};

// Whole-line profile from |G(1, n, E + i/T)|^2 summed over [-L1, L2].
WholeLineProfile profile_resolvent_whole(const JacobiOperator& op, double T,
                                         const std::vector<std::pair<double, double>>& L,
                                         const ProfileOptions& options = {});

struct PropagationOptions {
  double t_max = 0.0;   // 0 means 12.5 T
  double dt = 0.0;      // 0 means min(0.1, 0.1 / spectral half width)
  long padding = 64;
  double bessel_cutoff = 1e-12;
  double boundary_tol = 1e-8;
};

// Chebyshev propagation of delta_1 with Simpson quadrature of the kernel.
TimeAveragedProfile profile_propagate(const JacobiOperator& op, double T, const std::vector<double>& L_grid,
                                      const PropagationOptions& options = {});

// e^{-iHt} delta_1 on sites 1..n_sites (finite operators: all sites).
std::vector<cplx> propagate_state(const JacobiOperator& op, double t, long n_sites, double bessel_cutoff = 1e-14);

// (e^{-iH t} P_S delta_1)(n), n = 1..n_max, from atoms of an N-site truncation.
std::vector<cplx> evolve_projected(const SpectralDecomposition& dec, const IntervalUnion& S, double t, long n_max);
std::vector<cplx> evolve_projected(const JacobiOperator& op, const IntervalUnion& S, double t, long n_max, long N);

// <||e^{-iHt} P_S delta_1||_L^2>_T computed exactly from atoms with the
// kernel 4 / (4 + (E_j - E_k)^2 T^2). `members` lists atom indices in S.
double projected_profile(const SpectralDecomposition& dec, const std::vector<std::size_t>& members, double T,
                         double L);

struct BoundReport {
  double T = 0.0;
  double L = 0.0;
  double L1 = 0.0;  // whole line
  double L2 = 0.0;
  double lhs = 0.0;
  double mu_S = 0.0;
  double ratio = 0.0;
  bool vacuous = false;
  std::string S_description;
  std::string metadata;
};

struct HldOptions {
  long atoms = 2000;              // truncation for the spectral measure
  ScaleKind kind = ScaleKind::solution;
  ProfileOptions profile;
  ScaleOptions scales;
};

// Characteristic scales at atom energies, +inf where the cap is exceeded.
std::vector<double> atom_scales(const JacobiOperator& op, const SpectralAtoms& atoms, double T, ScaleKind kind,
                                ScaleSide side, const ScaleOptions& options = {});

BoundReport hld_bound(const JacobiOperator& op, double T, double L, const HldOptions& options = {});
// Whole-line variant: S needs L^-(E) <= L1 and L^+(E) <= L2.
BoundReport hld_bound_whole(const JacobiOperator& op, double T, double L1, double L2, const HldOptions& options = {});

struct HldSweep {
  std::vector<BoundReport> reports;
  std::vector<double> min_ratio_per_T;
  double min_ratio = 0.0;
  double stability = 0.0;  // max / min of the per-T minima
  bool positive = true;    // ratio > 0 wherever mu_S > 0.01
};

// For each T, L runs over the mu-weighted quantiles of the atom scales.
HldSweep hld_sweep(const JacobiOperator& op, const std::vector<double>& T_grid, const std::vector<double>& quantiles,
                   const HldOptions& options = {});

struct LdbReport {
  double T = 0.0;
  double L = 0.0;
  double lhs = 0.0;  // <||e^{-iHt} P_S delta_1||_L^2>_T
  double rhs = 0.0;  // int_S ||u0||_L^2 / ||u0||_{L^+}^2 dmu
  double ratio = 0.0;
  double mu_S = 0.0;
  std::size_t atoms_in_S = 0;
  long truncation = 0;
};

struct LdbOptions {
  long atoms = 2000;
  ScaleOptions scales;
};

LdbReport ldb_bound(const JacobiOperator& op, const IntervalUnion& S, double T, double L, const LdbOptions& options = {});

struct PbEstimate {
  double energy = 0.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  bool alpha_ok = true;  // false when the slope is degenerate
  bool gamma_ok = true;
};

// alpha from the atomic measure of (E - eps, E + eps), gamma from ||u0||_L^2.
std::vector<PbEstimate> pb_exponents(const JacobiOperator& op, const SpectralAtoms& atoms,
                                     const std::vector<double>& energies, const Grid& eps_grid, const Grid& L_grid);

struct PbReport {
  double b = 0.0;
  double g = 0.0;
  double mu_eta = 0.0;  // mu({eta >= b})
  std::vector<double> T;
  std::vector<double> C_grid;
  // lhs[i][j] at T[i], C_grid[j]
  std::vector<std::vector<double>> lhs;
  double rhs = 0.0;
  // largest C on the grid for which the bound holds at every T (0 if none)
  double C_g = 0.0;
  bool satisfied = false;
};

// S = atoms with eta >= b (eta per atom index); checks
// <||e^{-iHt} P_S delta_1||^2_{C T^b}>_T <= 1 - mu({eta >= b}) + g.
PbReport pb_bound(const SpectralDecomposition& dec, const std::vector<double>& eta, double b, double g,
                  const std::vector<double>& T, const std::vector<double>& C_grid);

struct BetaExponents {
  double beta_up = 0.0;
  double beta_down = 0.0;
  double delta = 0.1;
  std::vector<double> T;
  std::vector<double> L_delta;
  std::vector<double> ratio_slopes;   // log L_delta / log T
  std::vector<double> secant_slopes;  // tail neighbours
  std::size_t tail_start = 0;
  // delta-refinement sweep: (delta, beta_up, beta_down)
  std::vector<std::array<double, 3>> sweep;
};

struct BetaOptions {
  std::vector<double> sweep_deltas = {0.3, 0.1, 0.03};
  ProfileOptions profile;
};

// L_delta(T) = inf{L : profile(L) > delta}; exponents are the extreme tail
// secant slopes of log L_delta against log T.
BetaExponents beta_exponents(const JacobiOperator& op, const std::vector<double>& T_grid, double delta = 0.1,
                             const BetaOptions& options = {});

// inf{L : profile(L) > delta} by bisection on the piecewise-linear profile.
double spreading_length(const TimeAveragedProfile& profile, double delta);

}  // namespace wavebound
