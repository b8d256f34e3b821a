#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavebound/numeric.hpp"

namespace wavebound::fibonacci {

// (sqrt(5) - 1) / 2
double omega();
// q_0 = q_1 = 1, q_k = q_{k-1} + q_{k-2}
std::uint64_t q(int k);

// Element n holds V(n) for n = 0..n_max, built by concatenation S_{k+1} = S_k S_{k-1}.
std::vector<int> fib_potential(long n_max);
// V(n) for any integer n. Negative sites use V(-n) = V(n-1), n >= 2.
int potential_at(long n);

struct TraceOrbit {
  double lambda = 0.0;
  double energy = 0.0;
  int k_max = 0;
  // x[k + 1] = x_k and dx[k + 1] = x'_k for k = -1..k_max
  std::vector<ScaledReal> x;
  std::vector<ScaledReal> dx;
  // invariant_residual[k] for k = 0..k_max-1: |I(x_{k+1}, x_k, x_{k-1}) - (4 + lambda^2)| / (4 + lambda^2)
  std::vector<double> invariant_residual;

  ScaledReal x_at(int k) const { return x.at(static_cast<std::size_t>(k + 1)); }
  ScaledReal dx_at(int k) const { return dx.at(static_cast<std::size_t>(k + 1)); }
  double max_invariant_residual() const;
};

TraceOrbit trace_orbit(double lambda, double E, int k_max);
TraceOrbit trace_orbit(double lambda, const DoubleDouble& E, int k_max);

// x_k(E) alone, for k >= -1.
double trace_value(double lambda, double E, int k);
DoubleDouble trace_value(double lambda, const DoubleDouble& E, int k);

enum class BandType { A, B };
const char* to_string(BandType t);

struct BandInterval {
  int level = 0;
  DoubleDouble left;
  DoubleDouble right;
  DoubleDouble center;  // x_level(center) = 0
  BandType type = BandType::A;
  int parent = -1;
  std::vector<int> children;
};

struct BandTreeOptions {
  // levels above this use double-double trace evaluation
  int compensated_above = 12;
};

struct BandTree {
  double lambda = 0.0;
  int k_max = 0;
  std::vector<BandInterval> bands;
  std::vector<std::vector<int>> by_level;

  const std::vector<int>& level(int k) const { return by_level.at(static_cast<std::size_t>(k)); }
};

BandTree band_tree(double lambda, int k_max, const BandTreeOptions& options = {});

// Children of one band, typed per the A/B rules. Throws StructureError when
// the expected roots are not where they should be.
std::vector<BandInterval> child_bands(double lambda, const BandInterval& parent, bool compensated);

// Centers of bands reached by a seeded random walk from a root band down to level k.
std::vector<DoubleDouble> random_deep_energies(double lambda, int k, int count, std::uint64_t seed);

struct Constants {
  double lambda = 0.0;
  bool xi_defined = false;
  double xi = 0.0;
  double zeta1 = 0.0;
  double p1 = 0.0;
  double c = 0.0;  // sup |x_k| estimate, or lambda + 2
  bool c_from_tree = false;
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
  double zeta2 = 0.0;
  double kappa_growth = 0.0;       // sqrt(17)/4 per window
  double kappa_window_ratio = 0.0; // q_{n+5}/q_n in the limit
  double kappa = 0.0;              // log(sqrt(17)/4) / (5 log(1/omega))
  double kappa_literal = 0.0;      // log(sqrt(17) / (20 log(1/omega))), reported only
  double alpha = 0.0;
  double p2 = 0.0;
};

// Throws DomainError when lambda <= 4 + 2 sqrt(3).
double xi(double lambda);
Constants constants(double lambda, std::optional<double> c_estimate = std::nullopt);
// max |x_k| over band centers and endpoints of the tree, k <= tree.k_max
double estimate_trace_sup(const BandTree& tree);

double f_plus(double x, double y, double lambda);
double f_minus(double x, double y, double lambda);

struct TraceBoundSample {
  int k = 0;
  double energy = 0.0;
  double dx_abs = 0.0;
  double bound = 0.0;  // xi^{k/2}
  bool ok = true;
  bool exempt = false;  // k = 1: x'_1 = 1 for every energy
};

struct StepRatioSample {
  int parent_band = 0;
  int child_band = 0;
  int k_parent = 0;
  int k_child = 0;
  double energy = 0.0;
  double ratio = 0.0;
  bool ok = true;
};

struct PhiSample {
  int k = 0;
  double energy = 0.0;
  double phi_cubed = 0.0;   // ||Phi(E)||^3 at L = q_k + 1
  double dx_abs = 0.0;
  bool lower_ok = true;     // phi_cubed >= xi^{k/2} / 4
  bool upper_ok = true;     // dx_abs <= 4 phi_cubed
};

struct TraceBoundReport {
  double lambda = 0.0;
  double xi = 0.0;
  int k_max = 0;
  std::vector<TraceBoundSample> samples;
  std::vector<StepRatioSample> steps;
  std::vector<PhiSample> phi;
  int violations = 0;
  bool all_ok = true;
};

TraceBoundReport verify_trace_derivative_bound(double lambda, int k_max, int samples_per_band);

struct FBoundReport {
  double lambda = 0.0;
  int grid = 0;
  double max_partial = 0.0;
  bool ok = true;
};
FBoundReport verify_f_bound(double lambda, int grid = 200);

struct KeyitSample {
  double energy = 0.0;
  double theta = 0.0;
  int n = 0;
  double ratio = 0.0;  // ||u||_{q_{n+5}} / ||u||_{q_n}
  bool ok = true;
};

struct KeyitReport {
  double lambda = 0.0;
  int level = 0;
  double threshold = 0.0;
  std::vector<KeyitSample> samples;
  bool all_ok = true;
};

KeyitReport verify_keyit(double lambda, int level, const std::vector<double>& thetas, int n_lo, int n_hi);

struct CorsqReport {
  int trials = 0;
  int violations = 0;
  double min_margin = 0.0;  // min over trials of lhs / rhs
  bool ok = true;
};
// Random unimodular B and vectors Psi.
CorsqReport verify_corsq(int trials, std::uint64_t seed);
// ||B Psi||^2 + ||B^2 Psi||^2 and ||Psi||^2 / (4 max(1, tr(B)^2)) for one instance.
std::pair<double, double> corsq_sides(const double B[4], const double psi[2]);

struct EnvelopeReport {
  double lambda = 0.0;
  long n_max = 0;
  double d = 0.0;
  double max_ratio = 0.0;  // over n >= 2
  double ratio_at_1 = 0.0; // envelope equals 1 at n = 1
  double fitted_exponent = 0.0;
  double zeta2 = 0.0;
  double c_estimate = 0.0;
  bool ok = true;
};
EnvelopeReport iochum_testard_envelope(double lambda, long n_max, int energies = 20);

// x'_k from the period-q_k solutions (variation of parameters), k >= 1.
double trace_derivative_from_solutions(double lambda, double E, int k);

}  // namespace wavebound::fibonacci
