#pragma once

#include <complex>
#include <vector>

#include "wavebound/intervals.hpp"
#include "wavebound/operator.hpp"
#include "wavebound/tridiagonal_eigen.hpp"

namespace wavebound {

using cplx = std::complex<double>;

// Resolvent column x(n) = <(H_N - z)^{-1} delta_1, delta_n> of the half-line
// operator cut at depth N, by backward elimination. Caches coefficients, so
// one engine must not be shared between threads.
class ResolventEngine {
 public:
  explicit ResolventEngine(const JacobiOperator& op, long depth_cap = 1L << 24);

  const JacobiOperator& op() const { return op_; }
  // Largest usable depth: operator size for finite operators, else the cap.
  long max_depth() const { return max_depth_; }
  bool exact_at(long depth) const { return op_.finite() && depth >= max_depth_; }

  // g_1 at a fixed depth.
  cplx g1(cplx z, long depth);

  // x(1..keep) into x[0..keep-1] at a fixed depth. Returns g_1 and stores
  // max_{n in last 8 sites} |x(n)/x(1)|^2 in tail_ratio.
  cplx column(cplx z, long depth, long keep, std::vector<cplx>& x, double& tail_ratio);

  struct Adaptive {
    cplx g1;
    long depth = 0;
    double tail_ratio = 0.0;
  };
  // Doubles the depth from max(64, keep + 8) until tail_ratio <= tail_tol.
  Adaptive column_adaptive(cplx z, long keep, double tail_tol, std::vector<cplx>& x);

 private:
  void ensure(long depth);
  JacobiOperator op_;
  long max_depth_;
  std::vector<double> a_;   // a(n), n = 0..cached
  std::vector<double> a2_;  // a(n)^2
  std::vector<double> b_;   // b(n), entry 0 unused
  std::vector<cplx> g_;     // scratch, g_n for n <= keep + 1
};

struct WeylOptions {
  double tol = 1e-10;
  long depth_cap = 1L << 24;
};

struct MFunctionValue {
  cplx z;
  cplx m_plus;
  cplx m_minus;  // whole line only
  cplx M;        // whole line only, G(1,1,z)
  long truncation_depth = 0;
  long truncation_depth_minus = 0;
  double est_error = 0.0;
  bool whole_line = false;
};

// m_+(z) = a(0) <(H_+ - z)^{-1} delta_1, delta_1>. For a whole-line operator
// also m_- (normalised by u_- = u_{pi/2} + m_- u_0) and M = G(1,1,z).
MFunctionValue m_plus(const JacobiOperator& op, cplx z, const WeylOptions& options = {});

// M from m_+ and m_-: m_+ m_- / (a(0)(m_+ + m_-)).
cplx assemble_M(cplx m_plus, cplx m_minus, double a0);

struct WeylSolution {
  cplx z;
  // u[n] = u_+(n, z), n = 0..n_max, u[0] = 1
  std::vector<cplx> u;
  long depth = 0;
  double change = 0.0;  // l2 change of the restriction at the last doubling
};

WeylSolution weyl_solution(const JacobiOperator& op, cplx z, long n_max, const WeylOptions& options = {});

struct GreenRow {
  cplx z;
  long first = 0;            // values[i] = G(1, first + i, z)
  std::vector<cplx> values;
  long window = 0;           // solve window [1 - window, window]
  double formula_deviation = 0.0;  // max relative gap to the m_+/m_- formula on [-20, 20]

  cplx at(long n) const { return values.at(static_cast<std::size_t>(n - first)); }
};

// Whole-line resolvent row G(1, n, z) for n in [-L1 - 1, L2 + 1].
GreenRow green_row(const JacobiOperator& op, cplx z, long L1, long L2, const WeylOptions& options = {});

struct SpectralAtoms {
  std::vector<double> energies;
  std::vector<double> weights;
  long truncation = 0;

  double total() const;
  double mass(const IntervalUnion& S) const;
  cplx stieltjes(cplx z) const;
};

// Atoms of the delta_1 spectral measure of the n-site truncation. Half-line
// operators use sites 1..N; whole-line operators the window [1 - N/2, N - N/2].
SpectralAtoms spectral_measure_atoms(const JacobiOperator& op, long N);

// Atoms together with eigenvector components phi_j(n) / phi_j(1) ... kept as
// phi_j(n), n = 1..rows, for a half-line truncation.
struct SpectralDecomposition {
  SpectralAtoms atoms;
  long rows = 0;
  // phi[(n-1) * N + j] = phi_j(n)
  std::vector<double> phi;

  double component(long n, long j) const {
    return phi[static_cast<std::size_t>((n - 1) * atoms.truncation + j)];
  }
};

SpectralDecomposition spectral_decomposition(const JacobiOperator& op, long N, long rows);

struct BigTwoSample {
  double energy_shift = 0.0;  // E' - E
  double lhs = 0.0;           // eps ||u_+(E' + i eps)||^2_{L(E)}
  double rhs = 0.0;           // (3 - 2 sqrt 2)/36 Im m_+(E' + i eps)
  bool ok = true;
};

struct MainmReport {
  double energy = 0.0;
  double epsilon = 0.0;
  double L = 0.0;
  cplx m;
  double ratio = 0.0;  // ||u0||_L |m| / ||upi2||_L
  bool jlb_ok = true;
  double betam_lhs = 0.0;  // eps ||u_+||_L^2
  double betam_mid = 0.0;  // |m| / (4 eps ||u0||_L ||upi2||_L)
  double betam_rhs = 0.0;  // (2 - sqrt 3)/16 Im m
  bool betam_left_ok = true;
  bool betam_right_ok = true;
  std::vector<BigTwoSample> bigtwo;
  bool all_ok = true;
};

// slack: relative tolerance on every inequality
MainmReport verify_mainm(const JacobiOperator& op, double E, double epsilon, double slack = 1e-8);

}  // namespace wavebound
