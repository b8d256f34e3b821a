#pragma once

#include <vector>

#include "wavebound/numeric.hpp"
#include "wavebound/operator.hpp"
#include "wavebound/solutions.hpp"

namespace wavebound {

enum class ScaleSide { plus, minus };
enum class ScaleKind { solution, transfer };

const char* to_string(ScaleSide s);
const char* to_string(ScaleKind k);

struct LengthScaleResult {
  double energy = 0.0;
  double epsilon = 0.0;
  double L = 0.0;
  ScaleSide side = ScaleSide::plus;
  ScaleKind kind = ScaleKind::solution;
  long bracket_lo = 0;
  long bracket_hi = 0;
  // |norm(L) * eps / c - 1| with c the target constant
  double residual = 0.0;
};

struct ScaleOptions {
  long n_cap = 1L << 22;
};

// Gram matrix of (u0, upi2) over the L-window.
struct GramMatrix {
  double q00 = 0.0;
  double q01 = 0.0;
  double q11 = 0.0;

  double det() const { return q00 * q11 - q01 * q01; }
  double max_eig() const;
  double min_eig() const;
  // angle of the eigenvector for max_eig; u_theta = cos u0 + sin upi2
  double theta_max() const;
  double norm_theta(double theta) const;
};

GramMatrix gram_matrix(const SolutionPair& pair, double L);

// |||K(E)|||_L^2 = det of the Gram matrix
double hs_norm(const SolutionPair& pair, double L);

LengthScaleResult length_scale(const JacobiOperator& op, double E, double epsilon, ScaleSide side = ScaleSide::plus,
                               const ScaleOptions& options = {});
LengthScaleResult length_scale_transfer(const JacobiOperator& op, double E, double epsilon,
                                        ScaleSide side = ScaleSide::plus, const ScaleOptions& options = {});

struct LambdaExponents {
  double lambda_up = 0.0;
  double lambda_down = 0.0;
  std::vector<double> eps;
  std::vector<double> L;
  // log L / log(1/eps) at every grid point
  std::vector<double> ratio_slopes;
  // slope of log L against log(1/eps) between neighbours in the tail
  std::vector<double> secant_slopes;
  std::size_t tail_start = 0;
  // ratio slopes monotone over the tail
  bool stable = false;
};

LambdaExponents lambda_exponents(const JacobiOperator& op, double E, const Grid& eps_grid,
                                 ScaleSide side = ScaleSide::plus, const ScaleOptions& options = {});

}  // namespace wavebound
