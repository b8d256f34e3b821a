#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "wavebound/operator.hpp"

namespace wavebound {

// Fundamental solutions with u0(0)=0, u0(1)=1 and upi2(0)=1, upi2(1)=0.
// Entry n equals mantissa[n] * 2^exponent[n]; exponent is empty until a
// value passes 1e150.
template <class T>
struct BasicSolutionPair {
  T energy{};
  std::vector<T> u0;
  std::vector<T> upi2;
  std::vector<int> exponent;

  long n_max() const { return static_cast<long>(u0.size()) - 1; }
  bool scaled() const { return !exponent.empty(); }
  int exponent_at(long n) const { return exponent.empty() ? 0 : exponent[static_cast<std::size_t>(n)]; }
  T u0_at(long n) const;
  T upi2_at(long n) const;
  // u_theta = cos(theta) u0 + sin(theta) upi2
  T u_theta_at(double theta, long n) const;
};

using SolutionPair = BasicSolutionPair<double>;
using ComplexSolutionPair = BasicSolutionPair<std::complex<double>>;

SolutionPair solve_pair(const JacobiOperator& op, double E, long n_max);
ComplexSolutionPair solve_pair(const JacobiOperator& op, std::complex<double> z, long n_max);

// ||phi||_L^2 with phi[n] = phi(n); the sum starts at n = 1.
double norm_L(std::span<const double> phi, double L);
double norm_L(std::span<const std::complex<double>> phi, double L);
// <f, g>_L without conjugation
double inner_L(std::span<const double> f, std::span<const double> g, double L);
std::complex<double> inner_L(std::span<const std::complex<double>> f, std::span<const std::complex<double>> g,
                             double L);

// Sequence on a window of the whole line; values[i] = phi(first + i).
struct WholeLineSequence {
  long first = 0;
  std::vector<std::complex<double>> values;

  long last() const { return first + static_cast<long>(values.size()) - 1; }
  std::complex<double> at(long n) const;
};

// Sum over -floor(L1)..floor(L2) plus both fractional end terms.
double norm_L1L2(const WholeLineSequence& phi, double L1, double L2);

// Unscaled solution values (may overflow to inf).
std::vector<double> u0_values(const SolutionPair& p);
std::vector<double> upi2_values(const SolutionPair& p);

struct TransferChain {
  double energy = 0.0;
  // Phi(n) = [[u0(n+1), upi2(n+1)], [u0(n), upi2(n)]] stored row-major and
  // scaled by 2^{-exponent[n]}; n = 0..n_max
  std::vector<std::array<double, 4>> matrices;
  std::vector<int> exponent;
  std::vector<double> op_norms;
  std::vector<double> log_op_norms;
  std::vector<double> a_coeff;  // a(n), n = 0..n_max
  // prefix[n] = sum_{m=1}^{n} ||Phi(m)||^2
  std::vector<double> prefix;

  long n_max() const { return static_cast<long>(matrices.size()) - 1; }
  std::array<double, 4> matrix(long n) const;
  double det(long n) const;
  // ||Phi(E)||_L^2 = sum_{n=1}^{floor(L)-1} ||Phi(n)||^2 + (L - floor(L)) ||Phi(floor(L))||^2
  double cum_sq_norm(double L) const;
  // ||Phi(1, E)^{-1}||
  double inverse_norm_at_1() const;
};

TransferChain transfer_chain(const JacobiOperator& op, double E, long n_max);

// (1/2)[(1/2) tr(Phi^t Phi) - 1]
double landauer_resistance(const TransferChain& chain, long n);

}  // namespace wavebound
