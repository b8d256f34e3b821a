#pragma once

#include <span>
#include <vector>

namespace wavebound {

// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
// Wilkinson-type shifts. Only the first `rows` components of each
// eigenvector are accumulated.
struct TridiagonalEigen {
  std::vector<double> values;  // ascending
  long n = 0;
  long rows = 0;
  // vectors[i * n + j] = component i of eigenvector j
  std::vector<double> vectors;

  double component(long i, long j) const { return vectors[static_cast<std::size_t>(i * n + j)]; }
};

// diag has length n, off has length n-1 (off[i] couples i and i+1).
TridiagonalEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> off, long rows);

}  // namespace wavebound
