#include "wavebound/tridiagonal_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wavebound/errors.hpp"

namespace wavebound {

TridiagonalEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> off, long rows) {
  const long n = static_cast<long>(diag.size());
  if (n < 1) throw ValidationError("tridiagonal_eigen needs n >= 1");
  if (static_cast<long>(off.size()) + 1 < n) throw ValidationError("off-diagonal too short");
  rows = std::clamp<long>(rows, 0, n);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  for (long i = 0; i + 1 < n; ++i) e[static_cast<std::size_t>(i)] = off[static_cast<std::size_t>(i)];
  std::vector<double> z(static_cast<std::size_t>(rows * n), 0.0);
  for (long k = 0; k < rows; ++k) z[static_cast<std::size_t>(k * n + k)] = 1.0;

  const double eps = std::numeric_limits<double>::epsilon();
  for (long l = 0; l < n; ++l) {
    int iter = 0;
    long m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 200) throw ConvergenceError("tridiagonal QL did not converge", d[l], std::fabs(e[l]));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        long i;
        bool underflow = false;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (long k = 0; k < rows; ++k) {
            double* zk = &z[static_cast<std::size_t>(k * n)];
            f = zk[i + 1];
            zk[i + 1] = s * zk[i] + c * f;
            zk[i] = c * zk[i] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return d[a] < d[b]; });
  TridiagonalEigen out;
  out.n = n;
  out.rows = rows;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(static_cast<std::size_t>(rows * n));
  for (long j = 0; j < n; ++j) {
    const long src = order[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(src)];
    for (long k = 0; k < rows; ++k)
      out.vectors[static_cast<std::size_t>(k * n + j)] = z[static_cast<std::size_t>(k * n + src)];
  }
  return out;
}

}  // namespace wavebound
