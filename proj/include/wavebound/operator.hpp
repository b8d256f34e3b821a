#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wavebound {

enum class Side { half_line, whole_line };
enum class Family { free, random, fibonacci, explicit_arrays, lanczos };

const char* to_string(Side side);
const char* to_string(Family family);

struct OperatorSpec {
  Family family = Family::free;
  Side side = Side::half_line;
  double lambda = 0.0;        // fibonacci coupling
  double width = 0.0;         // random: b(n) uniform on [-width/2, width/2]
  std::uint64_t seed = 0;     // random
  std::optional<long> size;   // restrict a built-in family to sites 1..size (half line)
  // explicit / lanczos: b[i] = b(first_site + i), a[i] = a(first_site + i)
  std::vector<double> a;
  std::vector<double> b;
  long first_site = 1;
  double boundary_coupling = 1.0;  // a(0) on the half line
  std::string label;
};

constexpr long kNoSite = std::numeric_limits<long>::min();
constexpr long kUnbounded = std::numeric_limits<long>::max();

// Immutable Jacobi operator (Hu)(n) = a(n)u(n+1) + a(n-1)u(n-1) + b(n)u(n).
// Copies share the coefficient source.
class JacobiOperator {
 public:
  JacobiOperator();

  Side side() const;
  Family family() const;
  const std::string& label() const;
  const OperatorSpec& spec() const;

  // Throw RangeError outside the coefficient range.
  double a(long n) const;
  double b(long n) const;

  // First and last site of the operator. Infinite ends report kNoSite / kUnbounded.
  long first_site() const;
  long last_site() const;
  bool finite() const;

  // Fills b(n) and a(n) for n in [from, from + count).
  void fill(long from, long count, double* a_out, double* b_out) const;

  // Interval containing the spectrum (Gershgorin discs of the sites in range).
  std::pair<double, double> spectral_bounds() const;

  // Half-line operator seen from the left of site 1: a'(j) = a(-j), b'(j) = b(1-j).
  JacobiOperator reflected() const;

  // Half-line restricted to sites 1..n_sites.
  JacobiOperator truncated(long n_sites) const;

  struct Impl;

 private:
  explicit JacobiOperator(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
  friend JacobiOperator build_operator(const OperatorSpec& spec);
};

JacobiOperator build_operator(const OperatorSpec& spec);

OperatorSpec free_spec(Side side = Side::half_line);
OperatorSpec random_spec(double width, std::uint64_t seed, Side side = Side::half_line);
OperatorSpec fibonacci_spec(double lambda, Side side = Side::half_line);
OperatorSpec explicit_spec(std::vector<double> a, std::vector<double> b, Side side = Side::half_line,
                           long first_site = 1);

}  // namespace wavebound
