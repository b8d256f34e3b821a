#include <doctest.h>

#include <cmath>
#include <random>

#include "wavebound/errors.hpp"
#include "wavebound/operator.hpp"
#include "wavebound/solutions.hpp"

using namespace wavebound;

namespace {

// Plain long double recurrence from (u(0), u(1)).
std::vector<long double> recur(const JacobiOperator& op, double E, long double u0, long double u1, long n_max) {
  std::vector<long double> u(static_cast<std::size_t>(n_max) + 1);
  u[0] = u0;
  u[1] = u1;
  for (long n = 1; n < n_max; ++n)
    u[static_cast<std::size_t>(n + 1)] =
        ((E - op.b(n)) * u[static_cast<std::size_t>(n)] - op.a(n - 1) * u[static_cast<std::size_t>(n - 1)]) / op.a(n);
  return u;
}

}  // namespace

TEST_SUITE("solutions") {
  TEST_CASE("free E=0 solutions are period four") {
    const JacobiOperator op = build_operator(free_spec());
    const SolutionPair p = solve_pair(op, 0.0, 12);
    const double u0[] = {0, 1, 0, -1, 0, 1, 0, -1};
    const double up[] = {1, 0, -1, 0, 1, 0, -1, 0};
    for (long n = 0; n < 8; ++n) {
      CHECK(p.u0_at(n) == u0[n]);
      CHECK(p.upi2_at(n) == up[n]);
    }
    const auto f = u0_values(p);
    const auto g = upi2_values(p);
    CHECK(norm_L(f, 4.0) == doctest::Approx(2.0));
    CHECK(norm_L(g, 4.0) == doctest::Approx(2.0));
    CHECK(inner_L(f, g, 4.0) == doctest::Approx(0.0));
  }

  TEST_CASE("solutions match an independent recurrence") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uE(-3.0, 3.0);
    for (const OperatorSpec& s : {random_spec(2.0, 4), fibonacci_spec(3.0)}) {
      OperatorSpec t = s;
      t.boundary_coupling = 0.8;
      const JacobiOperator op = build_operator(t);
      for (int i = 0; i < 10; ++i) {
        const double E = uE(rng);
        const SolutionPair p = solve_pair(op, E, 60);
        const auto r0 = recur(op, E, 0.0L, 1.0L, 60);
        const auto r1 = recur(op, E, 1.0L, 0.0L, 60);
        for (long n = 0; n <= 60; ++n) {
          const double s0 = static_cast<double>(r0[static_cast<std::size_t>(n)]);
          const double s1 = static_cast<double>(r1[static_cast<std::size_t>(n)]);
          CHECK(p.u0_at(n) == doctest::Approx(s0).epsilon(1e-9).scale(1.0));
          CHECK(p.upi2_at(n) == doctest::Approx(s1).epsilon(1e-9).scale(1.0));
        }
      }
    }
  }

  TEST_CASE("wronskian is constant and the transfer determinant is a(0)/a(n)") {
    const JacobiOperator op = build_operator(explicit_spec({0.9, 1.3, 0.7, 1.1, 0.6, 1.0, 1.2, 0.8, 1.0},
                                                           {0.3, -0.2, 1.1, 0.0, -0.7, 0.4, 0.2, -0.1, 0.5, 0.9}));
    const TransferChain c = transfer_chain(op, 0.37, 8);
    for (long n = 1; n <= 8; ++n) CHECK(c.det(n) == doctest::Approx(op.a(0) / op.a(n)).epsilon(1e-12));
  }

  TEST_CASE("scaled storage for growing solutions") {
    const JacobiOperator op = build_operator(free_spec());
    const SolutionPair p = solve_pair(op, 10.0, 400);
    CHECK(p.scaled());
    // u0(n) = sinh(n k) / sinh(k) with 2 cosh k = 10
    const double k = std::acosh(5.0);
    const long n = 300;
    const double logv = std::log(std::fabs(p.u0[n])) + p.exponent_at(n) * std::log(2.0);
    CHECK(logv == doctest::Approx(n * k - std::log(2.0 * std::sinh(k))).epsilon(1e-12));
  }

  TEST_CASE("norm_L fractional weighting") {
    const std::vector<double> phi = {9.0, 1.0, 2.0, 3.0};
    CHECK(norm_L(phi, 1.0) == 1.0);
    CHECK(norm_L(phi, 2.0) == 5.0);
    CHECK(norm_L(phi, 2.25) == doctest::Approx(5.0 + 0.25 * 9.0));
    CHECK(inner_L(phi, phi, 2.25) == doctest::Approx(norm_L(phi, 2.25)));
    CHECK_THROWS(norm_L(phi, 5.0));
    // monotone and continuous in L
    double prev = 0.0;
    for (double L = 1.0; L <= 3.0; L += 0.125) {
      const double v = norm_L(phi, L);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(norm_L(phi, 3.0 - 1e-12) == doctest::Approx(norm_L(phi, 3.0)));
  }

  TEST_CASE("whole-line window norm") {
    WholeLineSequence s;
    s.first = -3;
    s.values = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};  // sites -3..3
    CHECK(norm_L1L2(s, 0.0, 0.0) == doctest::Approx(16.0));
    CHECK(norm_L1L2(s, 1.0, 2.0) == doctest::Approx(9 + 16 + 25 + 36));
    CHECK(norm_L1L2(s, 1.5, 2.5) == doctest::Approx(9 + 16 + 25 + 36 + 0.5 * 4 + 0.5 * 49));
  }

  TEST_CASE("landauer resistance is zero for the identity transfer") {
    const JacobiOperator op = build_operator(free_spec());
    const TransferChain c = transfer_chain(op, 0.0, 8);
    // Phi(0) = [[u0(1), upi2(1)], [u0(0), upi2(0)]] = identity
    CHECK(landauer_resistance(c, 0) == doctest::Approx(0.0));
    for (long n = 1; n <= 8; ++n) CHECK(landauer_resistance(c, n) >= -1e-14);
    CHECK(c.inverse_norm_at_1() == doctest::Approx(1.0));
  }

  TEST_CASE("complex solutions at real z agree with real ones") {
    const JacobiOperator op = build_operator(random_spec(1.0, 2));
    const SolutionPair p = solve_pair(op, 0.4, 50);
    const ComplexSolutionPair q = solve_pair(op, std::complex<double>(0.4, 0.0), 50);
    for (long n = 0; n <= 50; ++n) {
      CHECK(q.u0_at(n).real() == doctest::Approx(p.u0_at(n)));
      CHECK(q.upi2_at(n).imag() == 0.0);
    }
  }
}
