#include <doctest.h>

#include <cmath>
#include <random>

#include "wavebound/errors.hpp"
#include "wavebound/scales.hpp"

using namespace wavebound;

namespace {

// Squared HS norm of the Volterra kernel k(n,m) = u0(n)upi2(m) - upi2(n)u0(m),
// m <= n, on the weighted L-window. Each column k(., m) is run forward from
// k(m,m) = 0, k(m+1,m) = a(0)/a(m), which avoids forming the products.
double hs_oracle(const JacobiOperator& op, double E, double L) {
  const long fl = static_cast<long>(std::floor(L));
  const double frac = L - static_cast<double>(fl);
  const long top = frac > 0.0 ? fl + 1 : fl;
  auto w = [&](long n) { return n <= fl ? 1.0L : static_cast<long double>(frac); };
  long double s = 0.0L;
  for (long m = 1; m < top; ++m) {
    long double km = 0.0L, k = static_cast<long double>(op.a(0)) / op.a(m);
    for (long n = m + 1; n <= top; ++n) {
      s += w(n) * w(m) * k * k;
      const long double next = ((E - op.b(n)) * k - op.a(n - 1) * km) / op.a(n);
      km = k;
      k = next;
    }
  }
  return static_cast<double>(s);
}

}  // namespace

TEST_SUITE("scales") {
  TEST_CASE("hs norm examples") {
    const JacobiOperator op = build_operator(free_spec());
    const SolutionPair p = solve_pair(op, 0.0, 20);
    CHECK(hs_norm(p, 1.0) == doctest::Approx(0.0));
    CHECK(hs_norm(p, 4.0) == doctest::Approx(4.0));
  }

  TEST_CASE("hs norm equals the kernel double sum") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uE(-1.9, 1.9), uL(1.0, 40.0);
    for (int i = 0; i < 60; ++i) {
      const JacobiOperator op = build_operator(i % 2 ? random_spec(2.0, static_cast<std::uint64_t>(i)) : fibonacci_spec(0.3));
      const double E = uE(rng);
      const double L = uL(rng);
      const SolutionPair p = solve_pair(op, E, 45);
      const double a = hs_norm(p, L);
      const double b = hs_oracle(op, E, L);
      CHECK(std::fabs(a - b) <= 1e-11 * std::fabs(b));
    }
  }

  TEST_CASE("gram eigenvalue product equals the determinant") {
    const JacobiOperator op = build_operator(random_spec(3.0, 8));
    const SolutionPair p = solve_pair(op, 0.3, 30);
    for (double L : {1.5, 4.0, 7.3, 20.0}) {
      const GramMatrix q = gram_matrix(p, L);
      CHECK(q.max_eig() * q.min_eig() == doctest::Approx(q.det()).epsilon(1e-10));
      CHECK(q.norm_theta(q.theta_max()) == doctest::Approx(q.max_eig()).epsilon(1e-10));
      for (double th = 0.0; th < 3.2; th += 0.1) {
        CHECK(q.norm_theta(th) <= q.max_eig() * (1 + 1e-12));
        CHECK(q.norm_theta(th) >= q.min_eig() * (1 - 1e-12) - 1e-14);
      }
    }
  }

  TEST_CASE("length scale solves the defining equation") {
    const JacobiOperator op = build_operator(random_spec(2.0, 3));
    for (double eps : {0.5, 0.1, 0.02}) {
      const LengthScaleResult r = length_scale(op, 0.2, eps);
      CHECK(r.L > 1.0);
      CHECK(r.bracket_lo <= r.L);
      CHECK(r.L <= r.bracket_hi);
      const SolutionPair p = solve_pair(op, 0.2, r.bracket_hi + 2);
      CHECK(std::sqrt(hs_norm(p, r.L)) * eps == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  TEST_CASE("free E=0 scale is about 2/eps") {
    const JacobiOperator op = build_operator(free_spec());
    for (double eps : {1e-2, 1e-3}) {
      const double L = length_scale(op, 0.0, eps).L;
      CHECK(L * eps / 2.0 == doctest::Approx(1.0).epsilon(2e-2));
    }
  }

  TEST_CASE("length scale is monotone and tends to 1") {
    const JacobiOperator op = build_operator(fibonacci_spec(5.0));
    double prev = INFINITY;
    for (double eps : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e3}) {
      const double L = length_scale(op, 1.0, eps).L;
      CHECK(L < prev);
      prev = L;
    }
    CHECK(prev < 1.01);
  }

  TEST_CASE("minus side uses the reflected half line") {
    const JacobiOperator op = build_operator(random_spec(2.0, 17, Side::whole_line));
    const LengthScaleResult m = length_scale(op, 0.1, 0.05, ScaleSide::minus);
    const LengthScaleResult r = length_scale(op.reflected(), 0.1, 0.05, ScaleSide::plus);
    CHECK(m.side == ScaleSide::minus);
    CHECK(m.L == doctest::Approx(r.L).epsilon(1e-9));
  }

  TEST_CASE("transfer scale dominates the solution scale") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uE(-2.0, 2.0), le(-3.0, 0.0);
    const JacobiOperator op = build_operator(random_spec(1.0, 1));
    for (int i = 0; i < 40; ++i) {
      const double E = uE(rng), eps = std::pow(10.0, le(rng));
      const double a = length_scale(op, E, eps).L;
      const double b = length_scale_transfer(op, E, eps).L;
      if (a >= 2.0) CHECK(b >= a);
    }
  }

  TEST_CASE("n_cap gives a resource error with a bracket") {
    const JacobiOperator op = build_operator(free_spec());
    ScaleOptions o;
    o.n_cap = 100;
    try {
      length_scale(op, 0.0, 1e-4, ScaleSide::plus, o);
      FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
      CHECK(e.bracket_lo >= 1);
    }
    CHECK_THROWS_AS(length_scale(op, 0.0, -1.0), ValidationError);
  }

  TEST_CASE("lambda exponents of the free operator are near one") {
    const JacobiOperator op = build_operator(free_spec());
    const LambdaExponents x = lambda_exponents(op, 0.0, log_grid(1e-1, 1e-5, 9));
    CHECK(x.lambda_up == doctest::Approx(1.0).epsilon(0.05));
    CHECK(x.lambda_down == doctest::Approx(1.0).epsilon(0.05));
    CHECK(x.lambda_down <= x.lambda_up);
  }
}
