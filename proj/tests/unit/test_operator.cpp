#include <doctest.h>

#include <cmath>

#include "wavebound/errors.hpp"
#include "wavebound/fibonacci.hpp"
#include "wavebound/operator.hpp"

using namespace wavebound;

namespace {

// Sturmian coding of the rotation by omega.
int sturmian(long n) {
  const double w = fibonacci::omega();
  return static_cast<int>(std::floor((n + 1) * w) - std::floor(n * w));
}

}  // namespace

TEST_SUITE("operator") {
  TEST_CASE("free operator coefficients") {
    const JacobiOperator op = build_operator(free_spec());
    CHECK(op.family() == Family::free);
    CHECK(op.side() == Side::half_line);
    CHECK(op.first_site() == 1);
    CHECK_FALSE(op.finite());
    for (long n = 1; n < 50; ++n) {
      CHECK(op.b(n) == 0.0);
      CHECK(op.a(n) == 1.0);
    }
    CHECK(op.a(0) == 1.0);
    CHECK_THROWS_AS(op.b(0), RangeError);
    const auto [lo, hi] = op.spectral_bounds();
    CHECK(lo == -2.0);
    CHECK(hi == 2.0);
  }

  TEST_CASE("boundary coupling sets a(0)") {
    OperatorSpec s = free_spec();
    s.boundary_coupling = 0.5;
    CHECK(build_operator(s).a(0) == 0.5);
    s.boundary_coupling = 0.0;
    CHECK_THROWS_AS(build_operator(s), ValidationError);
  }

  TEST_CASE("fibonacci potential matches the rotation coding") {
    for (long n = -200; n <= 2000; ++n) CHECK(fibonacci::potential_at(n) == sturmian(n));
    const std::vector<int> v = fibonacci::fib_potential(1000);
    for (long n = 1; n <= 1000; ++n) CHECK(v[static_cast<std::size_t>(n)] == sturmian(n));
    const JacobiOperator op = build_operator(fibonacci_spec(10.0, Side::whole_line));
    for (long n = -50; n <= 50; ++n) CHECK(op.b(n) == 10.0 * sturmian(n));
  }

  TEST_CASE("random operator is seeded and bounded") {
    const JacobiOperator a = build_operator(random_spec(3.0, 11));
    const JacobiOperator b = build_operator(random_spec(3.0, 11));
    const JacobiOperator c = build_operator(random_spec(3.0, 12));
    bool differs = false;
    double lo = 0.0, hi = 0.0;
    for (long n = 1; n <= 2000; ++n) {
      CHECK(a.b(n) == b.b(n));
      differs = differs || a.b(n) != c.b(n);
      lo = std::min(lo, a.b(n));
      hi = std::max(hi, a.b(n));
    }
    CHECK(differs);
    CHECK(lo >= -1.5);
    CHECK(hi <= 1.5);
    CHECK(hi - lo > 2.9);
    CHECK_THROWS_AS(build_operator(random_spec(-1.0, 1)), ValidationError);
  }

  TEST_CASE("fill agrees with pointwise access") {
    for (const OperatorSpec& s : {free_spec(), random_spec(2.0, 5), fibonacci_spec(5.0)}) {
      const JacobiOperator op = build_operator(s);
      std::vector<double> a(40), b(40);
      op.fill(3, 40, a.data(), b.data());
      for (long i = 0; i < 40; ++i) {
        CHECK(a[static_cast<std::size_t>(i)] == op.a(3 + i));
        CHECK(b[static_cast<std::size_t>(i)] == op.b(3 + i));
      }
    }
  }

  TEST_CASE("explicit arrays and truncation") {
    const JacobiOperator op = build_operator(explicit_spec({0.5, 0.7, 0.9}, {1.0, 2.0, 3.0}));
    CHECK(op.finite());
    CHECK(op.last_site() == 3);
    CHECK(op.b(2) == 2.0);
    CHECK(op.a(1) == 0.5);
    CHECK_THROWS_AS(op.b(4), RangeError);
    CHECK_THROWS_AS(build_operator(explicit_spec({1.0}, {1.0, 2.0, 3.0})), ValidationError);
    CHECK_THROWS_AS(build_operator(explicit_spec({0.0, 1.0}, {1.0, 2.0})), ValidationError);
    const JacobiOperator t = build_operator(fibonacci_spec(5.0)).truncated(10);
    CHECK(t.finite());
    CHECK(t.last_site() == 10);
    CHECK(t.b(10) == 5.0 * sturmian(10));
    CHECK_THROWS_AS(t.b(11), RangeError);
  }

  TEST_CASE("reflection of a whole-line operator") {
    const JacobiOperator op = build_operator(random_spec(4.0, 9, Side::whole_line));
    const JacobiOperator r = op.reflected();
    CHECK(r.side() == Side::half_line);
    for (long j = 1; j < 30; ++j) {
      CHECK(r.b(j) == op.b(1 - j));
      CHECK(r.a(j) == op.a(-j));
    }
    CHECK_THROWS_AS(build_operator(free_spec()).reflected(), DomainError);
  }

  TEST_CASE("gershgorin bounds contain the coefficients") {
    const JacobiOperator op = build_operator(fibonacci_spec(8.0));
    const auto [lo, hi] = op.spectral_bounds();
    for (long n = 1; n < 100; ++n) {
      CHECK(op.b(n) - 2.0 >= lo);
      CHECK(op.b(n) + 2.0 <= hi);
    }
  }
}
