#include <doctest.h>

#include <cmath>
#include <random>

#include "wavebound/errors.hpp"
#include "wavebound/intervals.hpp"
#include "wavebound/numeric.hpp"

using namespace wavebound;

TEST_SUITE("numeric") {
  TEST_CASE("scaled real round trips and arithmetic") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng), y = u(rng);
      const ScaledReal a(x), b(y);
      CHECK(a.to_double() == doctest::Approx(x).epsilon(1e-15));
      CHECK((a + b).to_double() == doctest::Approx(x + y).epsilon(1e-12));
      CHECK((a * b).to_double() == doctest::Approx(x * y).epsilon(1e-14));
      CHECK((a / b).to_double() == doctest::Approx(x / y).epsilon(1e-14));
      CHECK(((a < b) == (x < y)));
    }
  }

  TEST_CASE("scaled real survives past double range") {
    ScaledReal x(1e300);
    for (int i = 0; i < 10; ++i) x = x * ScaledReal(1e300);
    CHECK(std::isinf(x.to_double()));
    CHECK(x.log_abs() == doctest::Approx(11 * 300 * std::log(10.0)).epsilon(1e-12));
    CHECK(ScaledReal(0.0).is_zero());
    CHECK(std::isinf(ScaledReal(0.0).log_abs()));
  }

  TEST_CASE("double-double carries extra precision") {
    const DoubleDouble one(1.0);
    const DoubleDouble tiny(1e-20);
    const DoubleDouble s = one + tiny;
    CHECK(s.hi == 1.0);
    CHECK(s.lo == doctest::Approx(1e-20));
    CHECK((s - one).to_double() == doctest::Approx(1e-20));
    const DoubleDouble third = DoubleDouble(1.0) / DoubleDouble(3.0);
    const DoubleDouble back = third * DoubleDouble(3.0) - one;
    CHECK(std::fabs(back.to_double()) < 1e-31);
    const DoubleDouble r = dd_sqrt(DoubleDouble(2.0));
    CHECK(std::fabs((r * r - DoubleDouble(2.0)).to_double()) < 1e-31);
  }

  TEST_CASE("splitmix and uniform01 are deterministic and in range") {
    CHECK(splitmix64(1) == splitmix64(1));
    CHECK(splitmix64(1) != splitmix64(2));
    double lo = 1.0, hi = 0.0, mean = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const double v = uniform01(splitmix64(i));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v / 10000.0;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("largest singular value of 2x2 against the characteristic polynomial") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
      const double p = g(rng), q = g(rng), r = g(rng), s = g(rng);
      // eigenvalues of A^t A
      const double m00 = p * p + r * r, m01 = p * q + r * s, m11 = q * q + s * s;
      const double tr = m00 + m11, det = m00 * m11 - m01 * m01;
      const double top = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
      CHECK(sigma_max_2x2(p, q, r, s) == doctest::Approx(std::sqrt(top)).epsilon(1e-12));
    }
  }

  TEST_CASE("grids") {
    const auto lin = linear_grid(0.0, 1.0, 5).values();
    REQUIRE(lin.size() == 5);
    CHECK(lin[2] == doctest::Approx(0.5));
    const auto lg = log_grid(4.0, 64.0, 3).values();
    CHECK(lg[0] == 4.0);
    CHECK(lg[1] == 16.0);
    CHECK(lg[2] == 64.0);
    CHECK(log_grid(1e-1, 1e-3, 3).decades() == doctest::Approx(2.0));
    CHECK(Grid{3.0, 3.0, 1}.values() == std::vector<double>{3.0});
  }

  TEST_CASE("fit_slope recovers a line") {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(i);
      y.push_back(2.5 * i - 1.0);
    }
    CHECK(fit_slope(x, y) == doctest::Approx(2.5));
  }

  TEST_CASE("parallel_for touches every index once regardless of threads") {
    for (int threads : {1, 2, 4}) {
      std::vector<int> hits(1000, 0);
      parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
      for (int h : hits) CHECK(h == 1);
    }
  }

  TEST_CASE("interval unions") {
    const IntervalUnion u({{0.0, 1.0}, {2.0, 3.0}});
    CHECK(u.contains(0.5));
    CHECK(u.contains(3.0));
    CHECK_FALSE(u.contains(1.5));
    CHECK(IntervalUnion::real_line().contains(1e300));
    CHECK(IntervalUnion::empty().is_empty());
    CHECK_FALSE(IntervalUnion::empty().contains(0.0));
  }

  TEST_CASE("error kinds") {
    CHECK(std::string(to_string(ErrorKind::resource)) == "resource");
    const ResourceError e("cap", 3, 4);
    CHECK(e.kind() == ErrorKind::resource);
    CHECK(e.bracket_hi == 4);
  }
}

TEST_CASE("overlapping intervals merge" * doctest::test_suite("numeric")) {
  const IntervalUnion u({{2.0, 3.0}, {0.0, 1.0}, {0.5, 2.5}});
  REQUIRE(u.parts().size() == 1);
  CHECK(u.parts()[0].first == 0.0);
  CHECK(u.parts()[0].second == 3.0);
  CHECK_THROWS_AS(IntervalUnion({{1.0, 0.0}}), ValidationError);
}
