#include <doctest.h>

#include <cmath>

#include "wavebound/errors.hpp"
#include "wavebound/multidim.hpp"

using namespace wavebound;

TEST_SUITE("multidim") {
  TEST_CASE("lattice indexing and radii") {
    const Lattice lat = make_lattice(3, 4, free_potential());
    CHECK(lat.size() == 9u * 9u * 9u);
    CHECK(lat.coords(lat.origin()) == std::vector<long>{0, 0, 0});
    for (std::size_t i = 0; i < lat.size(); i += 7) {
      const std::vector<long> c = lat.coords(i);
      CHECK(lat.index(c) == i);
      CHECK(lat.radius(i) == std::labs(c[0]) + std::labs(c[1]) + std::labs(c[2]));
    }
    CHECK(lat.spectral_radius_bound() == 6.0);
  }

  TEST_CASE("apply is the nearest-neighbour sum plus potential") {
    const Lattice lat = make_lattice(2, 5, random_potential(2.0, 3));
    std::vector<double> x(lat.size()), y;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * static_cast<double>(i));
    lat.apply(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const std::vector<long> c = lat.coords(i);
      double s = lat.potential(i) * x[i];
      for (int d = 0; d < 2; ++d)
        for (long step : {-1L, 1L}) {
          std::vector<long> n = c;
          n[static_cast<std::size_t>(d)] += step;
          if (std::labs(n[static_cast<std::size_t>(d)]) <= 5) s += x[lat.index(n)];
        }
      CHECK(y[i] == doctest::Approx(s).epsilon(1e-14).scale(1.0));
    }
  }

  TEST_CASE("random potential is keyed by coordinates") {
    const PotentialFn v = random_potential(4.0, 11);
    CHECK(v({1, 2}) == v({1, 2}));
    CHECK(v({1, 2}) != v({2, 1}));
    CHECK(random_potential(4.0, 12)({1, 2}) != v({1, 2}));
    const Lattice big = make_lattice(2, 8, v);
    const Lattice small = big.sub_box(3);
    CHECK(small.extent() == 3);
    for (std::size_t i = 0; i < small.size(); ++i) {
      const std::vector<long> c = small.coords(i);
      CHECK(small.potential(i) == big.potential(big.index(c)));
      CHECK(std::fabs(small.potential(i)) <= 2.0);
    }
  }

  TEST_CASE("free lanczos coefficients") {
    for (int dim : {1, 2, 3}) {
      const Lattice lat = make_lattice(dim, 14, free_potential());
      const LanczosBasis b = lanczos_tridiag(lat, 10);
      CHECK(b.b[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
      CHECK(b.a[0] == doctest::Approx(std::sqrt(2.0 * dim)).epsilon(1e-12));
      CHECK(b.jacobi.family() == Family::lanczos);
      CHECK(b.max_orthonormality_error() < 1e-12);
    }
    // one dimension: delta_0 has the even free chain with a(1) = sqrt 2
    const LanczosBasis one = lanczos_tridiag(make_lattice(1, 30, free_potential()), 20);
    for (std::size_t n = 1; n < one.a.size(); ++n) CHECK(one.a[n] == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("lanczos basis support, moments and orthonormality on a random lattice") {
    const Lattice lat = make_lattice(2, 30, random_potential(3.0, 5));
    const LanczosBasis b = lanczos_tridiag(lat, 25);
    for (std::size_t n = 0; n < b.basis_support_radii.size(); ++n)
      CHECK(b.basis_support_radii[n] <= static_cast<long>(n));
    const std::vector<double> m1 = lattice_moments(lat, 20);
    const std::vector<double> m2 = jacobi_moments(b.jacobi, static_cast<long>(b.b.size()), 20);
    for (int n = 0; n <= 20; ++n)
      CHECK(std::fabs(m1[static_cast<std::size_t>(n)] - m2[static_cast<std::size_t>(n)]) <=
            1e-8 * std::max(1.0, std::fabs(m1[static_cast<std::size_t>(n)])));
    CHECK(b.max_orthonormality_error() < 1e-10);
    CHECK_THROWS_AS(lanczos_tridiag(lat, 40), DomainError);
  }

  TEST_CASE("one-dimensional lattice profile equals the whole-line profile") {
    const double T = 2.0;
    const long extent = mdhld_required_extent(2.0, T);
    const Lattice lat = make_lattice(1, extent, free_potential());
    const std::vector<double> Ls = {0.0, 1.0, 3.0, 6.0};
    const LatticeProfile p = lattice_profile(lat, T, Ls);
    CHECK(p.total == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(p.unitarity_drift < 1e-10);
    const JacobiOperator op = build_operator(free_spec(Side::whole_line));
    std::vector<std::pair<double, double>> w;
    for (double L : Ls) {
      const double r = std::floor(L + 1.0);
      w.push_back({r - 1.0, r + 1.0});
    }
    const WholeLineProfile q = profile_resolvent_whole(op, T, w);
    for (std::size_t k = 0; k < Ls.size(); ++k) CHECK(std::fabs(p.values[k] - q.values[k]) < 1e-5);
  }

  TEST_CASE("mdhld structural inequality at small T") {
    const double T = 2.0;
    const long extent = mdhld_required_extent(4.0, T);
    const Lattice lat = make_lattice(2, extent, free_potential());
    MdhldOptions o;
    o.lanczos_size = 30;
    const std::vector<MdhldReport> rs = mdhld_sweep(lat, T, {1.5, 2.0, 4.0, 8.0}, o);
    for (const MdhldReport& r : rs) {
      CHECK(r.structural_ok);
      CHECK(r.bound.lhs >= r.half_line_profile - r.drift_budget);
      CHECK(r.bound.lhs <= 1.0 + 1e-9);
      CHECK(r.unitarity_drift < 1e-10);
    }
    CHECK_THROWS_AS(mdhld_check(make_lattice(2, 10, free_potential()), T, 2.0, o), DomainError);
  }
}
