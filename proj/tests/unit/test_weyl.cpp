#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "wavebound/errors.hpp"
#include "wavebound/weyl.hpp"

using namespace wavebound;

namespace {

cplx free_g(cplx z) {
  // root of g^2 + z g + 1 = 0 with Im g > 0
  const cplx s = std::sqrt(z * z - 4.0);
  cplx g = 0.5 * (-z + s);
  if (g.imag() <= 0.0) g = 0.5 * (-z - s);
  return g;
}

// <(H - z)^{-1} delta_1, delta_n> on the window [lo, hi] by dense LU.
Eigen::VectorXcd dense_column(const JacobiOperator& op, cplx z, long lo, long hi) {
  const long n = hi - lo + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    m(i, i) = op.b(lo + i) - z;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = op.a(lo + i);
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(1 - lo) = 1.0;
  return m.partialPivLu().solve(rhs);
}

}  // namespace

TEST_SUITE("weyl") {
  TEST_CASE("free m-function has the closed form") {
    const JacobiOperator op = build_operator(free_spec());
    for (cplx z : {cplx(0.3, 0.1), cplx(-1.7, 0.01), cplx(2.5, 0.5), cplx(0.0, 2.0)}) {
      const MFunctionValue m = m_plus(op, z);
      CHECK(std::abs(m.m_plus - free_g(z)) < 1e-9);
    }
  }

  TEST_CASE("m_+ is Herglotz") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> x(-6, 6), y(-3, 1);
    const JacobiOperator op = build_operator(random_spec(3.0, 2));
    for (int i = 0; i < 40; ++i) {
      const cplx z(x(rng), std::pow(10.0, y(rng)));
      CHECK(m_plus(op, z).m_plus.imag() > 0.0);
    }
    CHECK_THROWS_AS(m_plus(op, cplx(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(m_plus(op, cplx(0.0, -1.0)), DomainError);
  }

  TEST_CASE("boundary coupling scales m_+") {
    OperatorSpec s = fibonacci_spec(2.0);
    const cplx z(0.4, 0.05);
    const cplx m1 = m_plus(build_operator(s), z).m_plus;
    s.boundary_coupling = 0.5;
    const cplx m2 = m_plus(build_operator(s), z).m_plus;
    CHECK(std::abs(m2 - 0.5 * m1) < 1e-9);
  }

  TEST_CASE("finite operator m_+ equals the atomic Stieltjes transform") {
    const JacobiOperator op = build_operator(random_spec(2.0, 4)).truncated(60);
    const SpectralAtoms at = spectral_measure_atoms(op, 60);
    CHECK(at.total() == doctest::Approx(1.0).epsilon(1e-13));
    for (cplx z : {cplx(0.1, 0.01), cplx(1.5, 0.3)}) CHECK(std::abs(m_plus(op, z).m_plus - at.stieltjes(z)) < 1e-10);
  }

  TEST_CASE("weyl solution solves the equation and has norm Im m / Im z") {
    const JacobiOperator op = build_operator(random_spec(2.0, 6));
    const cplx z(0.35, 0.2);
    const WeylSolution w = weyl_solution(op, z, 400);
    const cplx m = m_plus(op, z).m_plus;
    CHECK(w.u[0] == cplx(1.0, 0.0));
    CHECK(std::abs(w.u[1] + m) < 1e-9);
    for (long n = 1; n < 399; ++n) {
      const auto i = static_cast<std::size_t>(n);
      const cplx lhs = op.a(n) * w.u[i + 1] + op.a(n - 1) * w.u[i - 1] + op.b(n) * w.u[i];
      CHECK(std::abs(lhs - z * w.u[i]) < 1e-9 * std::max(1.0, std::abs(w.u[i])));
    }
    double s = 0.0;
    for (long n = 1; n <= 400; ++n) s += std::norm(w.u[static_cast<std::size_t>(n)]);
    CHECK(s == doctest::Approx(m.imag() / z.imag()).epsilon(1e-8));
  }

  TEST_CASE("whole-line M against a dense solve") {
    const JacobiOperator op = build_operator(random_spec(2.5, 13, Side::whole_line));
    for (cplx z : {cplx(0.2, 0.3), cplx(-1.1, 0.5)}) {
      const MFunctionValue v = m_plus(op, z);
      REQUIRE(v.whole_line);
      const Eigen::VectorXcd col = dense_column(op, z, -250, 250);
      const cplx direct = col(1 + 250);
      CHECK(std::abs(v.M - direct) < 1e-9);
      CHECK(std::abs(assemble_M(v.m_plus, v.m_minus, op.a(0)) - v.M) < 1e-12 * std::abs(v.M));
      CHECK(v.M.imag() > 0.0);
      const GreenRow g = green_row(op, z, 10, 12);
      CHECK(g.formula_deviation < 1e-8);
      for (long n = -11; n <= 13; ++n) CHECK(std::abs(g.at(n) - col(n + 250)) < 1e-9);
    }
  }

  TEST_CASE("spectral atoms of a whole-line window sum to one") {
    const JacobiOperator op = build_operator(fibonacci_spec(3.0, Side::whole_line));
    const SpectralAtoms at = spectral_measure_atoms(op, 200);
    CHECK(at.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(at.mass(IntervalUnion::real_line()) == doctest::Approx(1.0).epsilon(1e-12));
    const auto [lo, hi] = op.spectral_bounds();
    for (double e : at.energies) {
      CHECK(e >= lo);
      CHECK(e <= hi);
    }
  }

  TEST_CASE("spectral decomposition rows are eigenvectors") {
    const JacobiOperator op = build_operator(random_spec(1.0, 3));
    const SpectralDecomposition d = spectral_decomposition(op, 80, 10);
    for (long j = 0; j < 80; j += 7) {
      const double E = d.atoms.energies[static_cast<std::size_t>(j)];
      CHECK(d.component(1, j) * d.component(1, j) == doctest::Approx(d.atoms.weights[static_cast<std::size_t>(j)]));
      for (long n = 1; n < 10; ++n) {
        const double prev = n > 1 ? op.a(n - 1) * d.component(n - 1, j) : 0.0;
        const double lhs = op.a(n) * d.component(n + 1, j) + prev + op.b(n) * d.component(n, j);
        CHECK(lhs == doctest::Approx(E * d.component(n, j)).scale(1.0).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("mainm inequalities hold on sample energies") {
    for (const OperatorSpec& s : {free_spec(), random_spec(2.0, 1), fibonacci_spec(5.0)}) {
      const JacobiOperator op = build_operator(s);
      for (double E : {-1.0, 0.3, 1.2})
        for (double eps : {1e-1, 1e-2}) {
          const MainmReport r = verify_mainm(op, E, eps);
          CHECK(r.ratio >= 2.0 - std::sqrt(3.0) - 1e-8);
          CHECK(r.ratio <= 2.0 + std::sqrt(3.0) + 1e-8);
          CHECK(r.betam_left_ok);
          CHECK(r.betam_right_ok);
          CHECK(r.all_ok);
        }
    }
  }
}
