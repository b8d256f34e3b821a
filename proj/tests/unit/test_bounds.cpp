#include <doctest.h>

#include <cmath>

#include "wavebound/dynamics.hpp"
#include "wavebound/errors.hpp"

using namespace wavebound;

TEST_SUITE("bounds") {
  TEST_CASE("atom scales are the length scales at atom energies") {
    const JacobiOperator op = build_operator(fibonacci_spec(5.0));
    const SpectralAtoms at = spectral_measure_atoms(op, 200);
    const std::vector<double> sc = atom_scales(op, at, 30.0, ScaleKind::solution, ScaleSide::plus);
    for (std::size_t j = 0; j < sc.size(); j += 37)
      CHECK(sc[j] == doctest::Approx(length_scale(op, at.energies[j], 1.0 / 30.0).L).epsilon(1e-12));
  }

  TEST_CASE("hld: measure and profile grow with L and the ratio stays positive") {
    const JacobiOperator op = build_operator(fibonacci_spec(5.0));
    HldOptions o;
    o.atoms = 400;
    double prev_mu = 0.0, prev_lhs = 0.0;
    for (double L : {2.0, 5.0, 12.0, 30.0, 80.0}) {
      const BoundReport r = hld_bound(op, 40.0, L, o);
      CHECK(r.mu_S >= prev_mu);
      CHECK(r.lhs >= prev_lhs - 1e-9);
      CHECK(r.mu_S <= 1.0 + 1e-12);
      if (r.mu_S > 0.01) CHECK(r.ratio > 0.0);
      CHECK_FALSE(r.metadata.empty());
      prev_mu = r.mu_S;
      prev_lhs = r.lhs;
    }
    CHECK_THROWS_AS(hld_bound(op, 40.0, 1.0, o), ValidationError);
    CHECK_THROWS_AS(hld_bound(build_operator(free_spec(Side::whole_line)), 4.0, 4.0, o), DomainError);
  }

  TEST_CASE("hld on the whole line") {
    const JacobiOperator op = build_operator(random_spec(1.0, 3, Side::whole_line));
    HldOptions o;
    o.atoms = 300;
    const BoundReport r = hld_bound_whole(op, 10.0, 30.0, 30.0, o);
    CHECK(r.mu_S > 0.5);
    CHECK(r.ratio > 0.0);
    CHECK(r.lhs <= 1.0 + 1e-6);
  }

  TEST_CASE("hld sweep reports stability") {
    const JacobiOperator op = build_operator(fibonacci_spec(5.0));
    HldOptions o;
    o.atoms = 300;
    const HldSweep s = hld_sweep(op, {20.0, 80.0}, {0.25, 0.5, 0.75}, o);
    CHECK(s.reports.size() == 6);
    CHECK(s.min_ratio_per_T.size() == 2);
    CHECK(s.positive);
    CHECK(s.stability >= 1.0);
    CHECK(s.min_ratio > 0.0);
  }

  TEST_CASE("ldb: projected mass bounds and full projection") {
    const JacobiOperator op = build_operator(free_spec());
    LdbOptions o;
    o.atoms = 300;
    const LdbReport r = ldb_bound(op, IntervalUnion::interval(-1.0, 1.0), 10.0, 8.0, o);
    CHECK(r.mu_S > 0.0);
    CHECK(r.lhs <= r.mu_S + 1e-10);
    CHECK(r.rhs > 0.0);
    CHECK(r.ratio > 0.0);
    const LdbReport all = ldb_bound(op, IntervalUnion::real_line(), 10.0, 290.0, o);
    CHECK(all.mu_S == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all.lhs == doctest::Approx(1.0).epsilon(1e-6));
    const LdbReport none = ldb_bound(op, IntervalUnion::interval(5.0, 6.0), 10.0, 8.0, o);
    CHECK(none.atoms_in_S == 0);
    CHECK(none.lhs == 0.0);
  }

  TEST_CASE("pb bound: admissible C form an initial segment") {
    const JacobiOperator op = build_operator(fibonacci_spec(5.0));
    const SpectralDecomposition dec = spectral_decomposition(op, 200, 200);
    std::vector<double> eta(dec.atoms.energies.size(), 1.0);
    const std::vector<double> Cs = {0.01, 0.1, 1.0, 10.0, 30.0};
    const PbReport r = pb_bound(dec, eta, 0.5, 0.05, {10.0, 40.0}, Cs);
    CHECK(r.mu_eta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(0.05).epsilon(1e-9));
    for (const auto& row : r.lhs)
      for (std::size_t c = 1; c < row.size(); ++c) CHECK(row[c] >= row[c - 1] - 1e-12);
    if (r.satisfied) {
      for (std::size_t i = 0; i < r.T.size(); ++i)
        for (std::size_t c = 0; c < Cs.size() && Cs[c] <= r.C_g; ++c) CHECK(r.lhs[i][c] <= r.rhs);
    }
    CHECK(r.satisfied == (r.C_g > 0.0));
  }

  TEST_CASE("pb exponents of the free operator") {
    const JacobiOperator op = build_operator(free_spec());
    const SpectralAtoms at = spectral_measure_atoms(op, 20000);
    const std::vector<PbEstimate> e = pb_exponents(op, at, {0.0, 1.0}, log_grid(1.0, 1e-3, 7), log_grid(10.0, 1e4, 7));
    REQUIRE(e.size() == 2);
    for (const PbEstimate& p : e) {
      // absolutely continuous measure and bounded solutions
      REQUIRE(p.alpha_ok);
      REQUIRE(p.gamma_ok);
      CHECK(p.alpha == doctest::Approx(1.0).epsilon(0.1));
      CHECK(p.gamma == doctest::Approx(1.0).epsilon(0.1));
    }
  }
}
