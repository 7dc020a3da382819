#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rpde/basis.hpp"
#include "rpde/error.hpp"

using namespace rpde;

TEST_CASE("bspline_eval spot values") {
  CHECK(bspline_eval(0, 0.2) == 1.0);
  CHECK(bspline_eval(1, 0.881) == doctest::Approx(0.119).epsilon(1e-12));
  CHECK(bspline_eval(3, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(bspline_eval(3, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(bspline_eval(3, 2.1) == 0.0);
  CHECK(bspline_eval(3, -2.0) == 0.0);
}

TEST_CASE("degree zero uses the half-open box") {
  CHECK(bspline_eval(0, -0.5) == 1.0);
  CHECK(bspline_eval(0, 0.5) == 0.0);
  CHECK(bspline_eval(0, 0.4999999) == 1.0);
}

TEST_CASE("bspline_eval matches Cox-de Boor and truncated powers") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-4.5, 4.5);
  for (int m = 0; m <= 7; ++m) {
    for (int i = 0; i < 400; ++i) {
      const double x = u(gen);
      const double expected = oracle::centered_bspline(m, x);
      CHECK(std::abs(bspline_eval(m, x) - expected) < 1e-13);
      if (m >= 1) CHECK(std::abs(oracle::bspline_truncated_power(m, x) - expected) < 1e-11);
    }
  }
}

TEST_CASE("partition of unity, symmetry and unit mass") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int m = 0; m <= 3; ++m) {
    for (int i = 0; i < 1000; ++i) {
      const double x = u(gen);
      double s = 0.0;
      for (long k = -10; k <= 10; ++k) s += bspline_eval(m, x - static_cast<double>(k));
      CHECK(std::abs(s - 1.0) < 1e-12);
      if (std::abs(std::abs(x) - 0.5) > 1e-12 || m > 0) {
        CHECK(std::abs(bspline_eval(m, x) - bspline_eval(m, -x)) < 1e-15);
      }
    }
    const double r = 0.5 * (m + 1);
    // Knots on the half-integer lattice for even degree, integer lattice for odd.
    const double mass = oracle::piecewise_simpson([m](double x) { return bspline_eval(m, x); }, -r,
                                                  r, 1.0, (m % 2) ? 0.0 : 0.5, 200);
    CHECK(std::abs(mass - 1.0) < 1e-10);
  }
}

TEST_CASE("scaled_basis_eval") {
  CHECK(scaled_basis_eval({1, 1.0}, 2, 2.058) == doctest::Approx(0.942).epsilon(1e-12));
  CHECK(scaled_basis_eval({0, 1.0}, 3, 3.0) == 1.0);
  CHECK(scaled_basis_eval({3, 0.9}, 0, 0.0) ==
        doctest::Approx(std::sqrt(1.0 / 0.9) * 2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("BasisSpec validation") {
  CHECK_THROWS_AS((BasisSpec{-1, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BasisSpec{1, 0.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BasisSpec{1, -0.3}.validate()), InvalidArgument);
  CHECK_THROWS_AS((BasisSpec{1, std::nan("")}.validate()), InvalidArgument);
  CHECK_NOTHROW((BasisSpec{0, 0.1}.validate()));
}

TEST_CASE("CoefficientVector windowing") {
  CoefficientVector c(-2, {0.0, 1.0, 2.0, 0.0});
  CHECK(c.first() == -2);
  CHECK(c.last() == 1);
  CHECK(c.at(-3) == 0.0);
  CHECK(c.at(-1) == 1.0);
  CHECK(c.at(5) == 0.0);
  CHECK(c.sum() == 3.0);
  const auto t = c.trimmed();
  CHECK(t.first() == -1);
  CHECK(t.size() == 2);
  CHECK_THROWS_AS(CoefficientVector(0, {}), InvalidArgument);
  CHECK(CoefficientVector(0, {0.0, 0.0}).trimmed().size() == 1);
}

TEST_CASE("correlation_sequence against quadrature and closed-form oracles") {
  SUBCASE("box autocorrelation") {
    const auto r = correlation_sequence({0, 1.0}, {0, 1.0});
    CHECK(r.first() == 0);
    CHECK(r.size() == 1);
    CHECK(std::abs(r[0] - 1.0) < 1e-12);
  }
  SUBCASE("linear") {
    const auto r = correlation_sequence({1, 1.0}, {1, 1.0});
    REQUIRE(r.first() == -1);
    REQUIRE(r.last() == 1);
    CHECK(std::abs(r[-1] - 1.0 / 6.0) < 1e-10);
    CHECK(std::abs(r[0] - 2.0 / 3.0) < 1e-10);
    CHECK(std::abs(r[1] - 1.0 / 6.0) < 1e-10);
  }
  SUBCASE("cubic equals beta^7 at the integers") {
    const auto r = correlation_sequence({3, 0.9}, {3, 0.9});
    REQUIRE(r.first() == -3);
    REQUIRE(r.last() == 3);
    const double expected[] = {1, 120, 1191, 2416, 1191, 120, 1};
    for (long k = -3; k <= 3; ++k) {
      const double quad = oracle::piecewise_simpson(
          [k](double x) { return oracle::centered_bspline(3, x) * oracle::centered_bspline(3, x - k); },
          -2.0, 2.0, 1.0, 0.0, 400);
      CHECK(std::abs(quad - expected[k + 3] / 5040.0) < 1e-10);
      CHECK(std::abs(r[k] - quad) < 1e-10);
      CHECK(std::abs(r[k] - oracle::bspline_truncated_power(7, static_cast<double>(k))) < 1e-12);
    }
  }
  SUBCASE("mixed degrees") {
    const auto r = correlation_sequence({0, 1.0}, {1, 1.0});
    CHECK(std::abs(r.at(1) - 0.125) < 1e-12);
    CHECK(std::abs(r.at(0) - 0.75) < 1e-12);
    CHECK(std::abs(r.at(-1) - 0.125) < 1e-12);
  }
  SUBCASE("sums to one and independent of the step") {
    for (int ma = 0; ma <= 3; ++ma) {
      for (int ms = 0; ms <= 3; ++ms) {
        const auto a = correlation_sequence({ma, 0.5}, {ms, 0.5});
        const auto b = correlation_sequence({ma, 2.0}, {ms, 2.0});
        CHECK(std::abs(a.sum() - 1.0) < 1e-12);
        REQUIRE(a.range() == b.range());
        for (long k = a.first(); k <= a.last(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-14);
      }
    }
  }
  CHECK_THROWS_AS(correlation_sequence({3, 1.0}, {3, 0.9}), InvalidArgument);
}

TEST_CASE("sampled_synthesis_filter") {
  const auto box = sampled_synthesis_filter({0, 1.0}, 1);
  CHECK(box.first() == 0);
  CHECK(box.size() == 1);
  CHECK(box[0] == 1.0);

  const auto hat = sampled_synthesis_filter({1, 1.0}, 2);
  REQUIRE(hat.first() == -1);
  REQUIRE(hat.last() == 1);
  CHECK(hat[-1] == 0.5);
  CHECK(hat[0] == 1.0);
  CHECK(hat[1] == 0.5);

  const auto cubic = sampled_synthesis_filter({3, 0.9}, 10);
  CHECK(cubic.first() == -19);
  CHECK(cubic.last() == 19);
  CHECK(std::abs(cubic[5] - 0.47916666666666667) < 1e-15);
  for (long k = cubic.first(); k <= cubic.last(); ++k) {
    CHECK(std::abs(cubic[k] - oracle::centered_bspline(3, k / 10.0)) < 1e-14);
    CHECK(cubic[k] > 0.0);
  }
  CHECK_THROWS_AS(sampled_synthesis_filter({3, 1.0}, 0), InvalidArgument);
}

TEST_CASE("active_indices covers the nonzero responses") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int m = 0; m <= 3; ++m) {
    for (int i = 0; i < 500; ++i) {
      const double t = u(gen);
      const auto active = active_indices(m, t);
      for (long k = active.first - 3; k <= active.last + 3; ++k) {
        if (!active.contains(k)) CHECK(bspline_eval(m, t - static_cast<double>(k)) == 0.0);
      }
      CHECK(static_cast<int>(active.size()) <= m + 1);
    }
  }
}
