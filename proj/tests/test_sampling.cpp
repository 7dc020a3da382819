#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rpde/error.hpp"
#include "rpde/sampling.hpp"

using namespace rpde;

namespace {

const std::vector<double> kGoldenSamples{3.22397672, 2.88117377, 1.74794259, 2.76028579, 2.05813019};

std::vector<double> normal_samples(std::size_t n, unsigned seed, double mean = 0.0, double sd = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(mean, sd);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

// <phi^a_k, f> by Simpson quadrature over the support of phi^a_k, split at
// the knots of both factors.
double inner_product(const BasisSpec& spec, long k, const std::function<double(double)>& f,
                     int panels = 64) {
  const double h = spec.step;
  const double r = spec.support_radius();
  const double offset = (spec.degree % 2) ? 0.0 : 0.5 * h;
  return oracle::piecewise_simpson(
      [&](double x) { return oracle::centered_bspline(spec.degree, x / h - k) / std::sqrt(h) * f(x); },
      (k - r) * h, (k + r) * h, h, offset, panels);
}

}  // namespace

TEST_CASE("measure reproduces golden box and hat measurements") {
  const SampleSet samples(kGoldenSamples);
  const auto box = measure(samples, {0, 1.0}, {1, 4});
  const double box_expected[] = {0.0, 0.4, 0.6, 0.0};
  for (long k = 1; k <= 4; ++k) CHECK(std::abs(box[k] - box_expected[k - 1]) < 1e-12);

  const auto hat = measure(samples, {1, 1.0}, {0, 5});
  const double hat_expected[] = {0.050411482, 0.409670568, 0.495122606, 0.044795344};
  for (long k = 1; k <= 4; ++k) CHECK(std::abs(hat[k] - hat_expected[k - 1]) < 1e-8);
  CHECK(hat[0] == 0.0);
  CHECK(hat[5] == 0.0);
}

TEST_CASE("measure edge cases") {
  for (int m = 0; m <= 3; ++m) {
    const auto c = measure(SampleSet({0.0}), {m, 1.0}, {-3, 3});
    CHECK(c[0] == doctest::Approx(bspline_eval(m, 0.0)));
    CHECK(std::abs(c.sum() - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(measure(SampleSet(kGoldenSamples), {1, 1.0}, {2, 4}), TruncationError);
  CHECK_THROWS_AS(SampleSet({}), InvalidArgument);
  CHECK_THROWS_AS(SampleSet({1.0, std::nan("")}), InvalidArgument);
  // A box sample sitting on a bin edge belongs to the bin on its right.
  const auto edge = measure(SampleSet({0.5}), {0, 1.0}, {-1, 2});
  CHECK(edge[1] == 1.0);
  CHECK(edge[0] == 0.0);
}

TEST_CASE("choose_window") {
  CHECK(choose_window(SampleSet({0.0}), {3, 1.0}, 0) == IndexRange{-2, 2});
  CHECK(choose_window(SampleSet(kGoldenSamples), {1, 1.0}, 0) == IndexRange{0, 5});
  CHECK(choose_window(SampleSet({-3.0, 0.1, 3.0}), {3, 0.9}, 2) == IndexRange{-8, 8});
  CHECK(choose_window(SampleSet({-1.0, 1.0}), {3, 0.9}, 2) == IndexRange{-6, 6});
  CHECK_THROWS_AS(choose_window(SampleSet({0.0}), {3, 1.0}, -1), InvalidArgument);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const SampleSet s({u(gen), u(gen), u(gen)});
    for (int m = 0; m <= 3; ++m) {
      const BasisSpec spec{m, 0.3 + 0.01 * trial};
      CHECK_NOTHROW(measure(s, spec, choose_window(s, spec, 0)));
    }
  }
}

TEST_CASE("correction_filter_apply") {
  SUBCASE("identity filter") {
    const CoefficientVector c_a(-2, {0.1, 0.5, 0.2, 0.0, 0.3});
    const auto c_s = correction_filter_apply(CoefficientVector(0, {1.0}), c_a);
    for (long k = -2; k <= 2; ++k) CHECK(c_s[k] == c_a[k]);
  }
  SUBCASE("hat correlation against a dense solve") {
    const CoefficientVector r(-1, {1.0 / 6, 2.0 / 3, 1.0 / 6});
    CoefficientVector c_a = CoefficientVector::zeros({-20, 20});
    c_a[0] = 1.0;
    const auto c_s = correction_filter_apply(r, c_a);
    const auto dense = oracle::dense_toeplitz_solve([&](long d) { return r.at(d); },
                                                    {c_a.values().begin(), c_a.values().end()});
    for (long k = -20; k <= 20; ++k) {
      CHECK(std::abs(c_s[k] - dense[static_cast<std::size_t>(k + 20)]) < 1e-12);
      const double conv = r.at(-1) * c_s.at(k + 1) + r.at(0) * c_s.at(k) + r.at(1) * c_s.at(k - 1);
      CHECK(std::abs(conv - c_a[k]) < 1e-10);
    }
    // Inverse of the hat correlation: sqrt(3) times (sqrt(3) - 2)^|k| on Z.
    CHECK(std::abs(c_s[0] - std::sqrt(3.0)) < 1e-10);
    CHECK(c_s[1] < 0.0);
  }
  SUBCASE("sum is preserved on a wide window") {
    const auto r = correlation_sequence({3, 1.0}, {3, 1.0});
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      CoefficientVector c_a = CoefficientVector::zeros({-40, 40});
      for (long k = -5; k <= 5; ++k) c_a[k] = u(gen);
      const auto c_s = correction_filter_apply(r, c_a);
      CHECK(std::abs(c_s.sum() - c_a.sum()) < 1e-9);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(correction_filter_apply(CoefficientVector(-1, {0.1, 0.9, 0.0}),
                                            CoefficientVector(0, {1.0, 2.0})),
                    InvalidArgument);
    try {
      correction_filter_apply(CoefficientVector(-1, {0.5, 0.0, 0.5}), CoefficientVector(0, {1.0, 2.0, 3.0}));
      FAIL("expected SolverFailure");
    } catch (const SolverFailure& e) {
      CHECK(e.condition() > 1e12);
    }
  }
}

TEST_CASE("toeplitz condition estimate") {
  const auto r = correlation_sequence({3, 1.0}, {3, 1.0});
  // Response ranges from 1 at w = 0 down to 272/5040 at w = pi.
  CHECK(std::abs(toeplitz_condition_estimate(r) - 5040.0 / 272.0) < 1e-9);
  CHECK(toeplitz_condition_estimate(CoefficientVector(0, {1.0})) == 1.0);
}

TEST_CASE("evaluate") {
  const BasisSpec cubic{3, 0.7};
  const DensityEstimate zero(cubic, CoefficientVector::zeros({-3, 3}));
  for (double x : {-3.0, 0.0, 0.1, 2.2}) CHECK(zero(x) == 0.0);

  const DensityEstimate box({0, 1.0}, CoefficientVector(0, {1.0}));
  CHECK(box(-0.5) == 1.0);
  CHECK(box(0.3) == 1.0);
  CHECK(box(0.5) == 0.0);
  CHECK(box(-0.51) == 0.0);

  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> values(12);
  for (auto& v : values) v = u(gen);
  const DensityEstimate est(cubic, CoefficientVector(-4, values));
  const double samples[] = {1.0 / 6, 2.0 / 3, 1.0 / 6};
  for (long k = -6; k <= 9; ++k) {
    double conv = 0.0;
    for (long j = -1; j <= 1; ++j) {
      const long idx = k - j;
      if (idx >= -4 && idx < 8) conv += values[static_cast<std::size_t>(idx + 4)] * samples[j + 1];
    }
    const double x = k * cubic.step;
    CHECK(std::abs(est(x) - conv / std::sqrt(cubic.step)) < 1e-14);
  }
  const std::vector<double> xs{-1.0, 0.0, 0.35};
  const auto ys = evaluate(est, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ys[i] == est(xs[i]));

  const auto [lo, hi] = est.support();
  CHECK(std::abs(lo - (-6.0 * 0.7)) < 1e-14);
  CHECK(std::abs(hi - (9.0 * 0.7)) < 1e-14);
  CHECK(est(lo - 1e-9) == 0.0);
  CHECK(est(hi + 1e-9) == 0.0);
}

TEST_CASE("degree-zero projection is the normalized histogram") {
  const auto xs = normal_samples(200, 1);
  const double h = 0.4;
  const auto est = project_unconstrained(SampleSet(xs), {0, h});
  for (long k = -12; k <= 12; ++k) {
    int count = 0;
    for (double x : xs) count += (x >= (k - 0.5) * h && x < (k + 0.5) * h) ? 1 : 0;
    CHECK(std::abs(est(k * h) - count / (200.0 * h)) < 1e-12);
  }
  CHECK(std::abs(est.integral() - 1.0) < 1e-12);
}

TEST_CASE("cubic projection of normal samples can go negative") {
  int negative = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto est = project_unconstrained(SampleSet(normal_samples(100, seed)), {3, 0.9});
    double lowest = 0.0;
    const auto [lo, hi] = est.support();
    for (double x = lo; x <= hi; x += 0.01) lowest = std::min(lowest, est(x));
    negative += lowest < 0.0 ? 1 : 0;
  }
  CHECK(negative > 0);
}

TEST_CASE("consistency: re-measuring the estimate reproduces the measurements") {
  for (int m : {1, 3}) {
    for (unsigned seed = 0; seed < 4; ++seed) {
      const BasisSpec spec{m, 0.6 + 0.2 * seed};
      const auto fit = fit_unconstrained(SampleSet(normal_samples(30, 100 + seed)), spec);
      const auto& est = fit.estimate;
      for (long k = fit.window.first; k <= fit.window.last; ++k) {
        const double ip = inner_product(spec, k, [&](double x) { return est(x); });
        CHECK(std::abs(ip - fit.measurements[k]) < 1e-7);
      }
    }
  }
}

TEST_CASE("single sample with hat basis is a consistent interpolation") {
  const BasisSpec spec{1, 1.0};
  const auto fit = fit_unconstrained(SampleSet({0.0}), spec);
  CHECK(fit.measurements[0] == 1.0);
  for (long k = fit.window.first; k <= fit.window.last; ++k) {
    const double ip = inner_product(spec, k, [&](double x) { return fit.estimate(x); });
    CHECK(std::abs(ip - fit.measurements[k]) < 1e-9);
  }
}

TEST_CASE("mass conservation") {
  for (int margin : {2, 4}) {
    for (int m = 0; m <= 3; ++m) {
      for (unsigned seed = 0; seed < 25; ++seed) {
        const double h = 0.5 + 0.05 * seed;
        const auto est = project_unconstrained(SampleSet(normal_samples(100, 1000 + seed)), {m, h}, margin);
        CHECK(std::abs(est.integral() - 1.0) < 1e-6);
        const auto fit = fit_unconstrained(SampleSet(normal_samples(100, 1000 + seed)), {m, h}, margin);
        CHECK(fit.window.first <= choose_window(SampleSet(normal_samples(100, 1000 + seed)), {m, h}, margin).first);
      }
    }
  }
}

TEST_CASE("idempotency: projecting a synthesized estimate returns it") {
  for (int m : {1, 3}) {
    const BasisSpec spec{m, 0.8};
    const auto fit = fit_unconstrained(SampleSet(normal_samples(40, 77)), spec);
    const auto& c_s = fit.estimate.coefficients();
    CoefficientVector remeasured = CoefficientVector::zeros(fit.window);
    for (long k = fit.window.first; k <= fit.window.last; ++k) {
      remeasured[k] = inner_product(spec, k, [&](double x) { return fit.estimate(x); });
    }
    const auto again = correction_filter_apply(correlation_sequence(spec, spec), remeasured);
    for (long k = fit.window.first; k <= fit.window.last; ++k) CHECK(std::abs(again[k] - c_s[k]) < 1e-8);
  }
}

TEST_CASE("equal analysis and synthesis bases give the L2-orthogonal projection") {
  // Project a smooth function through measurement + correction and compare
  // with the normal equations built from a dense quadrature Gram matrix.
  const BasisSpec spec{3, 0.75};
  const auto f = [](double x) { return std::exp(-0.5 * (x - 0.3) * (x - 0.3)) * (1.0 + 0.2 * std::sin(2 * x)); };
  const IndexRange window{-3, 3};
  const long n = static_cast<long>(window.size());
  CoefficientVector c_a = CoefficientVector::zeros(window);
  for (long k = window.first; k <= window.last; ++k) c_a[k] = inner_product(spec, k, f, 400);
  const auto c_s = correction_filter_apply(correlation_sequence(spec, spec), c_a);

  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd rhs(n);
  for (long i = 0; i < n; ++i) {
    const long ki = window.first + i;
    rhs(i) = c_a[ki];
    for (long j = 0; j < n; ++j) {
      const long kj = window.first + j;
      gram(i, j) = inner_product(
          spec, ki,
          [&](double x) { return oracle::centered_bspline(spec.degree, x / spec.step - kj) / std::sqrt(spec.step); },
          400);
    }
  }
  const Eigen::VectorXd best = gram.ldlt().solve(rhs);
  for (long i = 0; i < n; ++i) CHECK(std::abs(best(i) - c_s[window.first + i]) < 1e-9);

  // Residual is orthogonal to every basis function in the window.
  const DensityEstimate est(spec, c_s);
  for (long k = window.first; k <= window.last; ++k) {
    const double ip = inner_product(spec, k, [&](double x) { return f(x) - est(x); }, 400);
    CHECK(std::abs(ip) < 1e-9);
  }
}
