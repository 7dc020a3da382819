#include "rpde/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "rpde/banded.hpp"
#include "rpde/error.hpp"

namespace rpde {

SampleSet::SampleSet(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw InvalidArgument("sample set is empty");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) {
      throw InvalidArgument("sample " + std::to_string(i) + " is not finite");
    }
  }
  const auto [lo, hi] = std::minmax_element(points_.begin(), points_.end());
  min_ = *lo;
  max_ = *hi;
}

SampleSet SampleSet::shifted(double offset) const {
  std::vector<double> moved(points_);
  for (double& x : moved) x += offset;
  return SampleSet(std::move(moved));
}

DensityEstimate::DensityEstimate(BasisSpec spec, CoefficientVector coefficients)
    : spec_(spec), coefficients_(std::move(coefficients)) {
  spec_.validate();
}

double DensityEstimate::operator()(double x) const {
  const double t = x / spec_.step;
  const IndexRange active = active_indices(spec_.degree, t);
  const long lo = std::max(active.first, coefficients_.first());
  const long hi = std::min(active.last, coefficients_.last());
  double s = 0.0;
  for (long k = lo; k <= hi; ++k) {
    s += coefficients_[k] * bspline_eval(spec_.degree, t - static_cast<double>(k));
  }
  return s / std::sqrt(spec_.step);
}

std::vector<double> DensityEstimate::evaluate(std::span<const double> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back((*this)(x));
  return out;
}

double DensityEstimate::integral() const {
  return std::sqrt(spec_.step) * coefficients_.sum();
}

std::pair<double, double> DensityEstimate::support() const {
  const double r = spec_.support_radius();
  return {(static_cast<double>(coefficients_.first()) - r) * spec_.step,
          (static_cast<double>(coefficients_.last()) + r) * spec_.step};
}

std::vector<double> evaluate(const DensityEstimate& estimate, std::span<const double> xs) {
  return estimate.evaluate(xs);
}

CoefficientVector measure(const SampleSet& samples, const BasisSpec& spec, IndexRange window) {
  spec.validate();
  if (window.last < window.first) {
    throw InvalidArgument("measurement window is empty");
  }
  CoefficientVector c_a = CoefficientVector::zeros(window);
  const double weight = 1.0 / (static_cast<double>(samples.size()) * std::sqrt(spec.step));
  for (double x : samples.points()) {
    const double t = x / spec.step;
    const IndexRange active = active_indices(spec.degree, t);
    for (long k = active.first; k <= active.last; ++k) {
      const double v = bspline_eval(spec.degree, t - static_cast<double>(k));
      if (v == 0.0) continue;
      if (!window.contains(k)) {
        std::ostringstream msg;
        msg << "measurement window [" << window.first << ", " << window.last
            << "] truncates the response of sample " << x << " at index " << k;
        throw TruncationError(msg.str());
      }
      c_a[k] += weight * v;
    }
  }
  return c_a;
}

IndexRange choose_window(const SampleSet& samples, const BasisSpec& spec, int margin) {
  spec.validate();
  if (margin < 0) {
    throw InvalidArgument("window margin must be nonnegative");
  }
  const long reach = static_cast<long>(std::ceil(spec.support_radius()));
  return {static_cast<long>(std::floor(samples.min() / spec.step)) - reach - margin,
          static_cast<long>(std::ceil(samples.max() / spec.step)) + reach + margin};
}

double toeplitz_condition_estimate(const CoefficientVector& r) {
  constexpr int kFrequencies = 2048;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool positive = false;
  bool negative = false;
  for (int i = 0; i <= kFrequencies; ++i) {
    const double w = std::numbers::pi * i / kFrequencies;
    double response = 0.0;
    for (long k = r.first(); k <= r.last(); ++k) {
      response += r[k] * std::cos(w * static_cast<double>(k));
    }
    positive |= response > 0.0;
    negative |= response < 0.0;
    lo = std::min(lo, std::abs(response));
    hi = std::max(hi, std::abs(response));
  }
  if ((positive && negative) || lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

CoefficientVector correction_filter_apply(const CoefficientVector& r, const CoefficientVector& c_a) {
  const long reach = r.last();
  const double scale = std::max(r.max_abs(), std::numeric_limits<double>::min());
  if (r.first() != -reach) {
    throw InvalidArgument("correlation sequence must be centered on index 0");
  }
  for (long k = 1; k <= reach; ++k) {
    if (std::abs(r[k] - r[-k]) > 1e-13 * scale) {
      throw InvalidArgument("correlation sequence must be symmetric");
    }
  }
  constexpr double kMaxCondition = 1e12;
  const double condition = toeplitz_condition_estimate(r);
  if (!(condition <= kMaxCondition)) {
    throw SolverFailure("correction filter: Toeplitz system is singular or ill-conditioned", condition);
  }

  const std::size_t n = c_a.size();
  const std::size_t band = std::min<std::size_t>(static_cast<std::size_t>(reach), n - 1);
  BandedCholesky toeplitz(n, band);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d <= band && d <= i; ++d) {
      toeplitz.add(i, i - d, r.at(static_cast<long>(d)));
    }
  }
  std::vector<double> solution(c_a.values().begin(), c_a.values().end());
  try {
    toeplitz.factorize();
  } catch (const SolverFailure& e) {
    throw SolverFailure(std::string("correction filter: ") + e.what(), condition);
  }
  toeplitz.solve_in_place(solution);
  CoefficientVector c_s(c_a.offset(), std::move(solution));

  double residual = 0.0;
  for (long k = c_a.first(); k <= c_a.last(); ++k) {
    double conv = 0.0;
    for (long j = -reach; j <= reach; ++j) conv += r[j] * c_s.at(k - j);
    residual = std::max(residual, std::abs(conv - c_a[k]));
  }
  if (residual > 1e-10 * std::max(1.0, c_a.max_abs())) {
    std::ostringstream msg;
    msg << "correction filter: residual " << residual << " exceeds tolerance";
    throw SolverFailure(msg.str(), condition);
  }
  return c_s;
}

UnconstrainedFit fit_unconstrained(const SampleSet& samples, const BasisSpec& spec, int margin) {
  constexpr int kMaxMargin = 512;
  const CoefficientVector r = correlation_sequence(spec, spec);
  for (int extra = margin;; extra = std::max(2 * extra, extra + 4)) {
    const IndexRange window = choose_window(samples, spec, extra);
    CoefficientVector c_a = measure(samples, spec, window);
    CoefficientVector c_s = correction_filter_apply(r, c_a);
    const double mass = c_a.sum();
    if (std::abs(c_s.sum() - mass) <= kMassLeakTolerance * std::abs(mass) || extra >= kMaxMargin) {
      return {window, std::move(c_a), DensityEstimate(spec, std::move(c_s))};
    }
  }
}

DensityEstimate project_unconstrained(const SampleSet& samples, const BasisSpec& spec, int margin) {
  return fit_unconstrained(samples, spec, margin).estimate;
}

}  // namespace rpde
