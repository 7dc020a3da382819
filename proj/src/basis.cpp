#include "rpde/basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <string>

#include "rpde/error.hpp"
#include "rpde/quadrature.hpp"

namespace rpde {

void BasisSpec::validate() const {
  if (degree < 0) {
    throw InvalidArgument("B-spline degree must be nonnegative, got " + std::to_string(degree));
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("grid step must be positive and finite, got " + std::to_string(step));
  }
}

CoefficientVector::CoefficientVector(long offset, std::vector<double> values)
    : offset_(offset), values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidArgument("coefficient vector needs at least one value");
  }
}

CoefficientVector CoefficientVector::zeros(IndexRange range) {
  if (range.last < range.first) {
    throw InvalidArgument("empty index range");
  }
  return CoefficientVector(range.first, std::vector<double>(range.size(), 0.0));
}

double CoefficientVector::at(long k) const {
  if (k < first() || k > last()) return 0.0;
  return values_[static_cast<std::size_t>(k - offset_)];
}

double CoefficientVector::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double CoefficientVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

CoefficientVector CoefficientVector::trimmed(double threshold) const {
  std::size_t lo = 0;
  std::size_t hi = values_.size();
  while (lo + 1 < hi && std::abs(values_[lo]) <= threshold) ++lo;
  while (hi - 1 > lo && std::abs(values_[hi - 1]) <= threshold) --hi;
  return CoefficientVector(offset_ + static_cast<long>(lo),
                           std::vector<double>(values_.begin() + static_cast<long>(lo),
                                               values_.begin() + static_cast<long>(hi)));
}

double bspline_eval(int degree, double x) {
  if (degree <= 0) {
    return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
  }
  const double radius = 0.5 * (degree + 1);
  if (!(std::abs(x) < radius)) return 0.0;
  const double m = static_cast<double>(degree);
  return ((radius + x) * bspline_eval(degree - 1, x + 0.5) +
          (radius - x) * bspline_eval(degree - 1, x - 0.5)) /
         m;
}

double scaled_basis_eval(const BasisSpec& spec, long k, double x) {
  return bspline_eval(spec.degree, x / spec.step - static_cast<double>(k)) / std::sqrt(spec.step);
}

IndexRange active_indices(int degree, double t) {
  if (degree <= 0) {
    const long k = static_cast<long>(std::floor(t + 0.5));
    return {k, k};
  }
  const double radius = 0.5 * (degree + 1);
  return {static_cast<long>(std::floor(t - radius)) + 1,
          static_cast<long>(std::ceil(t + radius)) - 1};
}

namespace {

CoefficientVector compute_correlation(const BasisSpec& analysis, const BasisSpec& synthesis) {
  const double ra = analysis.support_radius();
  const double rs = synthesis.support_radius();
  // r[k] vanishes once the supports of beta^a(. - k) and beta^s only touch.
  const long reach = static_cast<long>(std::ceil(ra + rs)) - 1;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(2 * reach + 1));
  for (long k = -reach; k <= reach; ++k) {
    const double lo = std::max(-rs, static_cast<double>(k) - ra);
    const double hi = std::min(rs, static_cast<double>(k) + ra);
    if (!(hi > lo)) {
      values.push_back(0.0);
      continue;
    }
    // Knots of both factors; the integrand is a polynomial between them.
    std::set<double> knots{lo, hi};
    for (double u = -rs; u <= rs; u += 1.0) {
      if (u > lo && u < hi) knots.insert(u);
    }
    for (double u = static_cast<double>(k) - ra; u <= static_cast<double>(k) + ra; u += 1.0) {
      if (u > lo && u < hi) knots.insert(u);
    }
    const auto integrand = [&](double u) {
      return bspline_eval(analysis.degree, u - static_cast<double>(k)) *
             bspline_eval(synthesis.degree, u);
    };
    double total = 0.0;
    for (auto it = knots.begin(); std::next(it) != knots.end(); ++it) {
      // Nudge the piece endpoints inward so degree-0 factors see the
      // interior of their constant piece.
      const double a = *it;
      const double b = *std::next(it);
      const double eps = 1e-15 * (b - a);
      total += quadrature::adaptive_simpson(integrand, a + eps, b - eps, 1e-15, 18) +
               eps * (integrand(a + eps) + integrand(b - eps));
    }
    values.push_back(total);
  }
  return CoefficientVector(-reach, std::move(values)).trimmed();
}

}  // namespace

CoefficientVector correlation_sequence(const BasisSpec& analysis, const BasisSpec& synthesis) {
  analysis.validate();
  synthesis.validate();
  if (analysis.step != synthesis.step) {
    throw InvalidArgument("analysis and synthesis bases must share the same grid step");
  }
  // Step-independent, so one entry per degree pair.
  static std::mutex mutex;
  static std::map<std::pair<int, int>, CoefficientVector> cache;
  const std::pair<int, int> key{analysis.degree, synthesis.degree};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  CoefficientVector r = compute_correlation(analysis, synthesis);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(r)).first->second;
}

CoefficientVector sampled_synthesis_filter(const BasisSpec& spec, int upsampling) {
  spec.validate();
  if (upsampling < 1) {
    throw InvalidArgument("upsampling factor M must be >= 1");
  }
  const double m = static_cast<double>(upsampling);
  const long reach = static_cast<long>(std::ceil(spec.support_radius() * m));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(2 * reach + 1));
  for (long k = -reach; k <= reach; ++k) {
    values.push_back(bspline_eval(spec.degree, static_cast<double>(k) / m));
  }
  return CoefficientVector(-reach, std::move(values)).trimmed();
}

}  // namespace rpde
