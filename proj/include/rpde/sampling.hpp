#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rpde/basis.hpp"

namespace rpde {

inline constexpr int kDefaultMargin = 4;

// Observations x_1..x_N defining the empirical measure (1/N) sum delta_{x_n}.
class SampleSet {
 public:
  // Throws InvalidArgument on an empty set or a non-finite value.
  explicit SampleSet(std::vector<double> points);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double min() const { return min_; }
  double max() const { return max_; }

  SampleSet shifted(double offset) const;

 private:
  std::vector<double> points_;
  double min_ = 0.0;
  double max_ = 0.0;
};

// f(x) = sum_k c[k] sqrt(1/h) beta^m(x/h - k). Immutable.
class DensityEstimate {
 public:
  DensityEstimate(BasisSpec spec, CoefficientVector coefficients);

  const BasisSpec& spec() const { return spec_; }
  const CoefficientVector& coefficients() const { return coefficients_; }

  double operator()(double x) const;
  std::vector<double> evaluate(std::span<const double> xs) const;

  // Exact integral, sqrt(h) * sum_k c[k].
  double integral() const;

  // Interval outside of which the estimate vanishes identically.
  std::pair<double, double> support() const;

 private:
  BasisSpec spec_;
  CoefficientVector coefficients_;
};

std::vector<double> evaluate(const DensityEstimate& estimate, std::span<const double> xs);

// c_a[k] = (1/N) sum_n sqrt(1/h) beta^m(x_n/h - k) for k in `window`.
// Throws TruncationError if some sample has a nonzero response outside it.
CoefficientVector measure(const SampleSet& samples, const BasisSpec& spec, IndexRange window);

// [floor(min/h) - ceil((m+1)/2) - margin, ceil(max/h) + ceil((m+1)/2) + margin].
IndexRange choose_window(const SampleSet& samples, const BasisSpec& spec, int margin);

// Solves the banded Toeplitz system (r * c_s)[k] = c_a[k] for k in the
// window of c_a, with c_s zero outside that window. r must be symmetric.
// Throws SolverFailure (with a condition estimate) when the system is
// singular or too ill-conditioned to trust.
CoefficientVector correction_filter_apply(const CoefficientVector& r, const CoefficientVector& c_a);

// max |R(w)| / min |R(w)| over the frequency response of a symmetric filter;
// infinity if the response changes sign or vanishes.
double toeplitz_condition_estimate(const CoefficientVector& r);

// Relative mass defect tolerated before the window is widened.
inline constexpr double kMassLeakTolerance = 1e-10;

struct UnconstrainedFit {
  IndexRange window;
  CoefficientVector measurements;
  DensityEstimate estimate;
};

// The zero-boundary correction truncates the (geometrically decaying)
// ringing of the inverse filter at the window edge, which shows up as a mass
// defect. `margin` is therefore a minimum: the window is widened until the
// defect sum(c_s) - sum(c_a) falls below kMassLeakTolerance * sum(c_a).
UnconstrainedFit fit_unconstrained(const SampleSet& samples, const BasisSpec& spec,
                                   int margin = kDefaultMargin);

// Consistent (generalized-sampling) projection of the empirical measure
// onto the synthesis space, with analysis = synthesis basis.
DensityEstimate project_unconstrained(const SampleSet& samples, const BasisSpec& spec,
                                      int margin = kDefaultMargin);

}  // namespace rpde
