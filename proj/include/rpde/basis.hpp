#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rpde {

// Uniform, centered B-spline basis on the lattice h*Z. The generator is
// beta^degree; shifted copies are normalized by sqrt(1/h) so that the
// family has unit L2 scale independent of the step.
struct BasisSpec {
  int degree = 3;
  double step = 1.0;

  // Throws InvalidArgument unless degree >= 0 and step is a positive finite number.
  void validate() const;

  // Half-width of the generator support, (degree + 1) / 2.
  double support_radius() const { return 0.5 * (degree + 1); }
};

// Closed integer interval [first, last].
struct IndexRange {
  long first = 0;
  long last = 0;

  std::size_t size() const { return static_cast<std::size_t>(last - first + 1); }
  bool contains(long k) const { return k >= first && k <= last; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// A finite window of a sequence indexed by Z. Values outside the stored
// window are zero.
class CoefficientVector {
 public:
  CoefficientVector() : values_(1, 0.0) {}
  CoefficientVector(long offset, std::vector<double> values);

  static CoefficientVector zeros(IndexRange range);

  long offset() const { return offset_; }
  long first() const { return offset_; }
  long last() const { return offset_ + static_cast<long>(values_.size()) - 1; }
  IndexRange range() const { return {first(), last()}; }
  std::size_t size() const { return values_.size(); }

  // Value at sequence index k; zero outside the window.
  double at(long k) const;
  double& operator[](long k) { return values_[static_cast<std::size_t>(k - offset_)]; }
  double operator[](long k) const { return values_[static_cast<std::size_t>(k - offset_)]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double sum() const;
  double max_abs() const;

  // Same sequence with leading/trailing entries of magnitude <= threshold
  // removed. Keeps at least one entry.
  CoefficientVector trimmed(double threshold = 0.0) const;

 private:
  long offset_ = 0;
  std::vector<double> values_;
};

// Centered B-spline of the given degree, evaluated through the two-term
// recursion on beta^0 = indicator of [-1/2, 1/2). Zero outside
// [-(degree+1)/2, (degree+1)/2].
double bspline_eval(int degree, double x);

// sqrt(1/h) * beta^m(x/h - k).
double scaled_basis_eval(const BasisSpec& spec, long k, double x);

// r[k] = <phi^a_k, phi^s_0> for all k where it is nonzero. The sqrt(1/h)
// normalizations cancel against the change of variables, so the result does
// not depend on the (common) step. Computed by adaptive quadrature over the
// polynomial pieces of the integrand.
CoefficientVector correlation_sequence(const BasisSpec& analysis, const BasisSpec& synthesis);

// beta^m(k/M) over the nonzero part of its support: the FIR filter mapping
// synthesis coefficients upsampled by M to fine-grid samples.
CoefficientVector sampled_synthesis_filter(const BasisSpec& spec, int upsampling);

// Indices k whose shifted generator beta^m(t - k) can be nonzero at t.
IndexRange active_indices(int degree, double t);

}  // namespace rpde
