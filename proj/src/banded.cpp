#include "rpde/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpde/error.hpp"

namespace rpde {

BandedCholesky::BandedCholesky(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(bandwidth), band_(n * (bandwidth + 1), 0.0) {}

void BandedCholesky::add(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) throw InvalidArgument("entry outside matrix band");
  lower(i, j) += value;
  factorized_ = false;
}

double BandedCholesky::get(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0;
  return lower(i, j);
}

void BandedCholesky::factorize() {
  if (factorized_) throw Error("banded matrix already factorized");
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t k0 = j > bw_ ? j - bw_ : 0;
    double d = lower(j, j);
    for (std::size_t k = k0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > 0.0)) {
      throw SolverFailure("banded Cholesky: nonpositive pivot " + std::to_string(d) +
                          " at row " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    const std::size_t iend = std::min(n_, j + bw_ + 1);
    for (std::size_t i = j + 1; i < iend; ++i) {
      const std::size_t kk = std::max(k0, i > bw_ ? i - bw_ : 0);
      double s = lower(i, j);
      for (std::size_t k = kk; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  factorized_ = true;
}

void BandedCholesky::solve_in_place(std::span<double> rhs) const {
  if (!factorized_) throw Error("banded matrix not factorized");
  if (rhs.size() != n_) throw InvalidArgument("right-hand side has wrong length");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t k0 = i > bw_ ? i - bw_ : 0;
    double s = rhs[i];
    for (std::size_t k = k0; k < i; ++k) s -= lower(i, k) * rhs[k];
    rhs[i] = s / lower(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t kend = std::min(n_, ii + bw_ + 1);
    double s = rhs[ii];
    for (std::size_t k = ii + 1; k < kend; ++k) s -= lower(k, ii) * rhs[k];
    rhs[ii] = s / lower(ii, ii);
  }
}

std::vector<double> BandedCholesky::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

std::vector<double> BandedCholesky::multiply(std::span<const double> x) const {
  if (factorized_) throw Error("matrix-vector product needs the unfactorized matrix");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t k0 = i > bw_ ? i - bw_ : 0;
    for (std::size_t k = k0; k < i; ++k) {
      y[i] += lower(i, k) * x[k];
      y[k] += lower(i, k) * x[i];
    }
    y[i] += lower(i, i) * x[i];
  }
  return y;
}

}  // namespace rpde
