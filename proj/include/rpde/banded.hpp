#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rpde {

// Symmetric positive-definite banded matrix with Cholesky factorization.
// Storage is the lower band: entry (i, j) with 0 <= i - j <= bandwidth.
class BandedCholesky {
 public:
  BandedCholesky(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  // Accumulates into (i, j); either triangle may be addressed.
  void add(std::size_t i, std::size_t j, double value);
  double get(std::size_t i, std::size_t j) const;

  // In-place factorization. Throws SolverFailure on a nonpositive pivot.
  void factorize();
  bool factorized() const { return factorized_; }

  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  // y = A x using the stored (unfactorized) matrix.
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  double& lower(std::size_t i, std::size_t j) { return band_[i * (bw_ + 1) + (i - j)]; }
  double lower(std::size_t i, std::size_t j) const { return band_[i * (bw_ + 1) + (i - j)]; }

  std::size_t n_;
  std::size_t bw_;
  std::vector<double> band_;
  bool factorized_ = false;
};

}  // namespace rpde
