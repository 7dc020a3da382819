#pragma once

#include <Eigen/Dense>

#include "rpde/qp.hpp"

namespace rpde::detail {

// Dense forms of the problem operators: R (n x n truncated Toeplitz of r),
// S (constraints x n), and the data vector c_a.
struct DenseOperators {
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd measurements;
};

DenseOperators dense_operators(const BonaFideProblem& problem);

// Dual active-set method (Goldfarb-Idnani) for
//   min 0.5 x'Gx + d'x  s.t.  rows x >= 0,  1'x = mass,
// with G positive definite. Dependent constraint normals are handled by
// dropping working constraints, so degenerate vertices are fine.
struct DualActiveSetResult {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  // one per row, zero off the working set
  double mass_multiplier = 0.0;
  int iterations = 0;
  bool solved = false;
};

DualActiveSetResult dual_active_set(const Eigen::MatrixXd& g, const Eigen::VectorXd& d,
                                    const Eigen::MatrixXd& rows, double mass, int max_iterations);

CoefficientVector to_coefficients(const BonaFideProblem& problem, const Eigen::VectorXd& x);

}  // namespace rpde::detail
