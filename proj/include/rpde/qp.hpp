#pragma once

#include <string>
#include <vector>

#include "rpde/basis.hpp"
#include "rpde/sampling.hpp"

namespace rpde {

inline constexpr int kDefaultUpsampling = 10;

// min ||c_a - r * c||^2 over coefficients c on the window of c_a, subject
// to nonnegativity of (c upsampled by M) * phi_M on every fine-grid index of
// the synthesis support, and sum(c) = mass.
struct BonaFideProblem {
  CoefficientVector measurements;      // c_a; its window is the coefficient window
  CoefficientVector correlation;       // r_{a,s}, symmetric, sums to 1
  CoefficientVector synthesis_filter;  // phi_M[k] = beta^m(k / M), nonnegative
  int upsampling = kDefaultUpsampling;
  double mass = 1.0;

  // Throws InvalidArgument when an invariant is violated.
  void validate() const;

  std::size_t num_coefficients() const { return measurements.size(); }
  // Fine-grid indices constrained: (n - 1) * M + |phi_M|.
  std::size_t num_constraints() const;
  // Fine-grid index of the first constraint row.
  long first_constraint_index() const;
};

// Sum of synthesis coefficients giving unit integral: h^{-1/2}.
double unit_integral_mass(const BasisSpec& spec);

// Builds the problem for measurements taken with `spec` as both analysis
// and synthesis basis.
BonaFideProblem make_bonafide_problem(CoefficientVector measurements, const BasisSpec& spec,
                                      int upsampling = kDefaultUpsampling);

// Index k*M carries c[k]; every other index is zero.
CoefficientVector upsample(const CoefficientVector& c, int factor);

// (upsample(c, M) * phi_M)[q]: the estimate at q*h/M divided by sqrt(1/h).
CoefficientVector constraint_values(const CoefficientVector& coefficients,
                                    const CoefficientVector& synthesis_filter, int upsampling);

// Smallest value of the estimate on the grid q*h/M.
double fine_grid_minimum(const DensityEstimate& estimate, int upsampling);

struct KktResiduals {
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double complementarity = 0.0;
  double stationarity = 0.0;

  double max() const;
};

enum class SolveStatus { solved, max_iterations };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 50000;
  double rho = 0.1;
  double sigma = 1e-6;
  double relaxation = 1.7;
  bool adaptive_rho = true;
  // Refine the ADMM iterate by solving exactly on the rows it marks active.
  bool polish = true;
  int check_interval = 10;
  // Starting coefficients (window of the measurements); empty means the
  // uniform vector of the required mass.
  std::vector<double> initial;
};

struct QPSolution {
  CoefficientVector coefficients;
  double objective = 0.0;  // ||c_a - r * c||^2
  KktResiduals kkt;
  int iterations = 0;
  SolveStatus status = SolveStatus::solved;
  bool polished = false;
  // Multipliers of the fine-grid constraints (>= 0) and of the mass row.
  std::vector<double> inequality_multipliers;
  double mass_multiplier = 0.0;
  double min_constraint_value = 0.0;
};

double objective_value(const BonaFideProblem& problem, const CoefficientVector& coefficients);

struct Certificate {
  KktResiduals kkt;
  std::vector<double> inequality_multipliers;
  double mass_multiplier = 0.0;
};

// KKT residuals at `coefficients` for given multipliers:
//   stationarity  ||R'(R c - c_a) - S' lambda - nu 1||_inf
//   primal        max(max(-S c), |1'c - mass|)
//   dual          max(-lambda)
//   complementarity max |lambda_i (S c)_i|
KktResiduals kkt_residuals(const BonaFideProblem& problem, const CoefficientVector& coefficients,
                           const std::vector<double>& inequality_multipliers, double mass_multiplier);

// Best nonnegative multipliers for `coefficients` (nonnegative least squares
// over the near-active constraints) and the resulting residuals.
Certificate certify(const BonaFideProblem& problem, const CoefficientVector& coefficients);

// ADMM with cached banded factorization. Returns a partial solution with
// status max_iterations when the budget runs out; throws SolverFailure on
// numerical breakdown.
QPSolution solve(const BonaFideProblem& problem, const SolverOptions& options = {});

// Dense primal active-set method; exact up to rounding. Limited to
// kMaxActiveSetVariables coefficients. Used as a reference solver.
inline constexpr std::size_t kMaxActiveSetVariables = 50;
QPSolution solve_active_set(const BonaFideProblem& problem, int max_iterations = 100000);

struct BonaFideFit {
  IndexRange window;
  BonaFideProblem problem;
  QPSolution solution;
  DensityEstimate estimate;
};

// measure -> build problem (unit-integral mass) -> solve.
BonaFideFit fit_bonafide(const SampleSet& samples, const BasisSpec& spec,
                         int upsampling = kDefaultUpsampling, const SolverOptions& options = {},
                         int margin = kDefaultMargin);

DensityEstimate project_bonafide(const SampleSet& samples, const BasisSpec& spec,
                                 int upsampling = kDefaultUpsampling,
                                 const SolverOptions& options = {});

}  // namespace rpde
