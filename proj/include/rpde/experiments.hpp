#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rpde/qp.hpp"
#include "rpde/random.hpp"
#include "rpde/sampling.hpp"

namespace rpde {

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
};

// Gaussian or finite Gaussian mixture. f_tau(x) = f(x - tau).
class TrueDensity {
 public:
  static TrueDensity gaussian(double mean, double sd);
  // Weights must be positive and sum to 1.
  static TrueDensity mixture(std::vector<GaussianComponent> components);

  std::span<const GaussianComponent> components() const { return components_; }
  bool is_gaussian() const { return components_.size() == 1; }

  double operator()(double x) const;
  std::vector<double> sample(std::size_t n, std::mt19937_64& rng) const;

  // [min mean - tails * max sd, max mean + tails * max sd].
  std::pair<double, double> effective_support(double tails = 6.0) const;

  // Closed form of the integral of f^2.
  double squared_norm() const;

  std::string describe() const;

 private:
  explicit TrueDensity(std::vector<GaussianComponent> components);
  std::vector<GaussianComponent> components_;
};

enum class Method { pvs, pbf };

std::string to_string(Method method);
// Accepts "pvs" and "pbf".
Method parse_method(const std::string& name);

// Uniform grid [lo, hi] for composite Simpson; lo and hi sit on knots of the
// estimate and `spacing` divides the knot spacing.
struct IntegrationGrid {
  double lo = 0.0;
  double hi = 0.0;
  double spacing = 0.0;
};

inline constexpr int kPointsPerStep = 20;
inline constexpr double kTailWidth = 6.0;

IntegrationGrid integration_grid(const DensityEstimate& estimate, const TrueDensity& truth, double shift,
                                 int points_per_step = kPointsPerStep);

// Integral of (f(x - shift) - estimate(x))^2 by composite Simpson on each
// knot interval of the estimate. Throws InvalidArgument when the grid misses
// part of either support or is coarser than h/20.
double l2_error(const DensityEstimate& estimate, const TrueDensity& truth, double shift, const IntegrationGrid& grid);
double l2_error(const DensityEstimate& estimate, const TrueDensity& truth, double shift);

// 0, step, 2 step, ... below h.
std::vector<double> shift_grid(double h, double shift_step);

struct ExperimentConfig {
  TrueDensity density = TrueDensity::gaussian(0.0, 1.0);
  std::size_t samples = 100;
  std::vector<double> h_grid;
  int degree = 3;
  int upsampling = kDefaultUpsampling;
  int realizations = 24;
  double shift_step = 0.025;
  int points_per_step = kPointsPerStep;
  std::uint64_t seed = kDefaultSeed;
  std::vector<Method> methods{Method::pvs, Method::pbf};
  SolverOptions solver;
  int jobs = 1;

  void validate() const;
};

struct SweepPoint {
  double h = 0.0;
  Method method = Method::pvs;
  // Shift-averaged squared error of each realization that succeeded.
  std::vector<double> raw_errors;
  double mean_error = 0.0;
  double eta2_db = 0.0;
  double stderr_db = 0.0;
  int n_fail = 0;
  double seconds = 0.0;
  std::vector<std::string> failures;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SweepPoint> points;

  const SweepPoint* find(double h, Method method) const;
};

// Samples of realization r come from stream_seed(seed, r) and are shared by
// every h and method. Results do not depend on `jobs`.
ExperimentReport run_sweep(const ExperimentConfig& config);

double to_db(double value);
// Delta-method standard error in dB of the mean of `values`.
double stderr_db(std::span<const double> values);

struct ReferencePoint {
  double h;
  double eta2_db;
};

// Expected error of the unconstrained estimator for N = 100 standard normal
// samples with cubic splines, on h = 0.8 + k * 1.1 / 29, k = 0..29.
std::span<const ReferencePoint> reference_theory_curve();
double reference_grid_h(int k);
// Linear interpolation on the table; empty outside its range.
std::optional<double> reference_theory_db(double h);

}  // namespace rpde
