#include "rpde/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "qp_internal.hpp"
#include "rpde/banded.hpp"
#include "rpde/error.hpp"

namespace rpde {

namespace detail {

DenseOperators dense_operators(const BonaFideProblem& problem) {
  const long n = static_cast<long>(problem.num_coefficients());
  const long rows = static_cast<long>(problem.num_constraints());
  const long first = problem.measurements.first();
  const long fine0 = problem.first_constraint_index();
  DenseOperators ops;
  ops.correlation.resize(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) ops.correlation(i, j) = problem.correlation.at(i - j);
  ops.constraints = Eigen::MatrixXd::Zero(rows, n);
  for (long j = 0; j < n; ++j) {
    CoefficientVector unit = CoefficientVector::zeros({first + j, first + j});
    unit[first + j] = 1.0;
    const CoefficientVector column = constraint_values(unit, problem.synthesis_filter, problem.upsampling);
    for (long q = column.first(); q <= column.last(); ++q) ops.constraints(q - fine0, j) = column[q];
  }
  ops.measurements = Eigen::Map<const Eigen::VectorXd>(problem.measurements.values().data(), n);
  return ops;
}

CoefficientVector to_coefficients(const BonaFideProblem& problem, const Eigen::VectorXd& x) {
  return CoefficientVector(problem.measurements.first(), std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace detail

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Banded application of R, S and S' without forming them.
class Operators {
 public:
  explicit Operators(const BonaFideProblem& p)
      : n_(p.num_coefficients()),
        rows_(p.num_constraints()),
        reach_(p.correlation.last()),
        r_(p.correlation),
        phi_(p.synthesis_filter.values().begin(), p.synthesis_filter.values().end()),
        m_(static_cast<std::size_t>(p.upsampling)) {}

  std::size_t n() const { return n_; }
  std::size_t rows() const { return rows_; }

  void apply_r(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const long lo = std::max<long>(0, static_cast<long>(i) - reach_);
      const long hi = std::min<long>(static_cast<long>(n_) - 1, static_cast<long>(i) + reach_);
      double s = 0.0;
      for (long j = lo; j <= hi; ++j) s += r_[static_cast<long>(i) - j] * x[static_cast<std::size_t>(j)];
      out[i] = s;
    }
  }

  // Column j of S occupies rows j*M .. j*M + |phi| - 1.
  void apply_s(std::span<const double> x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double xj = x[j];
      double* row = out.data() + j * m_;
      for (std::size_t p = 0; p < phi_.size(); ++p) row[p] += phi_[p] * xj;
    }
  }

  void apply_st(std::span<const double> y, std::span<double> out) const {
    for (std::size_t j = 0; j < n_; ++j) {
      const double* row = y.data() + j * m_;
      double s = 0.0;
      for (std::size_t p = 0; p < phi_.size(); ++p) s += phi_[p] * row[p];
      out[j] = s;
    }
  }

  // P + sigma I + rho S'S as a banded matrix, P = R'R.
  BandedCholesky system(double sigma, double rho) const {
    const std::size_t band_r = static_cast<std::size_t>(2 * reach_);
    const std::size_t band_s = (phi_.size() - 1) / m_;
    const std::size_t band = std::min(n_ - 1, std::max(band_r, band_s));
    BandedCholesky b(n_, band);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = (i > band ? i - band : 0); j <= i; ++j) {
        double p = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
          p += r_.at(static_cast<long>(k) - static_cast<long>(i)) * r_.at(static_cast<long>(k) - static_cast<long>(j));
        }
        double ss = 0.0;
        const std::size_t shift = (i - j) * m_;
        for (std::size_t t = shift; t < phi_.size(); ++t) ss += phi_[t] * phi_[t - shift];
        b.add(i, j, p + rho * ss + (i == j ? sigma : 0.0));
      }
    }
    return b;
  }

 private:
  std::size_t n_;
  std::size_t rows_;
  long reach_;
  CoefficientVector r_;
  std::vector<double> phi_;
  std::size_t m_;
};

// Lawson-Hanson nonnegative least squares: min ||A x - b||, x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const long cols = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  if (cols == 0) return x;
  std::vector<bool> passive(static_cast<std::size_t>(cols), false);
  const double tol = 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff()) * cols;
  const auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<long> idx;
    for (long j = 0; j < cols; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), static_cast<long>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) ap.col(static_cast<long>(t)) = a.col(idx[t]);
    const Eigen::VectorXd sp = ap.completeOrthogonalDecomposition().solve(b);
    s.setZero();
    for (std::size_t t = 0; t < idx.size(); ++t) s(idx[t]) = sp(static_cast<long>(t));
  };
  for (int outer = 0; outer < 3 * cols + 10; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    long best = -1;
    double best_w = tol;
    for (long j = 0; j < cols; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    Eigen::VectorXd s(cols);
    for (int inner = 0; inner < 3 * cols + 10; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool feasible = true;
      for (long j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          feasible = false;
          const double denom = x(j) - s(j);
          if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
        }
      }
      if (feasible) break;
      x += alpha * (s - x);
      for (long j = 0; j < cols; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-300) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    for (long j = 0; j < cols; ++j) {
      if (passive[static_cast<std::size_t>(j)]) x(j) = std::max(0.0, s(j));
    }
  }
  return x;
}

struct PolishResult {
  Eigen::VectorXd x;
  Certificate certificate;
};

// Solves the problem exactly on the candidate rows, widening the candidate
// set with any violated rows, and accepts the point only if its KKT
// residuals over all rows meet the tolerance.
std::optional<PolishResult> polish(const BonaFideProblem& problem, const detail::DenseOperators& ops,
                                   std::vector<long> candidates, double tolerance) {
  const long n = ops.correlation.cols();
  const long rows = ops.constraints.rows();
  const Eigen::MatrixXd g = ops.correlation.transpose() * ops.correlation;
  const Eigen::VectorXd d = -ops.correlation.transpose() * ops.measurements;
  std::vector<bool> chosen(static_cast<std::size_t>(rows), false);
  for (long i : candidates) chosen[static_cast<std::size_t>(i)] = true;
  for (int round = 0; round < 8; ++round) {
    Eigen::MatrixXd sub(static_cast<long>(candidates.size()), n);
    for (std::size_t t = 0; t < candidates.size(); ++t) sub.row(static_cast<long>(t)) = ops.constraints.row(candidates[t]);
    const detail::DualActiveSetResult res = detail::dual_active_set(g, d, sub, problem.mass, 20 * static_cast<int>(n) + 200);
    if (!res.solved) return std::nullopt;
    const Eigen::VectorXd values = ops.constraints * res.x;
    const double floor = -1e-13 * std::max(1.0, values.cwiseAbs().maxCoeff());
    bool widened = false;
    for (long i = 0; i < rows; ++i) {
      if (!chosen[static_cast<std::size_t>(i)] && values(i) < floor) {
        chosen[static_cast<std::size_t>(i)] = true;
        candidates.push_back(i);
        widened = true;
      }
    }
    if (widened) continue;
    Certificate cert;
    cert.inequality_multipliers.assign(static_cast<std::size_t>(rows), 0.0);
    for (std::size_t t = 0; t < candidates.size(); ++t) {
      cert.inequality_multipliers[static_cast<std::size_t>(candidates[t])] = res.multipliers(static_cast<long>(t));
    }
    cert.mass_multiplier = res.mass_multiplier;
    cert.kkt = kkt_residuals(problem, detail::to_coefficients(problem, res.x), cert.inequality_multipliers,
                             cert.mass_multiplier);
    if (cert.kkt.max() > tolerance) return std::nullopt;
    return PolishResult{res.x, std::move(cert)};
  }
  return std::nullopt;
}

}  // namespace

void BonaFideProblem::validate() const {
  if (upsampling < 1) throw InvalidArgument("upsampling factor M must be >= 1");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive and finite");
  if (std::abs(correlation.sum() - 1.0) > 1e-12) {
    throw InvalidArgument("correlation sequence must sum to 1");
  }
  if (correlation.first() != -correlation.last()) {
    throw InvalidArgument("correlation sequence must be centered");
  }
  for (double v : synthesis_filter.values()) {
    if (v < 0.0) throw InvalidArgument("sampled synthesis filter must be nonnegative");
  }
  for (double v : measurements.values()) {
    if (!std::isfinite(v)) throw InvalidArgument("measurements must be finite");
  }
}

std::size_t BonaFideProblem::num_constraints() const {
  return (measurements.size() - 1) * static_cast<std::size_t>(upsampling) + synthesis_filter.size();
}

long BonaFideProblem::first_constraint_index() const {
  return measurements.first() * upsampling + synthesis_filter.first();
}

double unit_integral_mass(const BasisSpec& spec) {
  spec.validate();
  return 1.0 / std::sqrt(spec.step);
}

BonaFideProblem make_bonafide_problem(CoefficientVector measurements, const BasisSpec& spec, int upsampling) {
  BonaFideProblem p{std::move(measurements), correlation_sequence(spec, spec),
                    sampled_synthesis_filter(spec, upsampling), upsampling, unit_integral_mass(spec)};
  p.validate();
  return p;
}

CoefficientVector upsample(const CoefficientVector& c, int factor) {
  if (factor < 1) throw InvalidArgument("upsampling factor must be >= 1");
  const long m = factor;
  std::vector<double> out((c.size() - 1) * static_cast<std::size_t>(m) + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) out[i * static_cast<std::size_t>(m)] = c.values()[i];
  return CoefficientVector(c.first() * m, std::move(out));
}

CoefficientVector constraint_values(const CoefficientVector& coefficients,
                                    const CoefficientVector& synthesis_filter, int upsampling) {
  const CoefficientVector up = upsample(coefficients, upsampling);
  std::vector<double> out(up.size() + synthesis_filter.size() - 1, 0.0);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const double v = up.values()[i];
    if (v == 0.0) continue;
    for (std::size_t j = 0; j < synthesis_filter.size(); ++j) out[i + j] += v * synthesis_filter.values()[j];
  }
  return CoefficientVector(up.first() + synthesis_filter.first(), std::move(out));
}

double fine_grid_minimum(const DensityEstimate& estimate, int upsampling) {
  const CoefficientVector values = constraint_values(
      estimate.coefficients(), sampled_synthesis_filter(estimate.spec(), upsampling), upsampling);
  return *std::min_element(values.values().begin(), values.values().end()) / std::sqrt(estimate.spec().step);
}

double KktResiduals::max() const {
  return std::max({primal_feasibility, dual_feasibility, complementarity, stationarity});
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::solved:
      return "solved";
    case SolveStatus::max_iterations:
      return "max_iterations";
  }
  return "unknown";
}

double objective_value(const BonaFideProblem& problem, const CoefficientVector& coefficients) {
  const Operators ops(problem);
  std::vector<double> rc(ops.n());
  ops.apply_r(coefficients.values(), rc);
  double s = 0.0;
  for (std::size_t i = 0; i < rc.size(); ++i) {
    const double d = problem.measurements.values()[i] - rc[i];
    s += d * d;
  }
  return s;
}

KktResiduals kkt_residuals(const BonaFideProblem& problem, const CoefficientVector& coefficients,
                           const std::vector<double>& inequality_multipliers, double mass_multiplier) {
  const Operators ops(problem);
  if (coefficients.range() != problem.measurements.range()) {
    throw InvalidArgument("coefficients must live on the measurement window");
  }
  if (inequality_multipliers.size() != ops.rows()) {
    throw InvalidArgument("one multiplier per constraint row is required");
  }
  const auto c = coefficients.values();
  std::vector<double> rc(ops.n()), grad(ops.n()), sc(ops.rows()), stl(ops.n());
  ops.apply_r(c, rc);
  for (std::size_t i = 0; i < rc.size(); ++i) rc[i] -= problem.measurements.values()[i];
  ops.apply_r(rc, grad);  // R is symmetric
  ops.apply_s(c, sc);
  ops.apply_st(inequality_multipliers, stl);

  KktResiduals k;
  for (std::size_t j = 0; j < ops.n(); ++j) {
    k.stationarity = std::max(k.stationarity, std::abs(grad[j] - stl[j] - mass_multiplier));
  }
  for (std::size_t i = 0; i < ops.rows(); ++i) {
    k.primal_feasibility = std::max(k.primal_feasibility, -sc[i]);
    k.dual_feasibility = std::max(k.dual_feasibility, -inequality_multipliers[i]);
    k.complementarity = std::max(k.complementarity, std::abs(inequality_multipliers[i] * sc[i]));
  }
  k.primal_feasibility = std::max(k.primal_feasibility, std::abs(coefficients.sum() - problem.mass));
  return k;
}

Certificate certify(const BonaFideProblem& problem, const CoefficientVector& coefficients) {
  const detail::DenseOperators ops = detail::dense_operators(problem);
  const long n = ops.correlation.cols();
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(coefficients.values().data(), n);
  const Eigen::VectorXd values = ops.constraints * x;
  const Eigen::VectorXd grad = ops.correlation.transpose() * (ops.correlation * x - ops.measurements);
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<long> near;
  for (long i = 0; i < values.size(); ++i)
    if (values(i) <= 1e-9 * scale) near.push_back(i);

  // Eliminate the free mass multiplier by projecting out the ones direction.
  const auto center = [n](Eigen::VectorXd v) {
    v.array() -= v.sum() / static_cast<double>(n);
    return v;
  };
  Eigen::MatrixXd a(n, static_cast<long>(near.size()));
  for (std::size_t t = 0; t < near.size(); ++t) {
    a.col(static_cast<long>(t)) = center(ops.constraints.row(near[t]).transpose());
  }
  const Eigen::VectorXd lambda = nnls(a, center(grad));

  Certificate cert;
  cert.inequality_multipliers.assign(static_cast<std::size_t>(values.size()), 0.0);
  Eigen::VectorXd remainder = grad;
  for (std::size_t t = 0; t < near.size(); ++t) {
    cert.inequality_multipliers[static_cast<std::size_t>(near[t])] = lambda(static_cast<long>(t));
    remainder -= lambda(static_cast<long>(t)) * ops.constraints.row(near[t]).transpose();
  }
  cert.mass_multiplier = remainder.sum() / static_cast<double>(n);
  cert.kkt = kkt_residuals(problem, coefficients, cert.inequality_multipliers, cert.mass_multiplier);
  return cert;
}

QPSolution solve(const BonaFideProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (options.tolerance <= 0.0 || options.max_iterations < 1 || options.rho <= 0.0 ||
      options.sigma <= 0.0 || options.relaxation <= 0.0 || options.relaxation >= 2.0 ||
      options.check_interval < 1) {
    throw InvalidArgument("invalid solver options");
  }
  const Operators ops(problem);
  const std::size_t n = ops.n();
  const std::size_t rows = ops.rows();
  const double mass = problem.mass;
  const std::span<const double> c_a = problem.measurements.values();

  // q = -R' c_a
  std::vector<double> lin(n);
  ops.apply_r(c_a, lin);
  for (double& v : lin) v = -v;
  const double lin_norm = inf_norm(lin);

  std::vector<double> x(n, mass / static_cast<double>(n));
  if (!options.initial.empty()) {
    if (options.initial.size() != n) throw InvalidArgument("initial guess has the wrong length");
    x = options.initial;
  }
  std::vector<double> z(rows), y(rows, 0.0), sx(rows);
  ops.apply_s(x, z);
  for (double& v : z) v = std::max(0.0, v);
  double z_eq = mass;
  double y_eq = 0.0;

  double rho = options.rho;
  const double eq_scale = 1e3;
  std::optional<BandedCholesky> factor;
  std::vector<double> ones_solved;
  double sm_denominator = 1.0;
  const auto refactor = [&]() {
    factor.emplace(ops.system(options.sigma, rho));
    try {
      factor->factorize();
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string("ADMM linear system: ") + e.what());
    }
    ones_solved.assign(n, 1.0);
    factor->solve_in_place(ones_solved);
    sm_denominator = 1.0 + eq_scale * rho * std::accumulate(ones_solved.begin(), ones_solved.end(), 0.0);
  };
  refactor();

  const double eps_primal = options.tolerance;
  const double eps_dual = options.tolerance;

  std::vector<double> rhs(n), xt(n), zt(rows), tmp(n), px(n), aty(n);
  std::vector<long> active;
  // Rows that look active: small slack or a nonzero dual.
  const auto detect_active = [&]() {
    active.clear();
    double largest = 0.0;
    for (std::size_t i = 0; i < rows; ++i) largest = std::max(largest, sx[i]);
    for (std::size_t i = 0; i < rows; ++i)
      if (y[i] < 0.0 || sx[i] <= 1e-3 * largest) active.push_back(static_cast<long>(i));
  };

  std::optional<detail::DenseOperators> dense;
  QPSolution out;
  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= options.max_iterations; ++iter) {
    // rhs = sigma x - q + S'(rho z - y) + 1 (rho_eq z_eq - y_eq)
    for (std::size_t i = 0; i < rows; ++i) zt[i] = rho * z[i] - y[i];
    ops.apply_st(zt, rhs);
    const double eq_term = eq_scale * rho * z_eq - y_eq;
    for (std::size_t j = 0; j < n; ++j) rhs[j] += options.sigma * x[j] - lin[j] + eq_term;
    factor->solve_in_place(rhs);
    const double ones_dot = std::accumulate(rhs.begin(), rhs.end(), 0.0);
    const double coef = eq_scale * rho * ones_dot / sm_denominator;
    for (std::size_t j = 0; j < n; ++j) xt[j] = rhs[j] - coef * ones_solved[j];

    ops.apply_s(xt, zt);
    const double zt_eq = std::accumulate(xt.begin(), xt.end(), 0.0);
    const double a = options.relaxation;
    for (std::size_t j = 0; j < n; ++j) x[j] = a * xt[j] + (1.0 - a) * x[j];
    for (std::size_t i = 0; i < rows; ++i) {
      const double zr = a * zt[i] + (1.0 - a) * z[i];
      const double zn = std::max(0.0, zr + y[i] / rho);
      y[i] += rho * (zr - zn);
      z[i] = zn;
    }
    {
      const double zr = a * zt_eq + (1.0 - a) * z_eq;
      y_eq += eq_scale * rho * (zr - mass);
      z_eq = mass;
    }

    if (iter % options.check_interval != 0 && iter != options.max_iterations) continue;

    ops.apply_s(x, sx);
    double r_primal = std::abs(std::accumulate(x.begin(), x.end(), 0.0) - z_eq);
    double ax_norm = std::abs(z_eq);
    for (std::size_t i = 0; i < rows; ++i) {
      r_primal = std::max(r_primal, std::abs(sx[i] - z[i]));
      ax_norm = std::max({ax_norm, std::abs(sx[i]), std::abs(z[i])});
    }
    ops.apply_r(x, tmp);
    ops.apply_r(tmp, px);
    ops.apply_st(y, aty);
    double r_dual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      aty[j] += y_eq;
      r_dual = std::max(r_dual, std::abs(px[j] + lin[j] + aty[j]));
    }
    if (!std::isfinite(r_primal) || !std::isfinite(r_dual)) {
      std::ostringstream msg;
      msg << "ADMM breakdown at iteration " << iter << ": primal residual " << r_primal
          << ", dual residual " << r_dual << ", rho " << rho;
      throw SolverFailure(msg.str());
    }

    if (options.polish && r_primal < 1e4 * eps_primal && r_dual < 1e4 * eps_dual) {
      if (!dense) dense = detail::dense_operators(problem);
      detect_active();
      if (auto polished = polish(problem, *dense, active, options.tolerance)) {
        out.coefficients = detail::to_coefficients(problem, polished->x);
        out.inequality_multipliers = std::move(polished->certificate.inequality_multipliers);
        out.mass_multiplier = polished->certificate.mass_multiplier;
        out.kkt = polished->certificate.kkt;
        out.polished = true;
        converged = true;
        break;
      }
    }
    if (r_primal <= eps_primal && r_dual <= eps_dual) {
      converged = true;
      break;
    }

    if (options.adaptive_rho && iter % (5 * options.check_interval) == 0) {
      double pn = inf_norm(px);
      pn = std::max({pn, inf_norm(aty), lin_norm, 1e-300});
      const double ratio = (r_primal / std::max(ax_norm, 1e-300)) / std::max(r_dual / pn, 1e-300);
      const double candidate = std::clamp(rho * std::sqrt(ratio), 1e-6, 1e6);
      if (candidate > 5.0 * rho || candidate < 0.2 * rho) {
        rho = candidate;
        refactor();
      }
    }
  }

  out.iterations = std::min(iter, options.max_iterations);
  out.status = converged ? SolveStatus::solved : SolveStatus::max_iterations;
  if (!out.polished) {
    // The ADMM duals are nonpositive by construction of the z-projection,
    // so -y is a valid multiplier candidate; keep whichever certificate is
    // tighter.
    out.coefficients = CoefficientVector(problem.measurements.first(), x);
    Certificate cert = certify(problem, out.coefficients);
    std::vector<double> lambda(rows);
    for (std::size_t i = 0; i < rows; ++i) lambda[i] = -y[i];
    const KktResiduals own = kkt_residuals(problem, out.coefficients, lambda, -y_eq);
    if (own.max() < cert.kkt.max()) {
      out.inequality_multipliers = std::move(lambda);
      out.mass_multiplier = -y_eq;
      out.kkt = own;
    } else {
      out.inequality_multipliers = std::move(cert.inequality_multipliers);
      out.mass_multiplier = cert.mass_multiplier;
      out.kkt = cert.kkt;
    }
  }
  out.objective = objective_value(problem, out.coefficients);
  const CoefficientVector values =
      constraint_values(out.coefficients, problem.synthesis_filter, problem.upsampling);
  out.min_constraint_value = *std::min_element(values.values().begin(), values.values().end());
  return out;
}

BonaFideFit fit_bonafide(const SampleSet& samples, const BasisSpec& spec, int upsampling,
                         const SolverOptions& options, int margin) {
  const IndexRange window = choose_window(samples, spec, margin);
  BonaFideProblem problem = make_bonafide_problem(measure(samples, spec, window), spec, upsampling);
  QPSolution solution = solve(problem, options);
  DensityEstimate estimate(spec, solution.coefficients);
  return {window, std::move(problem), std::move(solution), std::move(estimate)};
}

DensityEstimate project_bonafide(const SampleSet& samples, const BasisSpec& spec, int upsampling,
                                 const SolverOptions& options) {
  BonaFideFit fit = fit_bonafide(samples, spec, upsampling, options);
  if (fit.solution.status != SolveStatus::solved) {
    std::ostringstream msg;
    msg << "bona fide projection did not converge in " << fit.solution.iterations
        << " iterations (max KKT residual " << fit.solution.kkt.max() << ")";
    throw SolverFailure(msg.str());
  }
  return fit.estimate;
}

}  // namespace rpde
