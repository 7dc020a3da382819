#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qp_internal.hpp"
#include "rpde/error.hpp"
#include "rpde/qp.hpp"

namespace rpde {

namespace detail {

namespace {

constexpr long kMassRow = -1;

// Working-set factorization: with G = LL' and B = L^{-1} N = Q [R; 0],
// J = L^{-T} Q splits into J1 (range of the working normals) and J2.
class WorkingFactor {
 public:
  WorkingFactor(const Eigen::MatrixXd& l) : l_(l) {}

  void reset(const Eigen::MatrixXd& normals) {
    const long n = l_.rows();
    q_ = normals.cols();
    const Eigen::MatrixXd b = l_.triangularView<Eigen::Lower>().solve(normals);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    r_ = qr.matrixQR().topLeftCorner(q_, q_).triangularView<Eigen::Upper>();
    j_ = l_.transpose().triangularView<Eigen::Upper>().solve(q);
  }

  // Primal step z = J2 J2' n and dual step r = R^{-1} J1' n.
  void directions(const Eigen::VectorXd& normal, Eigen::VectorXd& z, Eigen::VectorXd& r, double& d_norm2) const {
    const Eigen::VectorXd dv = j_.transpose() * normal;
    d_norm2 = dv.squaredNorm();
    const long n = dv.size();
    z = j_.rightCols(n - q_) * dv.tail(n - q_);
    r = r_.triangularView<Eigen::Upper>().solve(dv.head(q_));
  }

 private:
  const Eigen::MatrixXd& l_;
  long q_ = 0;
  Eigen::MatrixXd r_;
  Eigen::MatrixXd j_;
};

}  // namespace

DualActiveSetResult dual_active_set(const Eigen::MatrixXd& g, const Eigen::VectorXd& d,
                                    const Eigen::MatrixXd& rows, double mass, int max_iterations) {
  const long n = g.rows();
  const long m = rows.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw SolverFailure("active-set Hessian is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd row_norms = rows.rowwise().norm();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double inf = std::numeric_limits<double>::infinity();

  DualActiveSetResult out;
  Eigen::VectorXd x = -llt.solve(d);
  const double mass_sign = ones.dot(x) > mass ? -1.0 : 1.0;

  std::vector<long> working;
  std::vector<double> u;
  std::vector<bool> in_working(static_cast<std::size_t>(m), false);
  WorkingFactor factor(l);

  const auto normal = [&](long k) -> Eigen::VectorXd {
    return k == kMassRow ? Eigen::VectorXd(mass_sign * ones) : Eigen::VectorXd(rows.row(k).transpose());
  };
  const auto slack = [&](long k) {
    return k == kMassRow ? mass_sign * (ones.dot(x) - mass) : rows.row(k).dot(x);
  };
  const auto refactor = [&]() {
    Eigen::MatrixXd nm(n, static_cast<long>(working.size()));
    for (std::size_t t = 0; t < working.size(); ++t) nm.col(static_cast<long>(t)) = normal(working[t]);
    factor.reset(nm);
  };
  refactor();

  // Adds constraint p, dropping working constraints as the dual step requires.
  const auto add_constraint = [&](long p) {
    const Eigen::VectorXd np = normal(p);
    double u_new = 0.0;
    Eigen::VectorXd z, r;
    double d_norm2 = 0.0;
    while (true) {
      if (++out.iterations > max_iterations) return false;
      factor.directions(np, z, r, d_norm2);
      double t1 = inf;
      long k = -1;
      for (std::size_t j = 0; j < working.size(); ++j) {
        if (working[j] == kMassRow || r(static_cast<long>(j)) <= 0.0) continue;
        const double step = u[j] / r(static_cast<long>(j));
        if (step < t1) {
          t1 = step;
          k = static_cast<long>(j);
        }
      }
      const double ztn = z.dot(np);
      const double t2 = ztn > 1e-14 * d_norm2 ? -slack(p) / ztn : inf;
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) throw SolverFailure("active-set solver found the constraints infeasible");
      if (std::isfinite(t2)) x += t * z;
      for (std::size_t j = 0; j < working.size(); ++j) u[j] -= t * r(static_cast<long>(j));
      u_new += t;
      if (t2 <= t1) {
        working.push_back(p);
        u.push_back(u_new);
        if (p != kMassRow) in_working[static_cast<std::size_t>(p)] = true;
        refactor();
        return true;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(k)])] = false;
      working.erase(working.begin() + k);
      u.erase(u.begin() + k);
      refactor();
    }
  };

  bool running = add_constraint(kMassRow);
  while (running) {
    const Eigen::VectorXd values = rows * x;
    const double tol = 1e-13 * std::max(1.0, x.cwiseAbs().maxCoeff());
    long p = -1;
    double worst = 0.0;
    for (long i = 0; i < m; ++i) {
      if (in_working[static_cast<std::size_t>(i)] || row_norms(i) == 0.0) continue;
      const double v = values(i) / row_norms(i);
      if (v < -tol && v < worst) {
        worst = v;
        p = i;
      }
    }
    if (p < 0) {
      out.solved = true;
      break;
    }
    running = add_constraint(p);
  }

  out.x = x;
  out.multipliers = Eigen::VectorXd::Zero(m);
  for (std::size_t t = 0; t < working.size(); ++t) {
    if (working[t] == kMassRow) {
      out.mass_multiplier = mass_sign * u[t];
    } else {
      out.multipliers(working[t]) = u[t];
    }
  }
  return out;
}

}  // namespace detail

QPSolution solve_active_set(const BonaFideProblem& problem, int max_iterations) {
  problem.validate();
  const std::size_t n_coeff = problem.num_coefficients();
  if (n_coeff > kMaxActiveSetVariables) {
    throw InvalidArgument("active-set solver is limited to " + std::to_string(kMaxActiveSetVariables) +
                          " coefficients, got " + std::to_string(n_coeff));
  }
  const detail::DenseOperators ops = detail::dense_operators(problem);
  const Eigen::MatrixXd g = ops.correlation.transpose() * ops.correlation;
  const Eigen::VectorXd d = -ops.correlation.transpose() * ops.measurements;
  const detail::DualActiveSetResult res = detail::dual_active_set(g, d, ops.constraints, problem.mass, max_iterations);

  QPSolution out;
  out.iterations = res.iterations;
  out.status = res.solved ? SolveStatus::solved : SolveStatus::max_iterations;
  out.coefficients = detail::to_coefficients(problem, res.x);
  out.inequality_multipliers.assign(res.multipliers.data(), res.multipliers.data() + res.multipliers.size());
  out.mass_multiplier = res.mass_multiplier;
  out.kkt = kkt_residuals(problem, out.coefficients, out.inequality_multipliers, out.mass_multiplier);
  out.objective = objective_value(problem, out.coefficients);
  out.min_constraint_value = (ops.constraints * res.x).minCoeff();
  return out;
}

}  // namespace rpde
