#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library code paths it is used to check.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

// Cardinal B-spline N_{0,p} on knots 0, 1, ..., p+1 via Cox-de Boor.
inline double cox_de_boor(int i, int p, double u) {
  if (p == 0) return (u >= i && u < i + 1) ? 1.0 : 0.0;
  return (u - i) / p * cox_de_boor(i, p - 1, u) + (i + p + 1 - u) / p * cox_de_boor(i + 1, p - 1, u);
}

// Centered B-spline from the cardinal one.
inline double centered_bspline(int degree, double x) {
  return cox_de_boor(0, degree, x + 0.5 * (degree + 1));
}

// Truncated-power closed form of the centered B-spline.
inline double bspline_truncated_power(int n, double x) {
  double s = 0.0;
  double binom = 1.0;
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  for (int j = 0; j <= n + 1; ++j) {
    const double t = x + 0.5 * (n + 1) - j;
    if (t > 0) s += ((j % 2) ? -1.0 : 1.0) * binom * std::pow(t, n);
    binom = binom * (n + 1 - j) / (j + 1);
  }
  return s / fact;
}

// Composite Simpson on [a, b] with `n` (even) panels.
// Standard normal quantile by bisection on the erfc-based CDF.
inline double normal_quantile_bisect(double p) {
  if (p > 0.5) return -normal_quantile_bisect(1.0 - p);
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double d = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * d);
  return s * d / 3.0;
}

// Composite Simpson over [a, b] split at every multiple of `knot_spacing`
// offset by `knot_offset`, so each panel lies within one polynomial piece.
// Evaluates pieces at interior points only (at both ends a tiny inset) to
// stay on one side of jump discontinuities.
inline double piecewise_simpson(const std::function<double(double)>& f, double a, double b,
                                double knot_spacing, double knot_offset, int panels_per_piece) {
  std::vector<double> cuts{a};
  double k = std::ceil((a - knot_offset) / knot_spacing);
  for (double x = knot_offset + k * knot_spacing; x < b; x += knot_spacing) {
    if (x > a) cuts.push_back(x);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double inset = 1e-13 * (hi - lo);
    total += simpson(f, lo + inset, hi - inset, panels_per_piece);
  }
  return total;
}

// Dense solve of the n x n Toeplitz system T c = rhs with T(i, j) = r(i - j).
inline std::vector<double> dense_toeplitz_solve(const std::function<double(long)>& r,
                                                const std::vector<double>& rhs) {
  const long n = static_cast<long>(rhs.size());
  Eigen::MatrixXd t(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) t(i, j) = r(i - j);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x = t.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

// Brute-force QP: min 0.5 x'Gx + d'x s.t. A_in x >= 0 and 1'x = mass, by
// enumerating every subset of inequalities treated as active. Only viable
// for a handful of constraints.
struct BruteForceResult {
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
};

inline BruteForceResult brute_force_qp(const Eigen::MatrixXd& g, const Eigen::VectorXd& d,
                                       const Eigen::MatrixXd& a_in, double mass) {
  const int n = static_cast<int>(g.rows());
  const int m = static_cast<int>(a_in.rows());
  BruteForceResult best;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) active.push_back(i);
    const int na = static_cast<int>(active.size()) + 1;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + na, n + na);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + na);
    kkt.topLeftCorner(n, n) = g;
    rhs.head(n) = -d;
    for (int j = 0; j < n; ++j) {
      kkt(n, j) = 1.0;
      kkt(j, n) = 1.0;
    }
    rhs(n) = mass;
    for (int a = 0; a < na - 1; ++a) {
      for (int j = 0; j < n; ++j) {
        kkt(n + 1 + a, j) = a_in(active[a], j);
        kkt(j, n + 1 + a) = a_in(active[a], j);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.rank() < n + na) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd x = sol.head(n);
    if ((a_in * x).minCoeff() < -1e-10) continue;
    const double obj = 0.5 * x.dot(g * x) + d.dot(x);
    if (obj < best.objective) {
      best.objective = obj;
      best.x = x;
    }
  }
  return best;
}

}  // namespace oracle
