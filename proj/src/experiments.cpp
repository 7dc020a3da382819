#include "rpde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "rpde/error.hpp"
#include "rpde/quadrature.hpp"

namespace rpde {

namespace {

double gaussian_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

// Knots of the estimate sit at (j + offset) h.
double knot_offset(int degree) { return degree % 2 == 0 ? 0.5 : 0.0; }

constexpr ReferencePoint kTheory[] = {
    {0.8, -20.1407817440131},
    {0.837931034482759, -20.4016765663381},
    {0.875862068965517, -20.6539902637598},
    {0.913793103448276, -20.8981703304167},
    {0.951724137931034, -21.1344042049591},
    {0.989655172413793, -21.3625758470338},
    {1.02758620689655, -21.5822139513007},
    {1.06551724137931, -21.79243785239},
    {1.10344827586207, -21.9919091483333},
    {1.14137931034483, -22.1787989875783},
    {1.17931034482759, -22.3507823524708},
    {1.21724137931034, -22.5050713103777},
    {1.2551724137931, -22.6384981323078},
    {1.29310344827586, -22.7476555933888},
    {1.33103448275862, -22.8290948413746},
    {1.36896551724138, -22.8795709277421},
    {1.40689655172414, -22.8963138221528},
    {1.4448275862069, -22.8772915631657},
    {1.48275862068966, -22.8214263238961},
    {1.52068965517241, -22.7287272105084},
    {1.55862068965517, -22.6003165158527},
    {1.59655172413793, -22.4383459977},
    {1.63448275862069, -22.2458205441584},
    {1.67241379310345, -22.0263618947946},
    {1.71034482758621, -21.7839509501951},
    {1.74827586206897, -21.5226835562069},
    {1.78620689655172, -21.2465645953201},
    {1.82413793103448, -20.9593530325347},
    {1.86206896551724, -20.6644597929127},
    {1.9, -20.3648928781382},
};

}  // namespace

TrueDensity::TrueDensity(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("a density needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight)) throw InvalidArgument("mixture weights must be positive");
    if (!(c.sd > 0.0) || !std::isfinite(c.sd)) throw InvalidArgument("standard deviations must be positive");
    if (!std::isfinite(c.mean)) throw InvalidArgument("means must be finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");
}

TrueDensity TrueDensity::gaussian(double mean, double sd) { return TrueDensity({{1.0, mean, sd}}); }

TrueDensity TrueDensity::mixture(std::vector<GaussianComponent> components) {
  return TrueDensity(std::move(components));
}

double TrueDensity::operator()(double x) const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * gaussian_pdf(x, c.mean, c.sd);
  return s;
}

std::vector<double> TrueDensity::sample(std::size_t n, std::mt19937_64& rng) const {
  std::vector<double> out(n);
  for (double& x : out) {
    std::size_t pick = 0;
    if (components_.size() > 1) {
      const double u = uniform_open(rng);
      double cumulative = 0.0;
      pick = components_.size() - 1;
      for (std::size_t i = 0; i < components_.size(); ++i) {
        cumulative += components_[i].weight;
        if (u < cumulative) {
          pick = i;
          break;
        }
      }
    }
    x = components_[pick].mean + components_[pick].sd * standard_normal(rng);
  }
  return out;
}

std::pair<double, double> TrueDensity::effective_support(double tails) const {
  double lo = components_.front().mean, hi = lo, sd = 0.0;
  for (const auto& c : components_) {
    lo = std::min(lo, c.mean);
    hi = std::max(hi, c.mean);
    sd = std::max(sd, c.sd);
  }
  return {lo - tails * sd, hi + tails * sd};
}

double TrueDensity::squared_norm() const {
  double s = 0.0;
  for (const auto& a : components_)
    for (const auto& b : components_)
      s += a.weight * b.weight * gaussian_pdf(a.mean, b.mean, std::hypot(a.sd, b.sd));
  return s;
}

std::string TrueDensity::describe() const {
  std::ostringstream os;
  const auto one = [&](const GaussianComponent& c) { os << "N(" << c.mean << ", " << c.sd * c.sd << ")"; };
  if (is_gaussian()) {
    one(components_.front());
    return os.str();
  }
  os << "mixture(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) os << " + ";
    os << components_[i].weight << " ";
    one(components_[i]);
  }
  os << ")";
  return os.str();
}

std::string to_string(Method method) { return method == Method::pvs ? "pvs" : "pbf"; }

Method parse_method(const std::string& name) {
  if (name == "pvs") return Method::pvs;
  if (name == "pbf") return Method::pbf;
  throw InvalidArgument("unknown method '" + name + "' (expected pvs or pbf)");
}

IntegrationGrid integration_grid(const DensityEstimate& estimate, const TrueDensity& truth, double shift,
                                 int points_per_step) {
  if (points_per_step < 1) throw InvalidArgument("points per step must be positive");
  const double h = estimate.spec().step;
  const double off = knot_offset(estimate.spec().degree);
  auto [lo, hi] = estimate.support();
  const auto [tlo, thi] = truth.effective_support(kTailWidth);
  lo = std::min(lo, tlo + shift);
  hi = std::max(hi, thi + shift);
  return {(std::floor(lo / h - off) + off) * h, (std::ceil(hi / h - off) + off) * h,
          h / static_cast<double>(points_per_step)};
}

double l2_error(const DensityEstimate& estimate, const TrueDensity& truth, double shift, const IntegrationGrid& grid) {
  const double h = estimate.spec().step;
  if (!(grid.spacing > 0.0) || grid.spacing > h / 20.0 * (1.0 + 1e-12)) {
    throw InvalidArgument("integration spacing must be positive and at most h/20");
  }
  const auto [elo, ehi] = estimate.support();
  const auto [tlo, thi] = truth.effective_support(kTailWidth);
  const double slack = 1e-9 * h;
  if (grid.lo > std::min(elo, tlo + shift) + slack || grid.hi < std::max(ehi, thi + shift) - slack) {
    throw InvalidArgument("integration grid does not cover the estimate and the true density");
  }
  const auto squared = [&](double x) {
    const double e = truth(x - shift) - estimate(x);
    return e * e;
  };
  // Break at the knots so each Simpson panel sees a single polynomial piece.
  const double off = knot_offset(estimate.spec().degree);
  std::vector<double> breaks{grid.lo};
  for (double j = std::floor(grid.lo / h - off) + 1.0;; j += 1.0) {
    const double knot = (j + off) * h;
    if (knot >= grid.hi - slack) break;
    if (knot > breaks.back() + slack) breaks.push_back(knot);
  }
  breaks.push_back(grid.hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    int panels = static_cast<int>(std::ceil((b - a) / grid.spacing - 1e-9));
    panels = std::max(2, panels + panels % 2);
    // One-sided limits at the piece ends.
    const double inset = 1e-12 * h;
    total += quadrature::composite_simpson([&](double x) { return squared(std::clamp(x, a + inset, b - inset)); },
                                           a, b, panels);
  }
  return total;
}

double l2_error(const DensityEstimate& estimate, const TrueDensity& truth, double shift) {
  return l2_error(estimate, truth, shift, integration_grid(estimate, truth, shift));
}

std::vector<double> shift_grid(double h, double shift_step) {
  if (!(h > 0.0) || !(shift_step > 0.0)) throw InvalidArgument("h and the shift step must be positive");
  std::vector<double> out;
  for (long j = 0;; ++j) {
    const double tau = static_cast<double>(j) * shift_step;
    if (tau >= h * (1.0 - 1e-12)) break;
    out.push_back(tau);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (samples < 1) throw InvalidArgument("at least one sample per realization is required");
  if (h_grid.empty()) throw InvalidArgument("the h grid is empty");
  for (double h : h_grid) BasisSpec{degree, h}.validate();
  if (upsampling < 1) throw InvalidArgument("upsampling factor M must be >= 1");
  if (realizations < 1) throw InvalidArgument("realizations must be >= 1");
  if (!(shift_step > 0.0) || !std::isfinite(shift_step)) throw InvalidArgument("shift step must be positive");
  if (points_per_step < 20) throw InvalidArgument("integration needs at least 20 points per step");
  if (methods.empty()) throw InvalidArgument("no methods selected");
  if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
}

const SweepPoint* ExperimentReport::find(double h, Method method) const {
  for (const auto& p : points)
    if (p.method == method && std::abs(p.h - h) <= 1e-12 * std::max(1.0, std::abs(h))) return &p;
  return nullptr;
}

double to_db(double value) { return 10.0 * std::log10(value); }

double stderr_db(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return 10.0 / std::numbers::ln10 * se / mean;
}

ExperimentReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  const std::size_t nh = config.h_grid.size();
  const std::size_t nm = config.methods.size();
  const std::size_t cells = nh * nm;
  const auto realizations = static_cast<std::size_t>(config.realizations);

  struct Cell {
    double error = 0.0;
    double seconds = 0.0;
    std::string failure;
  };
  std::vector<Cell> results(realizations * cells);

  const auto run_realization = [&](std::size_t r) {
    std::mt19937_64 rng(stream_seed(config.seed, r));
    const SampleSet base(config.density.sample(config.samples, rng));
    for (std::size_t ih = 0; ih < nh; ++ih) {
      const BasisSpec spec{config.degree, config.h_grid[ih]};
      const std::vector<double> shifts = shift_grid(spec.step, config.shift_step);
      for (std::size_t im = 0; im < nm; ++im) {
        Cell& cell = results[r * cells + ih * nm + im];
        const auto start = std::chrono::steady_clock::now();
        double sum = 0.0;
        try {
          for (double tau : shifts) {
            const SampleSet samples = base.shifted(tau);
            const DensityEstimate estimate =
                config.methods[im] == Method::pvs
                    ? project_unconstrained(samples, spec)
                    : project_bonafide(samples, spec, config.upsampling, config.solver);
            const IntegrationGrid grid = integration_grid(estimate, config.density, tau, config.points_per_step);
            sum += l2_error(estimate, config.density, tau, grid);
          }
          cell.error = sum / static_cast<double>(shifts.size());
        } catch (const Error& e) {
          std::ostringstream msg;
          msg << "realization " << r << ", h " << spec.step << ", " << to_string(config.methods[im]) << ": "
              << e.what();
          cell.failure = msg.str();
        }
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), realizations);
  if (workers <= 1) {
    for (std::size_t r = 0; r < realizations; ++r) run_realization(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t r = next++; r < realizations; r = next++) {
          try {
            run_realization(r);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  ExperimentReport report{config, {}};
  for (std::size_t ih = 0; ih < nh; ++ih) {
    for (std::size_t im = 0; im < nm; ++im) {
      SweepPoint point;
      point.h = config.h_grid[ih];
      point.method = config.methods[im];
      for (std::size_t r = 0; r < realizations; ++r) {
        const Cell& cell = results[r * cells + ih * nm + im];
        point.seconds += cell.seconds;
        if (cell.failure.empty()) {
          point.raw_errors.push_back(cell.error);
        } else {
          ++point.n_fail;
          point.failures.push_back(cell.failure);
        }
      }
      if (!point.raw_errors.empty()) {
        point.mean_error = std::accumulate(point.raw_errors.begin(), point.raw_errors.end(), 0.0) /
                           static_cast<double>(point.raw_errors.size());
        point.eta2_db = to_db(point.mean_error);
        point.stderr_db = rpde::stderr_db(point.raw_errors);
      } else {
        point.mean_error = std::numeric_limits<double>::quiet_NaN();
        point.eta2_db = std::numeric_limits<double>::quiet_NaN();
        point.stderr_db = std::numeric_limits<double>::quiet_NaN();
      }
      report.points.push_back(std::move(point));
    }
  }
  return report;
}

std::span<const ReferencePoint> reference_theory_curve() { return kTheory; }

double reference_grid_h(int k) {
  if (k < 0 || k > 29) throw InvalidArgument("reference grid index must be in 0..29");
  return 0.8 + static_cast<double>(k) * 1.1 / 29.0;
}

std::optional<double> reference_theory_db(double h) {
  const auto curve = reference_theory_curve();
  const double tol = 1e-9;
  if (h < curve.front().h - tol || h > curve.back().h + tol) return std::nullopt;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (h <= curve[i + 1].h + tol) {
      const double t = std::clamp((h - curve[i].h) / (curve[i + 1].h - curve[i].h), 0.0, 1.0);
      return curve[i].eta2_db + t * (curve[i + 1].eta2_db - curve[i].eta2_db);
    }
  }
  return curve.back().eta2_db;
}

}  // namespace rpde
