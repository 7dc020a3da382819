#include "rpde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rpde/error.hpp"
#include "rpde/experiments.hpp"
#include "rpde/io.hpp"
#include "rpde/qp.hpp"
#include "rpde/sampling.hpp"

namespace rpde::cli {

namespace {

namespace fs = std::filesystem;

struct CommonSettings {
  int degree = 3;
  int upsampling = kDefaultUpsampling;
  std::string method = "both";
  std::string mass_convention = "unit-integral";
  double tolerance = 1e-8;
  int max_iterations = 50000;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = ".";
  std::string synthetic;
  std::size_t samples = 100;
};

struct FitSettings {
  CommonSettings common;
  std::string input;
  double h = 0.0;
};

struct SweepSettings {
  CommonSettings common;
  std::string preset;
  std::string h_grid;
  int realizations = 24;
  double shift_step = 0.025;
  int jobs = 1;
};

void add_common(CLI::App* app, CommonSettings& s) {
  app->add_option("--degree", s.degree, "B-spline degree m (0..3)")->capture_default_str();
  app->add_option("--M", s.upsampling, "Upsampling factor of the nonnegativity grid")->capture_default_str();
  app->add_option("--method", s.method, "pvs, pbf or both")->capture_default_str();
  app->add_option("--mass-convention", s.mass_convention, "Normalization of the estimate (unit-integral)")
      ->capture_default_str();
  app->add_option("--tol", s.tolerance, "QP tolerance on the KKT residuals")->capture_default_str();
  app->add_option("--max-iters", s.max_iterations, "QP iteration limit")->capture_default_str();
  app->add_option("--seed", s.seed, "Seed for all randomness")->capture_default_str();
  app->add_option("--out-dir", s.out_dir, "Directory for the output files")->capture_default_str();
  app->add_option("--synthetic", s.synthetic, "Draw samples from 'normal' or 'bimodal' instead of reading a file");
  app->add_option("--samples", s.samples, "Number of synthetic samples")->capture_default_str();
}

std::vector<Method> methods_of(const std::string& name) {
  if (name == "both") return {Method::pvs, Method::pbf};
  return {parse_method(name)};
}

TrueDensity synthetic_density(const std::string& name) {
  if (name == "normal") return TrueDensity::gaussian(0.0, 1.0);
  if (name == "bimodal") return TrueDensity::mixture({{0.5, 3.0, 1.0}, {0.5, -3.0, 1.0}});
  throw InvalidArgument("unknown synthetic distribution '" + name + "' (expected normal or bimodal)");
}

void check_common(const CommonSettings& s) {
  if (s.degree < 0 || s.degree > 3) {
    throw InvalidArgument("--degree must be 0, 1, 2 or 3, got " + std::to_string(s.degree));
  }
  if (s.upsampling < 1) throw InvalidArgument("--M must be at least 1");
  if (s.mass_convention != "unit-integral") {
    throw InvalidArgument("unsupported --mass-convention '" + s.mass_convention + "' (expected unit-integral)");
  }
  if (!(s.tolerance > 0.0)) throw InvalidArgument("--tol must be positive");
  if (s.max_iterations < 1) throw InvalidArgument("--max-iters must be positive");
  if (s.samples < 1) throw InvalidArgument("--samples must be positive");
  methods_of(s.method);
}

SolverOptions solver_options(const CommonSettings& s) {
  SolverOptions o;
  o.tolerance = s.tolerance;
  o.max_iterations = s.max_iterations;
  return o;
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

void print_kkt(std::ostream& os, const KktResiduals& k) {
  os << "  primal feasibility " << k.primal_feasibility << "\n"
     << "  dual feasibility   " << k.dual_feasibility << "\n"
     << "  complementarity    " << k.complementarity << "\n"
     << "  stationarity       " << k.stationarity << "\n";
}

int fit_command(const FitSettings& s, std::ostream& out, std::ostream& err) {
  check_common(s.common);
  if (s.input.empty() == s.common.synthetic.empty()) {
    throw InvalidArgument("give exactly one of --input and --synthetic");
  }
  if (!(s.h > 0.0) || !std::isfinite(s.h)) throw InvalidArgument("--h must be positive");
  std::vector<double> values;
  std::string source;
  if (!s.input.empty()) {
    values = io::read_samples_file(s.input);
    source = s.input;
  } else {
    std::mt19937_64 rng(stream_seed(s.common.seed, 0));
    values = synthetic_density(s.common.synthetic).sample(s.common.samples, rng);
    source = s.common.synthetic + " (seed " + std::to_string(s.common.seed) + ")";
  }
  const SampleSet samples(std::move(values));
  const BasisSpec spec{s.common.degree, s.h};
  spec.validate();
  const int m = s.common.upsampling;
  const fs::path dir = prepare_out_dir(s.common.out_dir);

  out << "samples: " << samples.size() << " from " << source << "\n"
      << "basis: degree " << spec.degree << ", h " << spec.step << ", M " << m << "\n";

  bool met = true;
  std::vector<DensityEstimate> estimates;
  std::vector<std::string> columns;
  for (Method method : methods_of(s.common.method)) {
    io::FitRecord record;
    record.method = method;
    record.spec = spec;
    record.upsampling = m;
    double objective = 0.0;
    std::optional<QPSolution> solution;
    if (method == Method::pvs) {
      const UnconstrainedFit fit = fit_unconstrained(samples, spec);
      record.coefficients = fit.estimate.coefficients();
      record.measurements = fit.measurements;
      objective = objective_value(make_bonafide_problem(fit.measurements, spec, m), record.coefficients);
      estimates.push_back(fit.estimate);
      columns.push_back("f_tilde");
    } else {
      BonaFideFit fit = fit_bonafide(samples, spec, m, solver_options(s.common));
      record.coefficients = fit.estimate.coefficients();
      record.measurements = fit.problem.measurements;
      record.kkt = fit.solution.kkt;
      record.iterations = fit.solution.iterations;
      objective = fit.solution.objective;
      solution = fit.solution;
      estimates.push_back(fit.estimate);
      columns.push_back("f_tilde_plus");
    }
    const DensityEstimate& estimate = estimates.back();
    record.mass = estimate.integral();
    const fs::path json_path = dir / ("fit_" + to_string(method) + ".json");
    io::write_json(json_path, io::to_json(record));

    out << to_string(method) << ": window [" << record.measurements.first() << ", " << record.measurements.last()
        << "], integral " << std::setprecision(12) << record.mass << std::setprecision(6)
        << ", min fine-grid value " << fine_grid_minimum(estimate, m) << ", objective " << objective;
    if (solution) {
      out << ", " << to_string(solution->status) << " after " << solution->iterations << " iterations, KKT "
          << solution->kkt.max();
      if (solution->status != SolveStatus::solved || solution->kkt.max() > s.common.tolerance) {
        met = false;
        err << "error: bona fide QP did not meet the tolerance " << s.common.tolerance << "\n";
        print_kkt(err, solution->kkt);
      }
    }
    out << "\n  wrote " << json_path.string() << "\n";
  }

  double lo = estimates.front().support().first, hi = estimates.front().support().second;
  for (const auto& e : estimates) {
    lo = std::min(lo, e.support().first);
    hi = std::max(hi, e.support().second);
  }
  const std::vector<double> xs = io::fine_grid(lo, hi, spec.step, m);
  std::vector<io::DenseColumn> dense;
  for (std::size_t i = 0; i < estimates.size(); ++i) dense.push_back({columns[i], estimates[i].evaluate(xs)});
  const fs::path csv_path = dir / "density.csv";
  io::write_dense_csv(csv_path, xs, dense);
  out << "wrote " << csv_path.string() << " (" << xs.size() << " points, spacing h/M)\n";
  return met ? kOk : kSolverFailure;
}

ExperimentConfig sweep_config(const SweepSettings& s, const CLI::App& app) {
  ExperimentConfig c;
  const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (s.preset == "fig4-quick") {
    for (int k = 0; k < 30; k += 4) c.h_grid.push_back(reference_grid_h(k));
    c.realizations = 24;
  } else if (s.preset == "fig4-full") {
    for (int k = 0; k < 30; ++k) c.h_grid.push_back(reference_grid_h(k));
    c.realizations = 120;
  } else if (!s.preset.empty()) {
    std::string list;
    for (const auto& p : kPresets) list += (list.empty() ? "" : ", ") + p;
    throw InvalidArgument("unknown preset '" + s.preset + "'; available presets: " + list);
  }
  if (given("--h-grid")) c.h_grid = parse_h_grid(s.h_grid);
  if (c.h_grid.empty()) throw InvalidArgument("give --h-grid or --preset");
  if (given("--realizations") || s.preset.empty()) c.realizations = s.realizations;
  if (!s.common.synthetic.empty()) c.density = synthetic_density(s.common.synthetic);
  c.samples = s.common.samples;
  c.degree = s.common.degree;
  c.upsampling = s.common.upsampling;
  c.shift_step = s.shift_step;
  c.seed = s.common.seed;
  c.methods = methods_of(s.common.method);
  c.solver = solver_options(s.common);
  c.jobs = s.jobs;
  return c;
}

int sweep_command(const SweepSettings& s, const CLI::App& app, std::ostream& out, std::ostream& err) {
  check_common(s.common);
  if (s.preset == "fig3") {
    FitSettings f;
    f.common = s.common;
    if (f.common.synthetic.empty()) f.common.synthetic = "bimodal";
    f.h = 0.9;
    return fit_command(f, out, err);
  }
  const ExperimentConfig config = sweep_config(s, app);
  const fs::path dir = prepare_out_dir(s.common.out_dir);
  out << "sweep: " << config.density.describe() << ", N " << config.samples << ", degree " << config.degree
      << ", " << config.h_grid.size() << " steps, " << config.realizations << " realizations, shift step "
      << config.shift_step << ", seed " << config.seed << "\n";
  const ExperimentReport report = run_sweep(config);

  out << "       h  method   eta2[dB]  stderr[dB]  theory[dB]  fail   seconds\n";
  int failures = 0;
  for (const auto& p : report.points) {
    const auto theory = reference_theory_db(p.h);
    out << std::fixed << std::setprecision(4) << std::setw(8) << p.h << "  " << std::setw(6) << to_string(p.method)
        << std::setprecision(3) << std::setw(11) << p.eta2_db << std::setw(12) << p.stderr_db << std::setw(12);
    if (theory && config.degree == 3 && config.samples == 100 && config.density.is_gaussian()) {
      out << *theory;
    } else {
      out << "-";
    }
    out << std::setw(6) << p.n_fail << std::setprecision(2) << std::setw(10) << p.seconds << "\n";
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
    failures += p.n_fail;
    for (const auto& f : p.failures) err << "failed: " << f << "\n";
  }
  io::write_json(dir / "report.json", io::to_json(report));
  io::write_report_csv(dir / "report.csv", report);
  io::write_plot_csv(dir / "plot.csv", report);
  out << "wrote " << (dir / "report.json").string() << ", " << (dir / "report.csv").string() << ", "
      << (dir / "plot.csv").string() << "\n";
  return failures == 0 ? kOk : kSolverFailure;
}

template <typename F>
int guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what();
    if (e.condition() > 0.0) err << " (condition estimate " << e.condition() << ")";
    err << "\n";
    return kSolverFailure;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalidInput;
  }
}

}  // namespace

std::vector<double> parse_h_grid(const std::string& text) {
  const auto number = [&](const std::string& field) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size() || !std::isfinite(v)) {
      throw InvalidArgument("bad number '" + field + "' in h grid '" + text + "'");
    }
    return v;
  };
  std::vector<std::string> parts;
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    std::string f;
    while (std::getline(ss, f, ':')) parts.push_back(f);
    if (parts.size() != 3) throw InvalidArgument("h grid range must be start:stop:step, got '" + text + "'");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || b < a) throw InvalidArgument("h grid range needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(number(f));
  }
  if (out.empty()) throw InvalidArgument("empty h grid");
  for (double h : out) {
    if (!(h > 0.0)) throw InvalidArgument("h grid values must be positive");
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spline density estimation with a bona fide (nonnegative) projection"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  FitSettings fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a density to samples");
  add_common(fit_cmd, fit.common);
  fit_cmd->add_option("--input", fit.input, "Sample file: one value per line or a one-column CSV");
  fit_cmd->add_option("--h", fit.h, "Basis step h")->required();

  SweepSettings sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo error sweep over h");
  add_common(sweep_cmd, sweep.common);
  sweep_cmd->add_option("--preset", sweep.preset, "fig4-quick, fig4-full or fig3");
  sweep_cmd->add_option("--h-grid", sweep.h_grid, "start:stop:step or a comma-separated list");
  sweep_cmd->add_option("--realizations", sweep.realizations, "Realizations per h")->capture_default_str();
  sweep_cmd->add_option("--shift-step", sweep.shift_step, "Spacing of the shifts in [0, h)")->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel realizations")->capture_default_str();

  FitSettings demo;
  demo.common.synthetic = "normal";
  demo.common.out_dir = "rpde-demo";
  demo.h = 0.9;
  CLI::App* demo_cmd = app.add_subcommand("demo", "Fit both estimators to synthetic N(0,1) samples");
  demo_cmd->add_option("--h", demo.h, "Basis step h")->capture_default_str();
  demo_cmd->add_option("--samples", demo.common.samples, "Number of samples")->capture_default_str();
  demo_cmd->add_option("--seed", demo.common.seed, "Seed")->capture_default_str();
  demo_cmd->add_option("--out-dir", demo.common.out_dir, "Directory for the output files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  if (*fit_cmd) return guarded([&] { return fit_command(fit, out, err); }, err);
  if (*sweep_cmd) return guarded([&] { return sweep_command(sweep, *sweep_cmd, out, err); }, err);
  return guarded([&] { return fit_command(demo, out, err); }, err);
}

}  // namespace rpde::cli
