#include "rpde/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rpde/error.hpp"

namespace rpde::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

nlohmann::json kkt_json(const KktResiduals& k) {
  return {{"primal_feasibility", k.primal_feasibility},
          {"dual_feasibility", k.dual_feasibility},
          {"complementarity", k.complementarity},
          {"stationarity", k.stationarity}};
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<double> read_samples(std::istream& in, const std::string& source) {
  std::vector<double> out;
  std::string raw;
  std::size_t line = 0;
  bool header_allowed = true;
  while (std::getline(in, raw)) {
    ++line;
    if (line == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
    std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (const auto comma = text.find(','); comma != std::string::npos) {
      if (!trim(text.substr(comma + 1)).empty()) {
        throw ParseError(where(source, line) + "expected a single column, got '" + text + "'");
      }
      text = trim(text.substr(0, comma));
    }
    const auto value = parse_number(text);
    if (!value) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw ParseError(where(source, line) + "not a number: '" + text + "'");
    }
    if (!std::isfinite(*value)) throw ParseError(where(source, line) + "non-finite sample '" + text + "'");
    header_allowed = false;
    out.push_back(*value);
  }
  if (in.bad()) throw IoError("failed reading " + source);
  if (out.empty()) throw ParseError(source + ": no samples found");
  return out;
}

std::vector<double> read_samples_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_samples(in, path.string());
}

nlohmann::json to_json(const FitRecord& r) {
  nlohmann::json j;
  j["h"] = r.spec.step;
  j["degree"] = r.spec.degree;
  j["offset"] = r.coefficients.first();
  j["c_s"] = std::vector<double>(r.coefficients.values().begin(), r.coefficients.values().end());
  j["method"] = to_string(r.method);
  j["mass"] = r.mass;
  j["kkt"] = r.kkt ? kkt_json(*r.kkt) : nlohmann::json(nullptr);
  j["c_a"] = std::vector<double>(r.measurements.values().begin(), r.measurements.values().end());
  j["window"] = {r.measurements.first(), r.measurements.last()};
  if (r.upsampling) j["M"] = *r.upsampling;
  if (r.iterations) j["iterations"] = *r.iterations;
  return j;
}

FitRecord fit_record_from_json(const nlohmann::json& j) {
  try {
    FitRecord r;
    r.spec = BasisSpec{j.at("degree").get<int>(), j.at("h").get<double>()};
    r.spec.validate();
    r.method = parse_method(j.at("method").get<std::string>());
    const auto c_s = j.at("c_s").get<std::vector<double>>();
    if (c_s.empty()) throw InvalidArgument("c_s is empty");
    r.coefficients = CoefficientVector(j.at("offset").get<long>(), c_s);
    const auto window = j.at("window").get<std::vector<long>>();
    const auto c_a = j.at("c_a").get<std::vector<double>>();
    if (window.size() != 2 || c_a.empty() || window[1] - window[0] + 1 != static_cast<long>(c_a.size())) {
      throw InvalidArgument("window and c_a disagree");
    }
    r.measurements = CoefficientVector(window[0], c_a);
    r.mass = j.at("mass").get<double>();
    if (!j.at("kkt").is_null()) {
      const auto& k = j.at("kkt");
      r.kkt = KktResiduals{k.at("primal_feasibility").get<double>(), k.at("dual_feasibility").get<double>(),
                           k.at("complementarity").get<double>(), k.at("stationarity").get<double>()};
    }
    if (j.contains("M")) r.upsampling = j.at("M").get<int>();
    if (j.contains("iterations")) r.iterations = j.at("iterations").get<int>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed fit record: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << "\n";
  finish(out, path);
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<double> fine_grid(double lo, double hi, double h, int upsampling) {
  if (!(h > 0.0) || upsampling < 1 || !(hi >= lo)) throw InvalidArgument("invalid fine grid");
  const double d = h / upsampling;
  const auto first = static_cast<long>(std::floor(lo / d));
  const auto last = static_cast<long>(std::ceil(hi / d));
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(last - first + 1));
  for (long j = first; j <= last; ++j) xs.push_back(static_cast<double>(j) * h / upsampling);
  return xs;
}

void write_dense_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                     const std::vector<DenseColumn>& columns) {
  for (const auto& c : columns) {
    if (c.values.size() != xs.size()) throw InvalidArgument("column " + c.name + " has the wrong length");
  }
  auto out = open_output(path);
  out << "x";
  for (const auto& c : columns) out << "," << c.name;
  out << "\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << format_double(xs[i]);
    for (const auto& c : columns) out << "," << format_double(c.values[i]);
    out << "\n";
  }
  finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (t.header.empty()) {
      t.header = fields;
      continue;
    }
    if (fields.size() != t.header.size()) throw ParseError(where(path.string(), number) + "wrong field count");
    std::vector<double> row;
    for (const auto& field : fields) {
      const auto v = parse_number(field);
      if (!v) throw ParseError(where(path.string(), number) + "not a number: '" + field + "'");
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json to_json(const ExperimentReport& report) {
  const auto& c = report.config;
  nlohmann::json j;
  j["config"] = {{"density", c.density.describe()},
                 {"samples", c.samples},
                 {"h_grid", c.h_grid},
                 {"degree", c.degree},
                 {"M", c.upsampling},
                 {"realizations", c.realizations},
                 {"shift_step", c.shift_step},
                 {"points_per_step", c.points_per_step},
                 {"seed", c.seed},
                 {"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"jobs", c.jobs}};
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : report.points) {
    const auto theory = reference_theory_db(p.h);
    points.push_back({{"h", p.h},
                      {"method", to_string(p.method)},
                      {"eta2_db", number_or_null(p.eta2_db)},
                      {"stderr_db", number_or_null(p.stderr_db)},
                      {"mean_squared_error", number_or_null(p.mean_error)},
                      {"n_fail", p.n_fail},
                      {"seconds", p.seconds},
                      {"raw_errors", p.raw_errors},
                      {"failures", p.failures},
                      {"reference_theory_db", theory ? nlohmann::json(*theory) : nlohmann::json(nullptr)}});
  }
  j["points"] = std::move(points);
  return j;
}

void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report) {
  auto out = open_output(path);
  out << "h,method,eta2_db,stderr_db,n_fail,seconds\n";
  for (const auto& p : report.points) {
    out << format_double(p.h) << "," << to_string(p.method) << "," << format_double(p.eta2_db) << ","
        << format_double(p.stderr_db) << "," << p.n_fail << "," << format_double(p.seconds) << "\n";
  }
  finish(out, path);
}

void write_plot_csv(const std::filesystem::path& path, const ExperimentReport& report) {
  auto out = open_output(path);
  out << "h,theory_pvs_db";
  for (Method m : report.config.methods) out << "," << to_string(m) << "_db," << to_string(m) << "_stderr_db";
  out << "\n";
  for (double h : report.config.h_grid) {
    const auto theory = reference_theory_db(h);
    out << format_double(h) << "," << (theory ? format_double(*theory) : "nan");
    for (Method m : report.config.methods) {
      const SweepPoint* p = report.find(h, m);
      out << "," << format_double(p->eta2_db) << "," << format_double(p->stderr_db);
    }
    out << "\n";
  }
  finish(out, path);
}

}  // namespace rpde::io
