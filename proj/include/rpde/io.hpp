#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpde/experiments.hpp"
#include "rpde/qp.hpp"
#include "rpde/sampling.hpp"

namespace rpde::io {

// One real per line, or a one-column CSV. Blank lines and lines starting
// with '#' are skipped; the first data line may be a non-numeric header.
// Throws ParseError naming `source` and the line number.
std::vector<double> read_samples(std::istream& in, const std::string& source);
std::vector<double> read_samples_file(const std::filesystem::path& path);

// Serialized fit: {h, degree, offset, c_s, method, mass, kkt, c_a, window}.
struct FitRecord {
  Method method = Method::pvs;
  BasisSpec spec;
  CoefficientVector coefficients;
  CoefficientVector measurements;
  double mass = 0.0;
  std::optional<KktResiduals> kkt;
  std::optional<int> upsampling;
  std::optional<int> iterations;

  DensityEstimate estimate() const { return DensityEstimate(spec, coefficients); }
};

nlohmann::json to_json(const FitRecord& record);
FitRecord fit_record_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Fine grid j * h / M covering [lo, hi].
std::vector<double> fine_grid(double lo, double hi, double h, int upsampling);

struct DenseColumn {
  std::string name;
  std::vector<double> values;
};
void write_dense_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                     const std::vector<DenseColumn>& columns);
// Header names and rows of a numeric CSV written by write_dense_csv.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentReport& report);
// Columns h, method, eta2_db, stderr_db, n_fail, seconds.
void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report);
// One row per h: reference theory value, then dB and standard error per method.
void write_plot_csv(const std::filesystem::path& path, const ExperimentReport& report);

// 17 significant digits.
std::string format_double(double v);

}  // namespace rpde::io
