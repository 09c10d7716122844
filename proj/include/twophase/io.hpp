#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "twophase/core.hpp"
#include "twophase/dispersion.hpp"
#include "twophase/fields.hpp"
#include "twophase/kernels.hpp"
#include "twophase/spaces.hpp"
#include "twophase/symbol.hpp"

namespace twophase::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip is not wanted here: every number goes out with 17
/// significant digits so files compare byte for byte across runs.
std::string format_double(double x);

json to_json(const FluidParams& p);
/// Flat object with keys rho1, rho2, mu1, mu2, sigma, gamma_a. Keys absent
/// from `j` keep their value in `base`; unknown keys and non-numeric values
/// throw InvalidConfig. The result is not validated.
FluidParams params_from_json(const json& j, const FluidParams& base = {});

json to_json(const SandwichPoint& pt);
json to_json(const BoundsReport& r);
json to_json(const SeminormReport& r);
json to_json(const FrechetCheck& c);
json to_json(const DispersionCurve& c);
json to_json(const ModeResponse& r);

/// {kernel, max_error, tolerance, pass}
json kernel_check_entry(std::string_view kernel, double max_error, double tolerance, bool pass);

/// Minimal CSV writer: one comment line "# <compact json>" holding the
/// metadata, then a header row, then rows. Doubles use format_double.
class CsvWriter {
 public:
  CsvWriter(const json& meta, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& x);
  CsvWriter& empty();
  void end_row();
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

std::string dispersion_csv(const DispersionCurve& c, const json& meta);
std::string mode_response_csv(const ModeResponse& r, const json& meta);

/// Serialized text is indented by two spaces and ends with a newline.
std::string dump(const json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
/// Little-endian row-major doubles.
void write_binary(const std::filesystem::path& path, const std::vector<double>& values);
std::vector<double> read_binary(const std::filesystem::path& path);

/// <stem>.bin plus <stem>.json with {n, m, y_levels, count, ...}.
void write_field(const std::filesystem::path& stem, const ScalarField& f, const json& meta);
void write_field(const std::filesystem::path& stem, const BulkField& f, const json& meta);
ScalarField read_scalar_field(const std::filesystem::path& stem);

/// Every member stacked in one binary file, the sidecar lists epsilon,
/// centres and the sample grid.
void write_partition(const std::filesystem::path& stem, const PartitionFamily& fam, const json& meta);

json read_json_file(const std::filesystem::path& path);

}  // namespace twophase::io
