#include "twophase/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace twophase::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json to_json(const FluidParams& p) {
  return json{{"rho1", p.rho1}, {"rho2", p.rho2}, {"mu1", p.mu1},
              {"mu2", p.mu2},   {"sigma", p.sigma}, {"gamma_a", p.gamma_a}};
}

FluidParams params_from_json(const json& j, const FluidParams& base) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "params must be a JSON object");
  FluidParams p = base;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number())
      throw Error(ErrorCode::InvalidConfig, "params." + key + " must be a number");
    const double v = value.get<double>();
    if (key == "rho1") p.rho1 = v;
    else if (key == "rho2") p.rho2 = v;
    else if (key == "mu1") p.mu1 = v;
    else if (key == "mu2") p.mu2 = v;
    else if (key == "sigma") p.sigma = v;
    else if (key == "gamma_a") p.gamma_a = v;
    else throw Error(ErrorCode::InvalidConfig, "unknown params key '" + key + "'");
  }
  return p;
}

json to_json(const SandwichPoint& pt) {
  return json{{"lambda_re", pt.lambda.real()}, {"lambda_im", pt.lambda.imag()},
              {"tau_re", pt.tau.real()},       {"tau_im", pt.tau.imag()},
              {"zeta_re", pt.zeta.real()},     {"zeta_im", pt.zeta.imag()}};
}

json to_json(const BoundsReport& r) {
  return json{{"min_ratio", r.min_ratio},
              {"max_ratio", r.max_ratio},
              {"argmin", to_json(r.argmin)},
              {"argmax", to_json(r.argmax)},
              {"points", r.points},
              {"k_sup", r.k_sup},
              {"upper_constant", r.upper_constant},
              {"upper_bound_holds", r.upper_bound_holds},
              {"grid_spec", r.grid_spec},
              {"pass", r.pass}};
}

json to_json(const SeminormReport& r) {
  json trunc = json::object();
  for (const auto& [k, v] : r.quadrature) trunc[k] = v;
  return json{{"value", r.value},
              {"s", r.s},
              {"p", r.p},
              {"method", std::string(to_string(r.method))},
              {"grid", {{"n", r.n}, {"m", r.m}, {"spacing", r.spacing}}},
              {"truncation", trunc}};
}

json kernel_check_entry(std::string_view kernel, double max_error, double tolerance, bool pass) {
  return json{{"kernel", std::string(kernel)},
              {"max_error", max_error},
              {"tolerance", tolerance},
              {"pass", pass}};
}

json to_json(const FrechetCheck& c) {
  // The quantity under test is the halving ratio, so max_error is its
  // distance from 4 and the tolerance the half-width of [3.5, 4.5].
  json j = kernel_check_entry(kernel_name(c.kernel), std::abs(c.ratio - 4.0), 0.5, c.pass);
  j["ratio"] = c.ratio;
  j["eps_coarse"] = c.eps_coarse;
  j["eps_fine"] = c.eps_fine;
  j["error_coarse"] = c.error_coarse;
  j["error_fine"] = c.error_fine;
  j["derivative_scale"] = c.derivative_scale;
  return j;
}

json to_json(const DispersionCurve& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back(json{{"tau", r.tau},
                        {"lambda_star", r.lambda_star ? json(*r.lambda_star) : json(nullptr)},
                        {"zero_count", r.zero_count}});
  }
  return json{{"params", to_json(c.params)},
              {"tau_star", c.tau_star ? json(*c.tau_star) : json(nullptr)},
              {"rows", rows}};
}

json to_json(const ModeResponse& r) {
  json poles = json::array();
  for (std::size_t i = 0; i < r.poles.size(); ++i) {
    poles.push_back(json{{"re", r.poles[i].real()},
                         {"im", r.poles[i].imag()},
                         {"residue_re", r.pole_residues[i].real()},
                         {"residue_im", r.pole_residues[i].imag()}});
  }
  return json{{"tau", r.tau},
              {"fitted_rate", r.fitted_rate ? json(*r.fitted_rate) : json(nullptr)},
              {"lambda_star", r.lambda_star ? json(*r.lambda_star) : json(nullptr)},
              {"residue", {{"re", r.residue.real()}, {"im", r.residue.imag()}}},
              {"complex_poles", poles},
              {"quadrature_nodes", r.nodes},
              {"samples", r.times.size()}};
}

// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(const json& meta, const std::vector<std::string>& header)
    : columns_(header.size()) {
  out_ = "# " + meta.dump() + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& x) {
  if (filled_) out_ += ',';
  out_ += x;
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }
CsvWriter& CsvWriter::empty() { return cell(std::string()); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw Error(ErrorCode::PreconditionViolated, "CSV row has the wrong width");
  out_ += '\n';
  filled_ = 0;
}

std::string dispersion_csv(const DispersionCurve& c, const json& meta) {
  CsvWriter w(meta, {"tau", "lambda_star", "zero_count"});
  for (const auto& r : c.rows) {
    w.cell(r.tau);
    if (r.lambda_star) w.cell(*r.lambda_star);
    else w.empty();
    w.cell(r.zero_count);
    w.end_row();
  }
  return w.str();
}

std::string mode_response_csv(const ModeResponse& r, const json& meta) {
  CsvWriter w(meta, {"t", "re_h", "im_h"});
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    w.cell(r.times[i]).cell(r.values[i].real()).cell(r.values[i].imag());
    w.end_row();
  }
  return w.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::InvalidConfig, "write failed for " + path.string());
}

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  else return __builtin_bswap64(v);
}

}  // namespace

void write_binary(const std::filesystem::path& path, const std::vector<double>& values) {
  std::string buf(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  write_text(path, buf);
}

std::vector<double> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() % 8 != 0) throw Error(ErrorCode::GridMismatch, "binary size is not a multiple of 8");
  std::vector<double> out(buf.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    out[i] = std::bit_cast<double>(to_little(bits));
  }
  return out;
}

namespace {

std::filesystem::path with_ext(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

json sidecar_base(int n, int m, const json& meta) {
  json j{{"schema_version", kSchemaVersion}, {"dtype", "float64"}, {"byte_order", "little"},
         {"n", n}, {"m", m}};
  for (const auto& [k, v] : meta.items()) j[k] = v;
  return j;
}

}  // namespace

void write_field(const std::filesystem::path& stem, const ScalarField& f, const json& meta) {
  validate_field(f);
  json side = sidecar_base(f.n, f.m, meta);
  side["y_levels"] = json::array();
  side["count"] = f.size();
  write_binary(with_ext(stem, ".bin"), f.values);
  write_text(with_ext(stem, ".json"), dump(side));
}

void write_field(const std::filesystem::path& stem, const BulkField& f, const json& meta) {
  validate_field(f);
  json side = sidecar_base(f.grid.n, f.grid.m, meta);
  json levels = json::array();
  for (int l = 0; l < f.grid.count(); ++l) levels.push_back(f.grid.y(l));
  side["y_levels"] = levels;
  std::vector<double> all;
  for (const auto& s : f.slices) all.insert(all.end(), s.values.begin(), s.values.end());
  side["count"] = all.size();
  write_binary(with_ext(stem, ".bin"), all);
  write_text(with_ext(stem, ".json"), dump(side));
}

ScalarField read_scalar_field(const std::filesystem::path& stem) {
  const json side = read_json_file(with_ext(stem, ".json"));
  if (!side.at("y_levels").empty())
    throw Error(ErrorCode::GridMismatch, "sidecar describes a bulk field");
  ScalarField f(side.at("n").get<int>(), side.at("m").get<int>());
  f.values = read_binary(with_ext(stem, ".bin"));
  validate_field(f);
  return f;
}

void write_partition(const std::filesystem::path& stem, const PartitionFamily& fam,
                     const json& meta) {
  if (fam.phi.empty()) throw Error(ErrorCode::EmptyGrid, "empty partition family");
  const SampledFunction& g0 = fam.phi.front();
  json side = sidecar_base(g0.n, g0.m, meta);
  side["epsilon"] = fam.epsilon;
  side["lo"] = g0.lo;
  side["hi"] = g0.hi;
  side["members"] = fam.phi.size();
  side["centers"] = fam.centers;
  side["max_sum_deviation"] = fam.max_sum_deviation;
  std::vector<double> all;
  for (const auto& g : fam.phi) all.insert(all.end(), g.values.begin(), g.values.end());
  side["count"] = all.size();
  write_binary(with_ext(stem, ".bin"), all);
  write_text(with_ext(stem, ".json"), dump(side));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

}  // namespace twophase::io
