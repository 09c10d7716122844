#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace twophase;
using cli::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "twophase");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path fresh(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("twophase_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> csv_row(const std::filesystem::path& file, int row) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);  // metadata
  std::getline(in, line);  // header
  for (int i = 0; i <= row; ++i) std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and config errors") {
  const auto dir = fresh("errors");
  CHECK(run({}).code != cli::kPass);
  CHECK(run({"k-profile", "--rays", "0", "--out", dir.string()}).code == cli::kConfig);
  CHECK(run({"dispersion", "--set", "dispersion.tau_grid=[]", "--out", dir.string()}).code == cli::kConfig);
  CHECK(run({"norms", "--set", "norms.no_such_option=1", "--out", dir.string()}).code == cli::kConfig);
  CHECK(run({"dispersion", "--set", "params.rho1=-1", "--out", dir.string()}).code == cli::kConfig);
  CHECK(run({"dispersion", "--config", (dir / "missing.json").string(), "--out", dir.string()}).code == cli::kConfig);

  std::ofstream(dir / "bad.json") << R"({"colour": "blue"})";
  CHECK(run({"dispersion", "--config", (dir / "bad.json").string(), "--out", dir.string()}).code == cli::kConfig);
}

TEST_CASE("resolution order") {
  const cli::RunConfig c = cli::resolve_config(
      "mode-response", json{{"seed", 4}, {"mode_response", {{"samples", 10}}}}, {"mode_response.samples=12", "seed=9"});
  CHECK(c.seed == 9);
  CHECK(c.options["samples"] == 12);
  CHECK(c.options["tau"] == 0.5);
  CHECK_FALSE(c.resolved().contains("out"));
  CHECK(code_of([] { cli::resolve_config("k-profile", json{{"dispersion", 3}}, {}); }) == ErrorCode::InvalidConfig);
  CHECK(cli::exit_code_for(ErrorCode::TruncationNotConverged) == cli::kNonConvergence);
  CHECK(cli::exit_code_for(ErrorCode::WindowTooSmall) == cli::kConfig);
}

TEST_CASE("k-profile with equal viscosities starts at 1 / (mu1 + mu2)") {
  const auto dir = fresh("kprofile");
  std::ofstream(dir / "cfg.json") << R"({"params": {"mu1": 0.5, "mu2": 0.5}, "k_profile": {"per_decade": 1}})";
  const Run r = run({"k-profile", "--config", (dir / "cfg.json").string(), "--rays", "1", "--out", dir.string()});
  REQUIRE(r.code == cli::kPass);
  const auto row = csv_row(dir / "k_profile.csv", 0);
  REQUIRE(row.size() == 6);
  CHECK(std::stod(row[1]) == doctest::Approx(1e-6));
  CHECK(std::abs(std::stod(row[2]) - 0.5) < 1e-4);
  const json j = io::read_json_file(dir / "k_profile.json");
  CHECK(j["config"]["k_profile"]["rays"] == 1);
}

TEST_CASE("stable dispersion has no unstable modes") {
  const auto dir = fresh("dispersion");
  const Run r = run({"dispersion", "--set", "params.rho1=2", "--set", "params.rho2=1", "--set",
                     "dispersion.tau_points=6", "--out", dir.string()});
  REQUIRE(r.code == cli::kPass);
  const json j = io::read_json_file(dir / "dispersion.json");
  CHECK(j["tau_star"].is_null());
  CHECK(j["rows"] == 6);
  for (int i = 0; i < 6; ++i) CHECK(csv_row(dir / "dispersion.csv", i).at(2) == "0");
}

TEST_CASE("small bounds sweep") {
  const auto dir = fresh("bounds");
  const Run r = run({"verify-bounds", "--set", "verify_bounds.per_decade=2", "--set", "verify_bounds.rays=3",
                     "--set", "verify_bounds.zeta_points=2", "--set", "verify_bounds.write_rows=true", "--out",
                     dir.string()});
  CHECK(r.code == cli::kPass);
  const json j = io::read_json_file(dir / "bounds.json");
  CHECK(j["min_ratio"].get<double>() > 0.0);
  CHECK(std::filesystem::exists(dir / "sweep.csv"));
}

TEST_CASE("kernel-check curvature entries") {
  const auto dir = fresh("kernels");
  const Run r = run({"kernel-check", "--set", "kernel_check.dims=[1]", "--set", "kernel_check.samples=1", "--out",
                     dir.string()});
  CHECK((r.code == cli::kPass || r.code == cli::kCheckFailed));
  const json j = io::read_json_file(dir / "kernel_check.json");
  int curvature = 0;
  for (const auto& c : j["checks"])
    if (c["kernel"] == "curvature_identity") {
      ++curvature;
      CHECK(c["pass"] == true);
    }
  CHECK(curvature == 3);
  CHECK(std::filesystem::exists(dir / "curvature_h.bin"));
}

}
