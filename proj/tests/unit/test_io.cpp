#include <doctest.h>

#include <filesystem>

#include "support.hpp"
#include "twophase/io.hpp"

using namespace twophase;
using io::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("twophase_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles keep 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(1.0 / 3) == "0.33333333333333331");
  CHECK(std::stod(io::format_double(0.203043508271201)) == 0.203043508271201);
}

TEST_CASE("params round trip") {
  const FluidParams p{1.5, 2.5, 0.3, 0.4, 0.7, 9.81};
  const FluidParams q = io::params_from_json(io::to_json(p));
  CHECK(q.rho1 == p.rho1);
  CHECK(q.mu2 == p.mu2);
  CHECK(q.gamma_a == p.gamma_a);
  const FluidParams partial = io::params_from_json(json{{"sigma", 3.0}}, p);
  CHECK(partial.sigma == 3.0);
  CHECK(partial.rho2 == p.rho2);
  CHECK(code_of([] { io::params_from_json(json{{"viscosity", 1.0}}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::params_from_json(json{{"rho1", "one"}}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::params_from_json(json::array()); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("csv writer") {
  io::CsvWriter w(json{{"a", 1}}, {"x", "y"});
  w.cell(0.5).cell(3);
  w.end_row();
  w.empty().cell(std::string("z"));
  w.end_row();
  CHECK(w.str() == "# {\"a\":1}\nx,y\n0.5,3\n,z\n");
  w.cell(1.0);
  CHECK(code_of([&] { w.end_row(); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("binary and field round trip") {
  const auto dir = scratch_dir("fields");
  const std::vector<double> v{0.0, -1.25, 1e-300, 3.141592653589793};
  io::write_binary(dir / "raw.bin", v);
  CHECK(std::filesystem::file_size(dir / "raw.bin") == 32);
  CHECK(io::read_binary(dir / "raw.bin") == v);

  const auto f = ScalarField::sample(2, 8, [](double x, double y) { return std::sin(x) * std::cos(y); });
  io::write_field(dir / "h", f, json{{"name", "h"}});
  CHECK(io::read_scalar_field(dir / "h").values == f.values);
  const json side = io::read_json_file(dir / "h.json");
  CHECK(side["n"] == 2);
  CHECK(side["count"] == 64);
  CHECK(side["byte_order"] == "little");
  CHECK(side["name"] == "h");

  const LevelGrid g{1, 8, 0.1, 3};
  io::write_field(dir / "bulk", BulkField::sample(g, [](double x, double, double y) { return x + y; }), json::object());
  const json bs = io::read_json_file(dir / "bulk.json");
  CHECK(bs["y_levels"].size() == 6);
  CHECK(code_of([&] { io::read_scalar_field(dir / "bulk"); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { io::read_json_file(dir / "missing.json"); }) == ErrorCode::InvalidConfig);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report layout") {
  FrechetCheck c;
  c.kernel = KernelId::G2;
  c.ratio = 3.9;
  c.pass = true;
  const json j = io::to_json(c);
  CHECK(j["kernel"] == "G2");
  CHECK(j["max_error"].get<double>() == doctest::Approx(0.1));
  CHECK(j["tolerance"] == 0.5);
  CHECK(j["pass"] == true);

  const json e = io::kernel_check_entry("Fd", 1e-12, 1e-10, true);
  std::vector<std::string> keys;
  for (const auto& [k, v] : e.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"kernel", "max_error", "tolerance", "pass"});

  CHECK(io::dump(json{{"a", 1}}) == "{\n  \"a\": 1\n}\n");
}

}
