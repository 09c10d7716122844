// Acceptance run: one line per criterion, nonzero exit if any fails.
// Usage: acceptance <path to twophase executable> [work dir]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "twophase/dispersion.hpp"
#include "twophase/io.hpp"
#include "twophase/kernels.hpp"
#include "twophase/rng.hpp"
#include "twophase/symbol.hpp"

using namespace twophase;
using io::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << id << ": " << detail << "\n";
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const FluidParams kRT{1, 2, 1, 1, 1, 1};
const FluidParams kStable{2, 1, 1, 1, 1, 1};

void k_anchors() {
  FluidParams half{1, 1, 0.5, 0.5, 1, 1};
  const FluidParams unit{1, 1, 1, 1, 1, 1};
  double small = 0.0, large = 0.0;
  for (double th : {0.0, kPi / 4, -kPi / 4}) {
    small = std::max(small, std::abs(k_of_z(half, std::polar(1e-6, th)) - 0.5));
    const cplx z = std::polar(1e8, th);
    large = std::max(large, std::abs(z * k_of_z(unit, z) - 0.5));
  }
  report("1 k anchors", small <= 1e-4 && large <= 1e-3,
         fmt("max |k - 0.5| at 1e-6 = %.3g, max |z k - 0.5| at 1e8 = %.3g", small, large));
}

void scale_invariance() {
  const FluidParams p{1.0, 3.0, 0.7, 1.9, 1, 1};
  PortableRng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const cplx z = std::polar(std::pow(10.0, rng.uniform(-3, 3)), rng.uniform(-0.74, 0.74) * kPi);
    std::vector<cplx> ks;
    for (double tau : {0.01, 0.3, 1.0, 4.0, 50.0}) ks.push_back(tau * normal_velocity_response(p, z * tau * tau, tau));
    for (cplx k : ks) worst = std::max(worst, std::abs(k - ks[0]) / std::abs(ks[0]));
  }
  report("2 scale invariance of k", worst <= 1e-10, fmt("max relative spread %.3g", worst));
}

void rayleigh_taylor() {
  const int at_half = count_zeros_rhp(kRT, 0.5, default_zero_contour(kRT, 0.5));
  const int at_one_half = count_zeros_rhp(kRT, 1.5, default_zero_contour(kRT, 1.5));
  const double lam = *find_growth_rate(kRT, 0.5);
  // fixed point of lambda = ([[rho]] gamma_a / tau - sigma tau) k(lambda / tau^2)
  double fp = lam * 1.2;
  for (int i = 0; i < 1000; ++i) {
    const double next = ((kRT.rho2 - kRT.rho1) * kRT.gamma_a / 0.5 - kRT.sigma * 0.5) * k_of_z(kRT, fp / 0.25).real();
    const bool done = std::abs(next - fp) <= 1e-16 * fp;
    fp = next;
    if (done) break;
  }
  const double rel = std::abs(fp / lam - 1.0);
  report("3 Rayleigh-Taylor threshold", at_half == 1 && at_one_half == 0 && rel <= 1e-9,
         "zeros(0.5) = " + std::to_string(at_half) + ", zeros(1.5) = " + std::to_string(at_one_half) +
             fmt(", lambda*(0.5) = %.15g, fixed-point mismatch %.3g", lam, rel));
}

void stable_zero_free() {
  std::string counts;
  bool ok = true;
  for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const int n = count_zeros_rhp(kStable, tau, default_zero_contour(kStable, tau));
    ok = ok && n == 0;
    counts += (counts.empty() ? "" : " ") + std::to_string(n);
  }
  report("4 stable case zero free", ok, "zero counts at tau = 0.1 0.5 1 2 5: " + counts);
}

void small_lambda_asymptote() {
  // every tau on a fine grid of (0, tau*) with lambda* / tau^2 <= 1e-3
  const double tstar = *critical_wavenumber(kRT);
  int qualifying = 0;
  double worst = 0.0, tmin = 1e300;
  for (int i = 1; i < 4000; ++i) {
    const double tau = tstar * i / 4000.0;
    const auto lam = find_growth_rate(kRT, tau);
    if (!lam || *lam / (tau * tau) > 1e-3) continue;
    ++qualifying;
    tmin = std::min(tmin, tau);
    const double approx =
        ((kRT.rho2 - kRT.rho1) * kRT.gamma_a / tau - kRT.sigma * tau) / (2.0 * (kRT.mu1 + kRT.mu2));
    worst = std::max(worst, std::abs(*lam / approx - 1.0));
  }
  report("5 small-lambda asymptote", qualifying > 0 && worst <= 0.05,
         std::to_string(qualifying) + " qualifying tau, all in [" + fmt("%.4g", tmin) + ", tau*)" +
             fmt(", max relative deviation %.3g", worst));
}

void mode_response_check() {
  const double lam = *find_growth_rate(kRT, 0.5);
  std::vector<double> t;
  for (int i = 1; i <= 200; ++i) t.push_back(20.0 / lam * i / 200.0);
  const ModeResponse r = mode_response(kRT, 0.5, t);
  const double rate_err = r.fitted_rate ? std::abs(*r.fitted_rate / lam - 1.0) : 1e300;
  const double init_err = std::abs(mode_response(kRT, 0.5, {1e-8}).values[0] - 1.0);
  report("6 mode response", rate_err <= 5e-3 && init_err <= 1e-4,
         fmt("fitted rate relative error %.3g, |h(0+) - 1| = %.3g", rate_err, init_err));
}

void sandwich() {
  double lmax = 0.0;
  const double tstar = *critical_wavenumber(kRT);
  for (int i = 1; i < 64; ++i)
    if (auto l = find_growth_rate(kRT, tstar * i / 64.0)) lmax = std::max(lmax, *l);
  SandwichGridOptions o;
  o.lambda0 = 2.0 * lmax;
  const BoundsReport rt = verify_sandwich(kRT, make_sandwich_grid(o));
  o.lambda0 = 1e-3;
  const BoundsReport st = verify_sandwich(kStable, make_sandwich_grid(o));
  report("7 sandwich sweep", rt.min_ratio > 0.0 && st.min_ratio > 0.0,
         fmt("RT min %.6g max %.6g", rt.min_ratio, rt.max_ratio) + fmt(", stable min %.6g max %.6g", st.min_ratio, st.max_ratio) +
             ", points " + std::to_string(rt.points) + " + " + std::to_string(st.points));
}

void curvature() {
  const auto a = ScalarField::sample(1, 128, [](double x, double) { return 0.3 * std::sin(x); });
  const auto b = ScalarField::sample(1, 128, [](double x, double) { return 0.2 * std::sin(x) + 0.1 * std::cos(2 * x); });
  const auto c = ScalarField::sample(2, 128, [](double x, double y) { return 0.2 * std::sin(x) * std::cos(y) + 0.1 * std::cos(2 * y); });
  const double e = std::max({curvature_identity_error(a), curvature_identity_error(b), curvature_identity_error(c)});
  report("8 curvature identity", e <= 1e-8, fmt("max error %.3g", e));
}

void frechet() {
  for (KernelId id : kAllKernels) {
    std::string detail;
    bool ok = true;
    for (int n : {1, 2}) {
      const FrechetCheck c = check_frechet(id, kRT, LevelGrid{n, 16, 0.05, 12}, 1);
      ok = ok && c.pass;
      detail += fmt("n=%.0f ratio %.4g", n, c.ratio) + fmt(" (error %.3g)", c.error_coarse) + (n == 1 ? ", " : "");
    }
    report("9 Frechet " + std::string(kernel_name(id)), ok, detail);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& exe, const std::string& command, const fs::path& out) {
  const std::string cmd = "\"" + exe + "\" " + command + " --seed 7 --out \"" + out.string() + "\" > \"" +
                          (out.string() + ".log") + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void cli_checks(const std::string& exe, const fs::path& work) {
  const char* commands[] = {"k-profile", "dispersion", "verify-bounds", "mode-response", "kernel-check", "norms"};
  bool same = true;
  std::string detail;
  for (const char* cmd : commands) {
    const fs::path a = work / "a" / cmd, b = work / "b" / cmd;
    fs::create_directories(a.parent_path());
    fs::create_directories(b.parent_path());
    const int ca = run_cli(exe, cmd, a), cb = run_cli(exe, cmd, b);
    std::vector<std::string> files;
    if (fs::exists(a))
      for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    bool ok = ca == cb && (ca == 0 || ca == 3) && !files.empty();
    for (const auto& f : files) ok = ok && fs::exists(b / f) && slurp(a / f) == slurp(b / f);
    if (fs::exists(b))
      ok = ok && static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})) == files.size();
    same = same && ok;
    detail += std::string(detail.empty() ? "" : ", ") + cmd + (ok ? " identical" : " DIFFERS") + " (exit " +
              std::to_string(ca) + ", " + std::to_string(files.size()) + " files)";
  }

  // function-space suite from the norms run
  const fs::path nj = work / "a" / "norms" / "norms.json";
  if (!fs::exists(nj)) {
    report("10 function-space suite", false, "norms.json missing");
  } else {
    const json checks = io::read_json_file(nj).at("checks");
    for (const auto& [name, c] : checks.items()) {
      std::string d;
      for (const auto& [k, v] : c.items())
        if (v.is_number() || v.is_boolean()) d += (d.empty() ? "" : ", ") + k + " " + v.dump();
      report("10 " + name, c.at("pass").get<bool>(), d);
    }
  }
  report("11 determinism", same, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <twophase executable> [work dir]\n";
    return 2;
  }
  const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "twophase_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  k_anchors();
  scale_invariance();
  rayleigh_taylor();
  stable_zero_free();
  small_lambda_asymptote();
  mode_response_check();
  sandwich();
  curvature();
  frechet();
  cli_checks(argv[1], work);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " check(s) failed") << "\n";
  return failures == 0 ? 0 : 1;
}
