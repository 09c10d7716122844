#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "twophase/rng.hpp"

namespace twophase::cli {

namespace {

std::string section_name(std::string command) {
  std::replace(command.begin(), command.end(), '-', '_');
  return command;
}

bool known_command(const std::string& c) {
  return std::find(std::begin(kCommands), std::end(kCommands), c) != std::end(kCommands);
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

double num(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_number()) bad_config(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad_config(std::string(key) + " must be finite");
  return x;
}

int integer(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_number_integer()) bad_config(std::string(key) + " must be an integer");
  return v.get<int>();
}

bool flag(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_boolean()) bad_config(std::string(key) + " must be true or false");
  return v.get<bool>();
}

std::vector<double> num_list(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_array()) bad_config(std::string(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) bad_config(std::string(key) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json header(const RunConfig& cfg) {
  return json{{"schema_version", io::kSchemaVersion},
              {"command", cfg.command},
              {"config", cfg.resolved()}};
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const double decades = std::log10(hi / lo);
  const int count = std::max(2, static_cast<int>(std::lround(decades * per_decade)) + 1);
  std::vector<double> out(count);
  for (int j = 0; j < count; ++j) out[j] = lo * std::pow(10.0, decades * j / (count - 1));
  out.back() = hi;
  return out;
}

struct Outputs {
  std::filesystem::path dir;
  void text(const std::string& name, const std::string& body) const { io::write_text(dir / name, body); }
  void json_file(const std::string& name, const json& j) const { text(name, io::dump(j)); }
};

Outputs prepare(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec) bad_config("cannot create output directory " + cfg.out.string() + ": " + ec.message());
  return Outputs{cfg.out};
}

// ---------------------------------------------------------------------------

int cmd_k_profile(const RunConfig& cfg, std::ostream& log) {
  const FluidParams& p = validate_params(cfg.params);
  const json& o = cfg.options;
  const int rays = integer(o, "rays");
  if (rays < 1) bad_config("at least one ray required");
  const double max_angle = num(o, "max_angle");
  const double z_min = num(o, "z_min"), z_max = num(o, "z_max");
  if (!(z_min > 0.0 && z_max > z_min)) bad_config("need 0 < z_min < z_max");
  const int per_decade = integer(o, "per_decade");
  if (per_decade < 1) bad_config("per_decade must be positive");
  if (!(max_angle >= 0.0 && max_angle < kPi)) bad_config("max_angle must lie in [0, pi)");

  std::vector<double> angles(rays, 0.0);
  if (rays > 1)
    for (int i = 0; i < rays; ++i) angles[i] = -max_angle + 2.0 * max_angle * i / (rays - 1);

  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  io::CsvWriter csv(meta, {"angle", "abs_z", "k_re", "k_im", "zk_re", "zk_im"});
  const auto moduli = log_grid(z_min, z_max, per_decade);
  for (double th : angles) {
    for (double r : moduli) {
      const cplx z = std::polar(r, th);
      const cplx k = k_of_z(p, z);
      const cplx zk = z * k;
      csv.cell(th).cell(r).cell(k.real()).cell(k.imag()).cell(zk.real()).cell(zk.imag());
      csv.end_row();
    }
  }
  out.text("k_profile.csv", csv.str());

  // Limits k(0) = 1/(2(mu1 + mu2)) and z k(z) -> 1/(rho1 + rho2), relative form.
  const double small = num(o, "anchor_small"), large = num(o, "anchor_large");
  const double small_tol = num(o, "small_tol"), large_tol = num(o, "large_tol");
  bool k0_pass = true, zk_pass = true;
  json anchors = json::array();
  for (double th : angles) {
    const cplx zs = std::polar(small, th), zl = std::polar(large, th);
    const cplx ks = k_of_z(p, zs), kl = k_of_z(p, zl);
    const double es = std::abs(2.0 * (p.mu1 + p.mu2) * ks - 1.0);
    const double el = std::abs((p.rho1 + p.rho2) * zl * kl - 1.0);
    k0_pass = k0_pass && es <= small_tol;
    zk_pass = zk_pass && el <= large_tol;
    anchors.push_back(json{
        {"angle", th},
        {"small", {{"abs_z", small}, {"k_re", ks.real()}, {"k_im", ks.imag()}, {"error", es},
                   {"tolerance", small_tol}, {"pass", es <= small_tol}}},
        {"large", {{"abs_z", large}, {"zk_re", (zl * kl).real()}, {"zk_im", (zl * kl).imag()},
                   {"error", el}, {"tolerance", large_tol}, {"pass", el <= large_tol}}}});
  }

  // k through (lambda, tau) = (z tau^2, tau) must not depend on tau.
  const int samples = integer(o, "scale_samples");
  const double theta = num(o, "sector_half_angle");
  const double scale_tol = num(o, "scale_tol");
  PortableRng rng(cfg.seed);
  double spread = 0.0;
  for (int i = 0; i < samples; ++i) {
    const cplx z = std::polar(std::pow(10.0, rng.uniform(-3.0, 3.0)), rng.uniform(-theta, theta) * 0.999);
    const double taus[] = {0.1, 0.5, 1.0, 2.0, 10.0};
    std::vector<cplx> ks;
    for (double t : taus) ks.push_back(t * normal_velocity_response(p, z * t * t, t));
    for (const cplx& k : ks) spread = std::max(spread, std::abs(k - ks[0]) / std::abs(ks[0]));
  }
  const bool scale_pass = spread <= scale_tol;
  const double k_sup = k_bound(p, theta);

  json summary = meta;
  summary["k0_expected"] = 1.0 / (2.0 * (p.mu1 + p.mu2));
  summary["zk_expected"] = 1.0 / (p.rho1 + p.rho2);
  summary["anchors"] = anchors;
  summary["k0_anchor_pass"] = k0_pass;
  summary["zk_anchor_pass"] = zk_pass;
  summary["scale_invariance"] = {{"samples", samples}, {"max_spread", spread},
                                 {"tolerance", scale_tol}, {"pass", scale_pass}};
  summary["k_sup"] = k_sup;
  const bool pass = k0_pass && zk_pass && scale_pass && std::isfinite(k_sup);
  summary["pass"] = pass;
  out.json_file("k_profile.json", summary);
  log << "k-profile: " << rays << " rays x " << moduli.size() << " moduli, k(0) anchor "
      << (k0_pass ? "pass" : "FAIL") << ", zk anchor " << (zk_pass ? "pass" : "FAIL")
      << ", scale invariance " << (scale_pass ? "pass" : "FAIL") << "\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

std::vector<double> tau_grid(const json& o) {
  if (!o.at("tau_grid").is_null()) return num_list(o, "tau_grid");
  const int points = integer(o, "tau_points");
  if (points < 0) bad_config("tau_points must be non-negative");
  const double lo = num(o, "tau_min"), hi = num(o, "tau_max");
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
  return g;
}

int cmd_dispersion(const RunConfig& cfg, std::ostream& log) {
  const FluidParams& p = validate_params(cfg.params);
  const auto grid = tau_grid(cfg.options);
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "tau grid is empty");
  const DispersionCurve curve = dispersion_curve(p, grid, cfg.threads);

  const bool unstable = p.rho2 > p.rho1 && curve.tau_star.has_value();
  const double edge = num(cfg.options, "edge_tol");
  json failures = json::array();
  int exempt = 0;
  for (const auto& r : curve.rows) {
    int expected = 0;
    if (unstable) {
      const double ts = *curve.tau_star;
      if (std::abs(r.tau - ts) <= edge * ts) {
        ++exempt;
        continue;
      }
      expected = r.tau < ts ? 1 : 0;
    }
    const bool has_root = r.lambda_star.has_value() && *r.lambda_star > 0.0;
    if (r.zero_count != expected || has_root != (expected == 1))
      failures.push_back(json{{"tau", r.tau}, {"zero_count", r.zero_count}, {"expected", expected}});
  }

  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  meta["params"] = io::to_json(curve.params);
  meta["tau_star"] = curve.tau_star ? json(*curve.tau_star) : json(nullptr);
  out.text("dispersion.csv", io::dispersion_csv(curve, meta));

  json summary = meta;
  summary["rows"] = curve.rows.size();
  summary["rows_exempt_at_tau_star"] = exempt;
  summary["zero_count_expectation"] =
      unstable ? "1 below tau_star, 0 above" : "0 everywhere";
  summary["failures"] = failures;
  summary["pass"] = failures.empty();
  out.json_file("dispersion.json", summary);
  log << "dispersion: " << curve.rows.size() << " rows, " << failures.size()
      << " zero-count mismatches\n";
  return failures.empty() ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

int cmd_verify_bounds(const RunConfig& cfg, std::ostream& log) {
  const FluidParams& p = validate_params(cfg.params);
  const json& o = cfg.options;
  SandwichGridOptions go;
  std::string source = "config";
  if (o.at("lambda0").is_string()) {
    if (o.at("lambda0").get<std::string>() != "auto") bad_config("lambda0 must be a number or \"auto\"");
    // Above every growth rate so the sweep stays clear of the unstable zero.
    go.lambda0 = num(o, "stable_lambda0");
    source = "auto: stable configuration";
    if (const auto ts = critical_wavenumber(p); ts && p.rho2 > p.rho1) {
      const int samples = integer(o, "auto_samples");
      double mx = 0.0;
      for (int i = 1; i < samples; ++i)
        if (const auto l = find_growth_rate(p, *ts * i / samples)) mx = std::max(mx, *l);
      if (mx > 0.0) {
        go.lambda0 = num(o, "auto_factor") * mx;
        source = "auto: factor times max growth rate";
      }
    }
  } else {
    go.lambda0 = num(o, "lambda0");
  }
  go.eta = num(o, "eta");
  go.beta = num(o, "beta");
  go.delta = num(o, "delta");
  go.lambda_max = num(o, "lambda_max");
  go.tau_min = num(o, "tau_min");
  go.tau_max = num(o, "tau_max");
  go.per_decade = integer(o, "per_decade");
  go.rays = integer(o, "rays");
  go.zeta_points = integer(o, "zeta_points");
  const SandwichGrid grid = make_sandwich_grid(go);

  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  BoundsReport rep;
  if (flag(o, "write_rows")) {
    std::ofstream rows(out.dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    if (!rows) bad_config("cannot open sweep.csv");
    io::CsvWriter head(meta, {"lambda_re", "lambda_im", "tau_re", "tau_im", "zeta_re", "zeta_im",
                              "k_re", "k_im", "s_re", "s_im", "ratio"});
    rows << head.str();
    rep = verify_sandwich(p, grid, 1, [&](const SandwichRow& r) {
      const double v[] = {r.point.lambda.real(), r.point.lambda.imag(), r.point.tau.real(),
                          r.point.tau.imag(),    r.point.zeta.real(),   r.point.zeta.imag(),
                          r.k.real(),            r.k.imag(),            r.s.real(),
                          r.s.imag(),            r.ratio};
      for (int i = 0; i < 11; ++i) rows << (i ? "," : "") << io::format_double(v[i]);
      rows << '\n';
    });
  } else {
    rep = verify_sandwich(p, grid, cfg.threads);
  }

  json summary = meta;
  summary["lambda0"] = go.lambda0;
  summary["lambda0_source"] = source;
  const json rj = io::to_json(rep);
  for (const auto& [k, v] : rj.items()) summary[k] = v;
  const bool pass = rep.pass && rep.upper_bound_holds;
  summary["pass"] = pass;
  out.json_file("bounds.json", summary);
  log << "verify-bounds: " << rep.points << " points, min ratio " << io::format_double(rep.min_ratio)
      << ", max ratio " << io::format_double(rep.max_ratio) << "\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

int cmd_mode_response(const RunConfig& cfg, std::ostream& log) {
  const FluidParams& p = validate_params(cfg.params);
  const json& o = cfg.options;
  const double tau = num(o, "tau");
  if (!(tau > 0.0)) bad_config("tau must be positive");
  const int samples = integer(o, "samples");
  if (samples < 3) bad_config("need at least 3 time samples");
  ModeResponseOptions mo;
  mo.nodes = integer(o, "nodes");
  mo.contour_scale = num(o, "contour_scale");
  mo.convergence_tol = num(o, "convergence_tol");

  std::optional<double> lstar;
  if (p.rho2 > p.rho1) lstar = find_growth_rate(p, tau);
  double t_end = 0.0;
  if (o.at("t_end").is_null()) t_end = lstar ? 20.0 / *lstar : 20.0;
  else t_end = num(o, "t_end");
  if (!(t_end > 0.0)) bad_config("t_end must be positive");

  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = t_end * (i + 1) / samples;
  const ModeResponse resp = mode_response(p, tau, times, mo);
  const double t0 = num(o, "initial_time") * t_end;
  const cplx h0 = mode_response(p, tau, {t0}, mo).values.front();

  json checks = json::object();
  const double init_err = std::abs(h0 - 1.0);
  const double init_tol = num(o, "initial_tol");
  checks["initial_value"] = {{"t", t0}, {"re_h", h0.real()}, {"im_h", h0.imag()},
                             {"error", init_err}, {"tolerance", init_tol},
                             {"pass", init_err <= init_tol}};
  bool pass = init_err <= init_tol;
  if (lstar) {
    const double tol = num(o, "rate_tol");
    const double err = resp.fitted_rate ? std::abs(*resp.fitted_rate - *lstar) / *lstar
                                        : std::numeric_limits<double>::infinity();
    checks["growth_rate"] = {{"lambda_star", *lstar}, {"relative_error", err},
                             {"tolerance", tol}, {"pass", err <= tol}};
    pass = pass && err <= tol;
  } else {
    const double slack = num(o, "stable_bound");
    double mx = 0.0;
    for (const cplx& v : resp.values) mx = std::max(mx, std::abs(v));
    const bool bounded = mx <= 1.0 + slack;
    const bool decays = std::abs(resp.values.back()) < std::abs(resp.values.front());
    checks["bounded_decay"] = {{"max_abs_h", mx}, {"bound", 1.0 + slack},
                               {"first_abs_h", std::abs(resp.values.front())},
                               {"last_abs_h", std::abs(resp.values.back())},
                               {"pass", bounded && decays}};
    pass = pass && bounded && decays;
  }

  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  json rj = io::to_json(resp);
  for (const auto& [k, v] : rj.items()) meta[k] = v;
  out.text("mode_response.csv", io::mode_response_csv(resp, meta));
  json summary = meta;
  summary["t_end"] = t_end;
  summary["checks"] = checks;
  summary["pass"] = pass;
  out.json_file("mode_response.json", summary);
  log << "mode-response: tau " << io::format_double(tau) << ", " << samples << " samples, "
      << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

int cmd_kernel_check(const RunConfig& cfg, std::ostream& log) {
  const FluidParams& p = validate_params(cfg.params);
  const json& o = cfg.options;
  const int cm = integer(o, "curvature_m");
  const double ctol = num(o, "curvature_tol");
  json entries = json::array();
  bool pass = true;
  auto add = [&](json e) {
    pass = pass && e.at("pass").get<bool>();
    entries.push_back(std::move(e));
  };

  struct Case {
    const char* name;
    int n;
    double (*f)(double, double);
  };
  const Case cases[] = {
      {"0.3 sin x", 1, [](double x, double) { return 0.3 * std::sin(x); }},
      {"0.2 sin x + 0.1 cos 2x", 1,
       [](double x, double) { return 0.2 * std::sin(x) + 0.1 * std::cos(2.0 * x); }},
      {"0.2 sin x cos y + 0.1 cos 2y", 2,
       [](double x, double y) { return 0.2 * std::sin(x) * std::cos(y) + 0.1 * std::cos(2.0 * y); }},
  };
  ScalarField last_h;
  for (const Case& c : cases) {
    const ScalarField h = ScalarField::sample(c.n, cm, c.f);
    const double err = curvature_identity_error(h);
    json e = io::kernel_check_entry("curvature_identity", err, ctol, err <= ctol);
    e["h"] = c.name;
    e["n"] = c.n;
    e["m"] = cm;
    add(e);
    last_h = h;
  }

  const LevelGrid grid{0, integer(o, "m"), num(o, "dy"), integer(o, "levels")};
  const int samples = integer(o, "samples");
  const double eps = num(o, "eps");
  const double dual_tol = num(o, "dual_tol");
  for (double dn : num_list(o, "dims")) {
    LevelGrid g = grid;
    g.n = static_cast<int>(dn);
    if (g.n != 1 && g.n != 2) bad_config("dims entries must be 1 or 2");

    const KernelPoint z = random_kernel_point(g, cfg.seed);
    const FdResult fd = eval_F_d(BulkVector(z.u.begin(), z.u.begin() + g.n), z.h);
    json e = io::kernel_check_entry("Fd_dual_form", fd.max_gap, dual_tol, fd.max_gap <= dual_tol);
    e["n"] = g.n;
    add(e);

    const KernelPoint zero = random_kernel_point(g, cfg.seed, 0.0);
    for (KernelId id : kAllKernels) {
      double mx = 0.0;
      for (double v : eval_kernel(id, p, zero)) mx = std::max(mx, std::abs(v));
      json ze = io::kernel_check_entry(std::string(kernel_name(id)) + "_rest_state", mx, 0.0, mx == 0.0);
      ze["n"] = g.n;
      add(ze);
    }
    for (KernelId id : kAllKernels) {
      json fe = io::to_json(check_frechet(id, p, g, cfg.seed, samples, eps));
      fe["n"] = g.n;
      add(fe);
    }
  }

  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  if (flag(o, "write_fields")) {
    io::write_field(out.dir / "curvature_h", last_h, json{{"field", "h"}});
    io::write_field(out.dir / "curvature_kappa", mean_curvature_graph(last_h),
                    json{{"field", "mean curvature of the graph of h"}});
  }
  json summary = meta;
  summary["checks"] = entries;
  summary["pass"] = pass;
  out.json_file("kernel_check.json", summary);
  int failed = 0;
  for (const auto& e : entries) failed += e.at("pass").get<bool>() ? 0 : 1;
  log << "kernel-check: " << entries.size() << " checks, " << failed << " failed\n";
  return pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

double gaussian_sum(const std::vector<std::array<double, 3>>& terms, double x) {
  double v = 0.0;
  for (const auto& [a, c, w] : terms) v += a * std::exp(-(x - c) * (x - c) / (w * w));
  return v;
}

int cmd_norms(const RunConfig& cfg, std::ostream& log) {
  const json& o = cfg.options;
  const double s = num(o, "s");
  const double box = num(o, "box");
  const int m = integer(o, "m");
  const int threads = cfg.threads;
  PortableRng rng(cfg.seed);
  json checks = json::object();
  bool pass = true;
  auto record = [&](const char* name, json j) {
    pass = pass && j.at("pass").get<bool>();
    checks[name] = std::move(j);
  };
  auto on_box = [&](const std::function<double(double)>& f) {
    return SampledFunction::sample(1, m, -box, box, false, [&](double x, double) { return f(x); });
  };

  // Reference reports on a unit Gaussian.
  const SampledFunction gauss = on_box([](double x) { return std::exp(-x * x); });
  const SeminormReport slob = slobodeckij_seminorm(gauss, s, 2.0, threads);
  const SeminormReport pois = poisson_seminorm(gauss, s, 2.0);
  const SeminormReport four = fourier_seminorm_p2(gauss, s, integer(o, "fourier_pad"));
  {
    const double err = std::abs(slob.value / four.value - 1.0);
    const double tol = num(o, "fourier_tol");
    record("fourier_oracle", {{"slobodeckij", slob.value}, {"fourier", four.value},
                              {"relative_error", err}, {"tolerance", tol}, {"pass", err <= tol}});
  }

  // Riesz round trip on mean-zero trigonometric polynomials.
  {
    const int rm = integer(o, "riesz_m");
    const double rs = num(o, "riesz_s");
    double err = 0.0;
    for (int n = 1; n <= 2; ++n) {
      std::vector<std::array<double, 4>> modes;
      for (int j = 0; j < 6; ++j)
        modes.push_back({static_cast<double>(rng.integer(1, 8)), static_cast<double>(n == 2 ? rng.integer(-8, 8) : 0),
                         rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * kPi)});
      const auto g = SampledFunction::sample(n, rm, 0.0, 2.0 * kPi, true, [&](double x, double y) {
        double v = 0.0;
        for (const auto& [k0, k1, a, ph] : modes) v += a * std::cos(k0 * x + k1 * y + ph);
        return v;
      });
      const auto back = riesz_potential(riesz_potential(g, rs), -rs);
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(back.values[i] - g.values[i]));
    }
    const double tol = num(o, "riesz_tol");
    record("riesz_round_trip", {{"s", rs}, {"max_error", err}, {"tolerance", tol}, {"pass", err <= tol}});
  }

  // Dilation homogeneity: g(c x) scales by c^(s - n/p).
  {
    const double tol = num(o, "homogeneity_tol");
    json rows = json::array();
    double worst = 0.0;
    for (double p : num_list(o, "p_list")) {
      const double base_s = slobodeckij_seminorm(gauss, s, p, threads).value;
      const double base_p = poisson_seminorm(gauss, s, p).value;
      for (double c : num_list(o, "dilations")) {
        const auto gc = on_box([c](double x) { return std::exp(-c * c * x * x); });
        const double scale = std::pow(c, s - 1.0 / p);
        const double es = std::abs(slobodeckij_seminorm(gc, s, p, threads).value / (scale * base_s) - 1.0);
        const double ep = std::abs(poisson_seminorm(gc, s, p).value / (scale * base_p) - 1.0);
        worst = std::max({worst, es, ep});
        rows.push_back(json{{"p", p}, {"c", c}, {"slobodeckij_error", es}, {"poisson_error", ep}});
      }
    }
    record("homogeneity", {{"cases", rows}, {"max_error", worst}, {"tolerance", tol}, {"pass", worst <= tol}});
  }

  // Equivalence band over a seeded family of Gaussian sums.
  {
    const double bp = num(o, "band_p");
    const int count = integer(o, "family");
    json ratios = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < count; ++i) {
      std::vector<std::array<double, 3>> terms;
      const int k = rng.integer(1, 3);
      for (int j = 0; j < k; ++j)
        terms.push_back({rng.uniform(0.5, 1.5) * (rng.integer(0, 1) ? 1.0 : -1.0),
                         rng.uniform(-3.0, 3.0), rng.uniform(0.5, 2.0)});
      const auto g = on_box([&](double x) { return gaussian_sum(terms, x); });
      const double r = poisson_seminorm(g, s, bp).value / slobodeckij_seminorm(g, s, bp, threads).value;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ratios.push_back(r);
    }
    const double limit = num(o, "band_limit");
    record("equivalence_band", {{"p", bp}, {"ratios", ratios}, {"min", lo}, {"max", hi},
                                {"max_over_min", hi / lo}, {"limit", limit}, {"pass", hi / lo <= limit}});
  }

  // Hardy ratio family max over t^k, k = 1..K, per interval length.
  {
    const double r = num(o, "hardy_r"), hp = num(o, "hardy_p");
    const int hm = integer(o, "hardy_m"), powers = integer(o, "hardy_powers");
    json per_length = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double a : num_list(o, "hardy_lengths")) {
      double fam = 0.0;
      json rs = json::array();
      for (int k = 1; k <= powers; ++k) {
        const auto g = SampledFunction::sample(1, hm, 0.0, a, false,
                                               [k](double t, double) { return std::pow(t, k); });
        const double v = hardy_ratio(g, r, hp).ratio;
        fam = std::max(fam, v);
        rs.push_back(v);
      }
      lo = std::min(lo, fam);
      hi = std::max(hi, fam);
      per_length.push_back(json{{"a", a}, {"ratios", rs}, {"family_max", fam}});
    }
    const double tol = num(o, "hardy_tol");
    const double variation = (hi - lo) / lo;
    record("hardy_uniformity", {{"r", r}, {"p", hp}, {"lengths", per_length}, {"variation", variation},
                                {"tolerance", tol}, {"pass", variation < tol}});
  }

  // C^1 extension: seam, sup-norm and derivative bounds.
  {
    const double a = num(o, "extension_a");
    const int em = integer(o, "extension_m"), count = integer(o, "extension_family");
    const double seam_tol = num(o, "seam_tol");
    double seam = 0.0, sup_ratio = 0.0, dsup_ratio = 0.0, dseam = 0.0;
    bool exact = true;
    // one-sided seven-point slopes at t = a from either side of the seam
    std::vector<double> left_nodes, right_nodes;
    for (int j = 0; j < 7; ++j) {
      left_nodes.push_back(-j);
      right_nodes.push_back(j);
    }
    const auto wl = fornberg_weights(0.0, left_nodes, 1)[1];
    const auto wr = fornberg_weights(0.0, right_nodes, 1)[1];
    for (int i = 0; i < count; ++i) {
      const double c0 = rng.uniform(-1.0, 1.0), c1 = rng.uniform(-1.0, 1.0), c2 = rng.uniform(-1.0, 1.0);
      const auto h = SampledFunction::sample(1, em, 0.0, a, false, [&](double t, double) {
        return t * t * (c0 + c1 * t + c2 * t * t);
      });
      const auto e = extend_c1(h);
      for (int j = 0; j < em; ++j) exact = exact && e.values[j] == h.values[j];
      seam = std::max(seam, std::abs(e.values[em - 1] - h.values[em - 1]));
      double hs = 0.0, es = 0.0;
      for (double v : h.values) hs = std::max(hs, std::abs(v));
      for (double v : e.values) es = std::max(es, std::abs(v));
      sup_ratio = std::max(sup_ratio, es / hs);
      const auto dh = derivative_1d(h), de = derivative_1d(e);
      double dhs = 0.0, des = 0.0;
      for (double v : dh.values) dhs = std::max(dhs, std::abs(v));
      for (double v : de.values) des = std::max(des, std::abs(v));
      dsup_ratio = std::max(dsup_ratio, des / dhs);
      const double sp = h.spacing();
      double left = 0.0, right = 0.0;
      for (int j = 0; j < 7; ++j) {
        left += wl[j] * e.values[em - 1 - j] / sp;
        right += wr[j] * e.values[em - 1 + j] / sp;
      }
      dseam = std::max(dseam, std::abs(left - right) / std::max(1.0, dhs));
    }
    const double dtol = num(o, "derivative_seam_tol");
    const bool ok = exact && seam <= seam_tol && sup_ratio <= 5.0 && dsup_ratio <= 7.0 && dseam <= dtol;
    record("extension", {{"original_segment_exact", exact}, {"seam_error", seam}, {"seam_tolerance", seam_tol},
                         {"derivative_seam_mismatch", dseam}, {"derivative_seam_tolerance", dtol},
                         {"sup_ratio", sup_ratio}, {"sup_bound", 5.0},
                         {"derivative_sup_ratio", dsup_ratio}, {"derivative_sup_bound", 7.0},
                         {"pass", ok}});
  }

  // Squared partition of unity.
  const Outputs out = prepare(cfg);
  json meta = header(cfg);
  {
    const double eps = num(o, "partition_epsilon");
    const int pm = integer(o, "partition_m");
    const double tol = num(o, "partition_tol");
    json fams = json::array();
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
      const PartitionFamily fam = partition_of_unity(eps, n, -eps, eps, pm);
      worst = std::max(worst, fam.max_sum_deviation);
      fams.push_back(json{{"n", n}, {"members", fam.phi.size()}, {"max_sum_deviation", fam.max_sum_deviation}});
      if (n == 2) io::write_partition(out.dir / "partition", fam, json{{"config", cfg.resolved()}});
    }
    record("partition_of_unity", {{"families", fams}, {"max_error", worst}, {"tolerance", tol}, {"pass", worst <= tol}});
  }

  json summary = meta;
  summary["seminorms"] = {{"slobodeckij", io::to_json(slob)}, {"poisson", io::to_json(pois)},
                          {"fourier", io::to_json(four)}};
  summary["checks"] = checks;
  summary["pass"] = pass;
  out.json_file("norms.json", summary);
  int failed = 0;
  for (const auto& [k, v] : checks.items()) failed += v.at("pass").get<bool>() ? 0 : 1;
  log << "norms: " << checks.size() << " checks, " << failed << " failed\n";
  return pass ? kPass : kCheckFailed;
}

}  // namespace

// ---------------------------------------------------------------------------

json RunConfig::resolved() const {
  return json{{"params", io::to_json(params)},
              {"seed", seed},
              {"threads", threads},
              {section_name(command), options}};
}

json default_options(const std::string& command) {
  if (command == "k-profile")
    return json{{"rays", 3},           {"max_angle", kPi / 4},   {"z_min", 1e-6},
                {"z_max", 1e8},        {"per_decade", 2},        {"anchor_small", 1e-6},
                {"anchor_large", 1e8}, {"small_tol", 1e-4},      {"large_tol", 1e-3},
                {"scale_samples", 20}, {"sector_half_angle", 3 * kPi / 4}, {"scale_tol", 1e-10}};
  if (command == "dispersion")
    return json{{"tau_grid", nullptr}, {"tau_min", 0.05}, {"tau_max", 1.5},
                {"tau_points", 32},    {"edge_tol", 1e-6}};
  if (command == "verify-bounds")
    return json{{"lambda0", "auto"},  {"auto_factor", 2.0}, {"auto_samples", 64},
                {"stable_lambda0", 1e-3}, {"eta", 0.1},     {"beta", 1.0},
                {"delta", 0.1},       {"lambda_max", 1e4},  {"tau_min", 1e-3},
                {"tau_max", 1e3},     {"per_decade", 24},   {"rays", 9},
                {"zeta_points", 5},   {"write_rows", false}};
  if (command == "mode-response")
    return json{{"tau", 0.5},          {"t_end", nullptr},      {"samples", 200},
                {"nodes", 16},         {"contour_scale", 1.0},  {"convergence_tol", 1e-6},
                {"rate_tol", 5e-3},    {"initial_time", 1e-8},  {"initial_tol", 1e-4},
                {"stable_bound", 1e-3}};
  if (command == "kernel-check")
    return json{{"curvature_m", 128}, {"curvature_tol", 1e-8}, {"m", 16},
                {"dy", 0.05},         {"levels", 12},          {"dims", {1, 2}},
                {"samples", 3},       {"eps", 1e-3},           {"dual_tol", 1e-10},
                {"write_fields", true}};
  if (command == "norms")
    return json{{"s", 0.5},
                {"box", 12.0},
                {"m", 1201},
                {"fourier_pad", 32},
                {"fourier_tol", 1e-4},
                {"riesz_s", 0.7},
                {"riesz_m", 64},
                {"riesz_tol", 1e-12},
                {"p_list", {1.5, 2.0, 3.0}},
                {"dilations", {0.5, 2.0}},
                {"homogeneity_tol", 1e-3},
                {"band_p", 1.5},
                {"family", 10},
                {"band_limit", 10.0},
                {"hardy_r", 0.5},
                {"hardy_p", 2.0},
                {"hardy_m", 401},
                {"hardy_powers", 5},
                {"hardy_lengths", {0.25, 0.5, 1.0}},
                {"hardy_tol", 0.1},
                {"extension_a", 1.0},
                {"extension_m", 201},
                {"extension_family", 5},
                {"seam_tol", 1e-10},
                {"derivative_seam_tol", 1e-6},
                {"partition_epsilon", 1.0},
                {"partition_m", 81},
                {"partition_tol", 1e-12}};
  bad_config("unknown command '" + command + "'");
}

namespace {

void apply_set(json& raw, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad_config("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &raw;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) bad_config("empty key in '" + path + "'");
    if (!node->is_object()) bad_config("'" + path + "' does not name an object member");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace

RunConfig resolve_config(const std::string& command, const json& raw_in,
                         const std::vector<std::string>& sets) {
  if (!known_command(command)) bad_config("unknown command '" + command + "'");
  json raw = raw_in.is_null() ? json::object() : raw_in;
  if (!raw.is_object()) bad_config("config must be a JSON object");
  for (const auto& s : sets) apply_set(raw, s);

  RunConfig cfg;
  cfg.command = command;
  for (const auto& [key, value] : raw.items()) {
    if (key == "params") {
      cfg.params = io::params_from_json(value, cfg.params);
    } else if (key == "seed") {
      if (!value.is_number_integer() || value.get<long long>() < 0) bad_config("seed must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      if (!value.is_number_integer() || value.get<int>() < 1) bad_config("threads must be a positive integer");
      cfg.threads = value.get<int>();
    } else if (key == "out") {
      if (!value.is_string()) bad_config("out must be a string");
      cfg.out = value.get<std::string>();
    } else {
      bool section = false;
      for (const char* c : kCommands) section = section || key == section_name(c);
      if (!section) bad_config("unknown config key '" + key + "'");
      if (!value.is_object()) bad_config("section '" + key + "' must be an object");
    }
  }

  cfg.options = default_options(command);
  const std::string sec = section_name(command);
  if (raw.contains(sec)) {
    for (const auto& [key, value] : raw.at(sec).items()) {
      if (!cfg.options.contains(key)) bad_config("unknown option '" + sec + "." + key + "'");
      cfg.options[key] = value;
    }
  }
  return cfg;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::NegativeGravity:
    case ErrorCode::EmptyGrid:
    case ErrorCode::PreconditionViolated:
    case ErrorCode::OrderOutOfRange:
    case ErrorCode::UnknownKernel:
    case ErrorCode::GridMismatch:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::ZeroFrequency:
      return kConfig;
    case ErrorCode::NonConvergedQuadrature:
    case ErrorCode::TruncationNotConverged:
    case ErrorCode::NonIntegerWinding:
    case ErrorCode::ZeroOnContour:
    case ErrorCode::PoleOnContour:
    case ErrorCode::ResidualTooLarge:
      return kNonConvergence;
    default:
      return kCheckFailed;
  }
}

int run_command(const RunConfig& cfg, std::ostream& log) {
  if (cfg.command == "k-profile") return cmd_k_profile(cfg, log);
  if (cfg.command == "dispersion") return cmd_dispersion(cfg, log);
  if (cfg.command == "verify-bounds") return cmd_verify_bounds(cfg, log);
  if (cfg.command == "mode-response") return cmd_mode_response(cfg, log);
  if (cfg.command == "kernel-check") return cmd_kernel_check(cfg, log);
  if (cfg.command == "norms") return cmd_norms(cfg, log);
  bad_config("unknown command '" + cfg.command + "'");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-phase Stokes interface toolkit"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> rays;
    std::vector<std::string> sets;
  };
  Flags f;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", f.config, "JSON config file");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--threads", f.threads, "worker threads");
    sub->add_option("--set", f.sets, "override, e.g. params.rho1=2 or dispersion.tau_points=10");
    if (std::string(name) == "k-profile") sub->add_option("--rays", f.rays, "number of rays");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    json raw = f.config.empty() ? json::object() : io::read_json_file(f.config);
    std::vector<std::string> sets = f.sets;
    if (f.seed) sets.push_back("seed=" + std::to_string(*f.seed));
    if (f.threads) sets.push_back("threads=" + std::to_string(*f.threads));
    if (f.rays) sets.push_back("k_profile.rays=" + std::to_string(*f.rays));
    RunConfig cfg = resolve_config(command, raw, sets);
    if (!f.out.empty()) cfg.out = f.out;
    return run_command(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: InvalidConfig: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace twophase::cli
