#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "twophase/dispersion.hpp"
#include "twophase/symbol.hpp"

using namespace twophase;

namespace {

const FluidParams kRT{1, 2, 1, 1, 1, 1};
const FluidParams kStable{2, 1, 1, 1, 1, 1};

// lambda <- ([[rho]] gamma_a / tau - sigma tau) k(lambda / tau^2)
double fixed_point(const FluidParams& p, double tau, double start) {
  double lam = start;
  for (int i = 0; i < 500; ++i) {
    const double next =
        ((p.rho2 - p.rho1) * p.gamma_a / tau - p.sigma * tau) * k_of_z(p, lam / (tau * tau)).real();
    if (std::abs(next - lam) < 1e-15 * lam) return next;
    lam = next;
  }
  return lam;
}

}  // namespace

TEST_SUITE("dispersion") {

TEST_CASE("critical wavenumber") {
  CHECK(*critical_wavenumber(kRT) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(critical_wavenumber(FluidParams{1, 1, 1, 1, 1, 1}));
  CHECK_FALSE(critical_wavenumber(kStable));
  CHECK(*critical_wavenumber(FluidParams{1, 3, 1, 1, 0.5, 9.8}) ==
        doctest::Approx(std::sqrt(39.2)).epsilon(1e-14));
  FluidParams flat = kRT;
  flat.gamma_a = 0.0;
  CHECK_FALSE(critical_wavenumber(flat));
}

TEST_CASE("growth rate against the fixed-point oracle") {
  const double lam = *find_growth_rate(kRT, 0.5);
  CHECK(lam > 0.0);
  CHECK(std::abs(dispersion_symbol(kRT, lam, 0.5)) < 1e-12);
  CHECK(std::abs(fixed_point(kRT, 0.5, lam * 1.1) / lam - 1.0) < 1e-9);
  CHECK(lam == doctest::Approx(0.203043508271201).epsilon(1e-12));
}

TEST_CASE("growth rate vanishes at the critical wavenumber") {
  const auto at = find_growth_rate(kRT, 1.0);
  CHECK((!at || *at < 1e-8));
  CHECK_FALSE(find_growth_rate(kRT, 1.5));
  CHECK(code_of([] { find_growth_rate(kStable, 0.5); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("small-lambda asymptote near the critical wavenumber") {
  for (double tau : {0.999, 0.9999}) {
    const double lam = *find_growth_rate(kRT, tau);
    REQUIRE(lam / (tau * tau) <= 1e-3);
    const double approx = (1.0 / tau - tau) / (2.0 * (1.0 + 1.0));
    CHECK(std::abs(lam / approx - 1.0) < 0.05);
  }
}

TEST_CASE("scaling sigma and gravity together") {
  FluidParams q = kRT;
  q.sigma = q.gamma_a = 3.0;
  CHECK(*critical_wavenumber(q) == doctest::Approx(*critical_wavenumber(kRT)));
  const double lam = *find_growth_rate(q, 0.5);
  const double rhs = (q.gamma_a / 0.5 - q.sigma * 0.5) * k_of_z(q, lam / 0.25).real();
  CHECK(std::abs(rhs / lam - 1.0) < 1e-9);
}

TEST_CASE("right half-plane zero counts") {
  CHECK(count_zeros_rhp(kRT, 0.5, default_zero_contour(kRT, 0.5)) == 1);
  CHECK(count_zeros_rhp(kRT, 1.5, default_zero_contour(kRT, 1.5)) == 0);
  for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0})
    CHECK(count_zeros_rhp(kStable, tau, default_zero_contour(kStable, tau)) == 0);
  const WindingResult w = winding_number(kRT, 0.5, default_zero_contour(kRT, 0.5));
  CHECK(std::abs(w.raw - 1.0) < 0.01);
  CHECK(w.min_abs_symbol > 0.0);
  CHECK(code_of([] { winding_number(kRT, 0.5, Rectangle{-1.0, 1.0, 1.0}); }) ==
        ErrorCode::PreconditionViolated);
}

TEST_CASE("growth rate and zero count agree") {
  for (double tau : {0.05, 0.2, 0.5, 0.8, 0.95, 1.05, 1.3, 2.0}) {
    const auto lam = find_growth_rate(kRT, tau);
    const int n = count_zeros_rhp(kRT, tau, default_zero_contour(kRT, tau));
    CHECK(lam.has_value() == (n >= 1));
  }
}

TEST_CASE("complex zeros of the stable symbol") {
  const Rectangle c = default_zero_contour(kStable, 0.5);
  const auto zs = find_symbol_zeros(kStable, 0.5, ZeroSearchBox{-c.h, c.h, 1e-6 * c.h, c.h});
  REQUIRE(zs.size() == 1);
  CHECK(zs[0].real() < 0.0);
  CHECK(std::abs(dispersion_symbol(kStable, zs[0], 0.5)) < 1e-10);
  CHECK(std::abs(dispersion_symbol(kStable, std::conj(zs[0]), 0.5)) < 1e-10);
  CHECK(code_of([] { find_symbol_zeros(kStable, 0.5, ZeroSearchBox{-1, 1, -1, 1}); }) ==
        ErrorCode::PreconditionViolated);
}

TEST_CASE("dispersion curve") {
  const DispersionCurve one = dispersion_curve(kRT, {0.5});
  CHECK(one.rows.size() == 1);
  CHECK(*one.tau_star == doctest::Approx(1.0));

  const DispersionCurve c = dispersion_curve(kRT, {0.02, 0.3, 0.6, 0.9, 1.2, 1.6}, 2);
  for (const auto& r : c.rows) {
    CHECK(r.lambda_star.has_value() == (r.tau < 1.0));
    CHECK(r.zero_count == (r.tau < 1.0 ? 1 : 0));
  }
  // vanishes towards tau*
  CHECK(*c.rows[3].lambda_star < *c.rows[2].lambda_star);

  const DispersionCurve s = dispersion_curve(kStable, {0.1, 1.0, 10.0});
  CHECK_FALSE(s.tau_star);
  for (const auto& r : s.rows) CHECK(r.zero_count == 0);

  CHECK(code_of([] { dispersion_curve(kRT, {}); }) == ErrorCode::EmptyGrid);
  CHECK(code_of([] { dispersion_curve(kRT, {0.5, 0.2}); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("mode response, unstable") {
  const double lam = *find_growth_rate(kRT, 0.5);
  std::vector<double> t;
  for (int i = 1; i <= 60; ++i) t.push_back(20.0 / lam * i / 60);
  const ModeResponse r = mode_response(kRT, 0.5, t);
  REQUIRE(r.fitted_rate);
  CHECK(std::abs(*r.fitted_rate / lam - 1.0) < 5e-3);
  CHECK(std::abs(mode_response(kRT, 0.5, {1e-8}).values[0] - 1.0) < 1e-4);
  CHECK(r.nodes == 32);
}

TEST_CASE("mode response, stable") {
  std::vector<double> t;
  for (int i = 1; i <= 40; ++i) t.push_back(0.5 * i);
  const ModeResponse r = mode_response(kStable, 0.5, t);
  double mx = 0.0;
  for (cplx v : r.values) mx = std::max(mx, std::abs(v));
  CHECK(mx <= 1.0 + 1e-3);
  CHECK(std::abs(r.values.back()) < std::abs(r.values.front()));
  // one complex-conjugate pair
  REQUIRE(r.poles.size() == 2);
  CHECK(std::abs(r.poles[0] - std::conj(r.poles[1])) < 1e-12);
  CHECK(r.poles[0].real() < 0.0);
}

TEST_CASE("mode response does not depend on the contour radius") {
  ModeResponseOptions half;
  half.contour_scale = 0.5;
  for (const FluidParams& p : {kRT, kStable}) {
    const cplx a = mode_response(p, 0.5, {3.0}).values[0];
    const cplx b = mode_response(p, 0.5, {3.0}, half).values[0];
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
  }
  ModeResponseOptions bad;
  bad.contour_scale = 2.0;
  CHECK(code_of([&] { mode_response(kRT, 0.5, {1.0}, bad); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { mode_response(kRT, 0.5, {2.0, 1.0}); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("growth rate fit") {
  std::vector<double> t;
  std::vector<cplx> v;
  for (int i = 1; i <= 30; ++i) {
    t.push_back(i * 0.1);
    v.push_back(std::exp(0.7 * t.back()));
  }
  CHECK(*fit_growth_rate(t, v) == doctest::Approx(0.7).epsilon(1e-12));
}

}
