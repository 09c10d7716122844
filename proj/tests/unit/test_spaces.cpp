#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "twophase/spaces.hpp"

using namespace twophase;

namespace {

SampledFunction gaussian(int m, double box = 8.0, double c = 1.0) {
  return SampledFunction::sample(1, m, -box, box, false, [c](double x, double) { return std::exp(-c * c * x * x); });
}

}  // namespace

TEST_SUITE("spaces") {

TEST_CASE("seminorms vanish on zero and constants") {
  const SampledFunction zero(1, 64, -4, 4, false);
  CHECK(slobodeckij_seminorm(zero, 0.5, 2).value == 0.0);
  CHECK(poisson_seminorm(zero, 0.5, 2).value == 0.0);
  const auto one = SampledFunction::sample(1, 64, 0, 2 * kPi, true, [](double, double) { return 1.0; });
  CHECK(slobodeckij_seminorm(one, 0.5, 2).value == 0.0);
}

TEST_CASE("order out of range") {
  const auto g = gaussian(64);
  for (double s : {0.0, 1.0, -0.2, 1.5}) {
    CHECK(code_of([&] { slobodeckij_seminorm(g, s, 2); }) == ErrorCode::OrderOutOfRange);
    CHECK(code_of([&] { poisson_seminorm(g, s, 2); }) == ErrorCode::OrderOutOfRange);
  }
}

TEST_CASE("double integral matches the Fourier side for a Gaussian") {
  const double coarse = slobodeckij_seminorm(gaussian(401), 0.5, 2).value / fourier_seminorm_p2(gaussian(401), 0.5).value;
  const double fine = slobodeckij_seminorm(gaussian(801), 0.5, 2).value / fourier_seminorm_p2(gaussian(801), 0.5).value;
  CHECK(std::abs(coarse - 1.0) < 1e-3);
  CHECK(std::abs(fine / coarse - 1.0) < 1e-2);
}

TEST_CASE("Fourier constant for s = 1/2 in one dimension is 2 pi") {
  // \int |e^{iu} - 1|^2 / u^2 du = 2 pi
  CHECK(slobodeckij_fourier_constant(1, 0.5) == doctest::Approx(2 * kPi).epsilon(1e-8));
}

TEST_CASE("homogeneity under dilation") {
  for (double c : {0.5, 2.0}) {
    const double s = 0.5, p = 3.0;
    const double base = poisson_seminorm(gaussian(1024, 16.0), s, p).value;
    const double scaled = poisson_seminorm(gaussian(1024, 16.0, c), s, p).value;
    CHECK(std::abs(scaled / base / std::pow(c, s - 1.0 / p) - 1.0) < 1e-3);
  }
}

TEST_CASE("Riesz potential") {
  const auto g = SampledFunction::sample(1, 64, 0, 2 * kPi, true,
                                         [](double x, double) { return std::cos(3 * x) + 0.5 * std::sin(7 * x); });
  const SampledFunction same = riesz_potential(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(same.values[i] - g.values[i]) < 1e-14);

  const SampledFunction back = riesz_potential(riesz_potential(g, 0.7), -0.7);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(back.values[i] - g.values[i]));
  CHECK(e < 1e-12);

  const auto c = SampledFunction::sample(1, 64, 0, 2 * kPi, true, [](double x, double) { return std::cos(5 * x); });
  const SampledFunction r = riesz_potential(c, 0.4);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(r.values[i] - std::pow(5.0, 0.4) * c.values[i]) < 1e-12);
}

TEST_CASE("Hardy ratios") {
  auto power = [](int k, double a) {
    return SampledFunction::sample(1, 201, 0, a, false, [k](double t, double) { return std::pow(t, k); });
  };
  const HardyRatio lin = hardy_ratio(power(1, 1.0), 0.5, 2);
  CHECK(std::isfinite(lin.ratio));
  CHECK(lin.ratio > 0.0);
  CHECK(lin.dlp == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lin.lp == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
  double family = 0.0;
  for (int k = 1; k <= 5; ++k) family = std::max(family, hardy_ratio(power(k, 1.0), 0.5, 2).ratio);
  CHECK(hardy_ratio(power(2, 1.0), 0.5, 2).ratio <= family);

  const SampledFunction zero(1, 64, 0, 1, false);
  CHECK(code_of([&] { hardy_ratio(zero, 0.5, 2); }) == ErrorCode::ZeroDenominator);
  const auto shifted = SampledFunction::sample(1, 64, 0, 1, false, [](double t, double) { return 1 + t; });
  CHECK(code_of([&] { hardy_ratio(shifted, 0.5, 2); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("C1 extension") {
  const double a = 1.0;
  const auto h = SampledFunction::sample(1, 201, 0, a, false,
                                         [](double t, double) { return t * t * std::cos(2 * t); });
  const SampledFunction e = extend_c1(h);
  CHECK(e.hi == doctest::Approx(3 * a));
  // the original segment is copied exactly
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(e.values[i] == h.values[i]);
  // zero once both reflected arguments leave [0, a]
  CHECK(e.values.back() == 0.0);

  // E h is only C1 at the seam, so differentiate each side separately
  const std::size_t seam = h.size() - 1;
  SampledFunction right(1, static_cast<int>(e.size() - seam), a, 3 * a, false);
  std::copy(e.values.begin() + seam, e.values.end(), right.values.begin());
  const SampledFunction de = derivative_1d(e), dh = derivative_1d(h);
  CHECK(std::abs(derivative_1d(right).values.front() - dh.values.back()) < 1e-6);

  double eh = 0.0, h0 = 0.0, deh = 0.0, dh0 = 0.0;
  for (double v : e.values) eh = std::max(eh, std::abs(v));
  for (double v : h.values) h0 = std::max(h0, std::abs(v));
  for (double v : de.values) deh = std::max(deh, std::abs(v));
  for (double v : dh.values) dh0 = std::max(dh0, std::abs(v));
  CHECK(eh <= 5 * h0);
  CHECK(deh <= 7 * dh0 * (1 + 1e-6));

  const auto bad = SampledFunction::sample(1, 64, 0, 1, false, [](double t, double) { return t; });
  CHECK(code_of([&] { extend_c1(bad); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("partition of unity") {
  const PartitionFamily f = partition_of_unity(1.0, 1, 0.0, 0.5, 81);
  CHECK(f.max_sum_deviation <= 1e-12);
  // x = 0.25 sits halfway between the cubes centred at 0 and 0.5
  for (std::size_t j = 0; j < f.phi.size(); ++j) {
    const double c = f.centers[j][0];
    if (c == 0.0 || c == 0.5) CHECK(f.phi[j].values[40] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    for (int i = 0; i < 81; ++i)
      if (std::abs(f.phi[j].coord(i) - c) >= 0.5) CHECK(f.phi[j].values[i] == 0.0);
  }

  const PartitionFamily g = partition_of_unity(0.7, 2, -1.0, 1.0, 41);
  CHECK(g.max_sum_deviation <= 1e-12);

  CHECK(code_of([] { partition_of_unity(1.0, 1, 0.5, 0.5, 16); }) == ErrorCode::WindowTooSmall);
  CHECK(code_of([] { partition_of_unity(-1.0, 1, 0.0, 1.0, 16); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("equivalence band on a small family") {
  double lo = 1e300, hi = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double w = 0.6 + 0.3 * j, x0 = 0.5 * j - 0.7;
    const auto g = SampledFunction::sample(1, 301, -10, 10, false,
                                           [&](double x, double) { return std::exp(-(x - x0) * (x - x0) / (w * w)); });
    const double r = poisson_seminorm(g, 0.5, 1.5).value / slobodeckij_seminorm(g, 0.5, 1.5).value;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi / lo <= 10.0);
}

}
