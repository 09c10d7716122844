#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "twophase/fields.hpp"

using namespace twophase;

namespace {

double max_diff(const ScalarField& a, const std::function<double(double, double)>& f) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = a.point(i);
    e = std::max(e, std::abs(a[i] - f(x[0], x[1])));
  }
  return e;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("spectral derivative of pure modes") {
  for (int k = 1; k <= 7; ++k) {
    const auto f = ScalarField::sample(1, 32, [k](double x, double) { return std::sin(k * x); });
    CHECK(max_diff(spectral_derivative(f, 0), [k](double x, double) { return k * std::cos(k * x); }) <
          1e-12 * k);
    CHECK(max_diff(spectral_derivative(f, 0, 2), [k](double x, double) { return -k * k * std::sin(k * x); }) <
          1e-11 * k * k);
  }
  const auto g = ScalarField::sample(2, 24, [](double x, double y) { return std::cos(2 * x + 3 * y); });
  CHECK(max_diff(spectral_derivative(g, 1), [](double x, double y) { return -3 * std::sin(2 * x + 3 * y); }) < 1e-12);
  CHECK(max_diff(spectral_laplacian(g), [](double x, double y) { return -13 * std::cos(2 * x + 3 * y); }) < 1e-11);
}

TEST_CASE("odd derivatives drop the Nyquist mode") {
  const auto f = ScalarField::sample(1, 16, [](double x, double) { return std::cos(8 * x); });
  CHECK(max_diff(spectral_derivative(f, 0), [](double, double) { return 0.0; }) < 1e-12);
}

TEST_CASE("surface derivatives") {
  const auto h = ScalarField::sample(2, 32, [](double x, double y) { return std::sin(x) * std::cos(2 * y); });
  const SurfaceDerivatives d = surface_derivatives(h);
  REQUIRE(d.grad.size() == 2);
  REQUIRE(d.hess.size() == 4);
  CHECK(max_diff(d.hess[1], [](double x, double y) { return -2 * std::cos(x) * std::sin(2 * y); }) < 1e-12);
  CHECK(max_diff(d.lap, [](double x, double y) { return -5 * std::sin(x) * std::cos(2 * y); }) < 1e-12);
}

TEST_CASE("field validation") {
  CHECK(code_of([] { ScalarField(3, 16); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { ScalarField(1, 4); }) == ErrorCode::EmptyGrid);
  ScalarField f(1, 8);
  f.values.pop_back();
  CHECK(code_of([&] { validate_field(f); }) == ErrorCode::GridMismatch);
  f.values.push_back(std::nan(""));
  CHECK(code_of([&] { validate_field(f); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("fornberg weights") {
  const auto w = fornberg_weights(0.0, {-1.0, 0.0, 1.0}, 2);
  CHECK(w[1][0] == doctest::Approx(-0.5));
  CHECK(w[1][2] == doctest::Approx(0.5));
  CHECK(w[2][0] == doctest::Approx(1.0));
  CHECK(w[2][1] == doctest::Approx(-2.0));
}

TEST_CASE("level grid layout") {
  const LevelGrid g{1, 8, 0.1, 3};
  CHECK(g.count() == 6);
  CHECK(g.y(0) == doctest::Approx(-0.3));
  CHECK(g.y(2) == doctest::Approx(-0.1));
  CHECK(g.y(3) == doctest::Approx(0.1));
  CHECK(g.upper(3));
  CHECK_FALSE(g.upper(2));
}

TEST_CASE("bulk derivatives and traces are exact on low-degree polynomials in y") {
  const LevelGrid g{1, 16, 0.05, 8};
  // different polynomials per phase, as if the field jumps across y = 0
  const BulkField f = BulkField::sample(g, [](double x, double, double y) {
    return y > 0 ? std::sin(x) * (1 + 2 * y - y * y) : std::cos(x) * (3 - y + 4 * y * y);
  });
  const BulkField fy = bulk_dy(f), fyy = bulk_dy(f, 2);
  for (int l = 0; l < g.count(); ++l) {
    const double y = g.y(l);
    CHECK(max_diff(fy.slices[l], [y](double x, double) {
            return y > 0 ? std::sin(x) * (2 - 2 * y) : std::cos(x) * (-1 + 8 * y);
          }) < 1e-9);
    CHECK(max_diff(fyy.slices[l], [y](double x, double) { return y > 0 ? -2 * std::sin(x) : 8 * std::cos(x); }) <
          1e-7);
  }
  CHECK(max_diff(trace(f, Side::Upper), [](double x, double) { return std::sin(x); }) < 1e-12);
  CHECK(max_diff(trace(f, Side::Lower), [](double x, double) { return 3 * std::cos(x); }) < 1e-12);
  const BulkField fx = bulk_dx(f, 0);
  CHECK(max_diff(fx.slices[0], [&](double x, double) {
          const double y = g.y(0);
          return -std::sin(x) * (3 - y + 4 * y * y);
        }) < 1e-12);
  CHECK(code_of([&] { bulk_dy(f, 3); }) == ErrorCode::PreconditionViolated);
}

}
