#include "twophase/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace twophase {

ScalarField::ScalarField(int dim, int points) : n(dim), m(points) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be 1 or 2");
  if (points < 8) throw Error(ErrorCode::EmptyGrid, "need at least 8 points per axis");
  values.assign(dim == 1 ? points : static_cast<std::size_t>(points) * points, 0.0);
}

ScalarField ScalarField::sample(int dim, int points,
                                const std::function<double(double, double)>& f) {
  ScalarField out(dim, points);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto x = out.point(i);
    out.values[i] = f(x[0], x[1]);
  }
  return out;
}

std::array<double, 2> ScalarField::point(std::size_t idx) const {
  const double h = spacing();
  if (n == 1) return {static_cast<double>(idx) * h, 0.0};
  return {static_cast<double>(idx / m) * h, static_cast<double>(idx % m) * h};
}

void validate_field(const ScalarField& f) {
  if (f.n != 1 && f.n != 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be 1 or 2");
  if (f.m < 8) throw Error(ErrorCode::EmptyGrid, "need at least 8 points per axis");
  const std::size_t want = f.n == 1 ? f.m : static_cast<std::size_t>(f.m) * f.m;
  if (f.values.size() != want) throw Error(ErrorCode::GridMismatch, "value count does not match grid");
  for (double v : f.values)
    if (!std::isfinite(v)) throw Error(ErrorCode::PreconditionViolated, "non-finite field value");
}

// ---------------------------------------------------------------------------

namespace {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
};

// Planning is not thread safe in FFTW; execution through the new-array
// interface is, so plans are created once under a lock and shared.
const FftPlans& plans_for(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, FftPlans> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({n, m});
  if (it != cache.end()) return it->second;
  FftPlans p;
  p.real_size = n == 1 ? m : static_cast<std::size_t>(m) * m;
  p.complex_size = n == 1 ? m / 2 + 1 : static_cast<std::size_t>(m) * (m / 2 + 1);
  double* r = fftw_alloc_real(p.real_size);
  fftw_complex* c = fftw_alloc_complex(p.complex_size);
  if (n == 1) {
    p.forward = fftw_plan_dft_r2c_1d(m, r, c, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(m, c, r, FFTW_ESTIMATE);
  } else {
    p.forward = fftw_plan_dft_r2c_2d(m, m, r, c, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_2d(m, m, c, r, FFTW_ESTIMATE);
  }
  fftw_free(r);
  fftw_free(c);
  return cache.emplace(std::make_pair(n, m), p).first->second;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::vector<double> apply_multiplier(const std::vector<double>& values, int n, int m,
                                     const Multiplier& mult) {
  const FftPlans& plans = plans_for(n, m);
  if (values.size() != plans.real_size) throw Error(ErrorCode::GridMismatch, "array size mismatch");
  std::unique_ptr<double, FftwDeleter> r(fftw_alloc_real(plans.real_size));
  std::unique_ptr<fftw_complex, FftwDeleter> c(fftw_alloc_complex(plans.complex_size));
  std::copy(values.begin(), values.end(), r.get());
  fftw_execute_dft_r2c(plans.forward, r.get(), c.get());

  const int half = m / 2 + 1;
  const bool even = m % 2 == 0;
  const int rows = n == 1 ? 1 : m;
  for (int i = 0; i < rows; ++i) {
    const int k0_row = i <= m / 2 ? i : i - m;
    for (int j = 0; j < half; ++j) {
      std::array<int, 2> k{};
      bool nyq = false;
      if (n == 1) {
        k = {j, 0};
        nyq = even && j == m / 2;
      } else {
        k = {k0_row, j};
        nyq = even && (i == m / 2 || j == m / 2);
      }
      fftw_complex& z = c.get()[static_cast<std::size_t>(i) * half + j];
      const cplx v = cplx(z[0], z[1]) * mult(k, nyq);
      z[0] = v.real();
      z[1] = v.imag();
    }
  }
  fftw_execute_dft_c2r(plans.backward, c.get(), r.get());
  const double norm = 1.0 / static_cast<double>(plans.real_size);
  std::vector<double> out(plans.real_size);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r.get()[i] * norm;
  return out;
}

ScalarField spectral_derivative(const ScalarField& f, int axis, int order) {
  validate_field(f);
  if (axis < 0 || axis >= f.n) throw Error(ErrorCode::PreconditionViolated, "axis out of range");
  if (order < 0) throw Error(ErrorCode::PreconditionViolated, "negative derivative order");
  ScalarField out = f;
  if (order == 0) return out;
  out.values = apply_multiplier(f.values, f.n, f.m, [&](std::array<int, 2> k, bool nyq) {
    if (nyq && order % 2 == 1) return cplx(0.0);
    return std::pow(cplx(0.0, static_cast<double>(k[axis])), order);
  });
  return out;
}

ScalarField spectral_laplacian(const ScalarField& f) {
  validate_field(f);
  ScalarField out = f;
  out.values = apply_multiplier(f.values, f.n, f.m, [](std::array<int, 2> k, bool) {
    return cplx(-static_cast<double>(k[0] * k[0] + k[1] * k[1]));
  });
  return out;
}

SurfaceDerivatives surface_derivatives(const ScalarField& h) {
  SurfaceDerivatives d;
  for (int a = 0; a < h.n; ++a) d.grad.push_back(spectral_derivative(h, a));
  for (int a = 0; a < h.n; ++a)
    for (int b = 0; b < h.n; ++b)
      d.hess.push_back(a == b ? spectral_derivative(h, a, 2) : spectral_derivative(d.grad[a], b));
  d.lap = d.hess[0];
  if (h.n == 2)
    for (std::size_t i = 0; i < d.lap.size(); ++i) d.lap[i] += d.hess[3][i];
  return d;
}

// ---------------------------------------------------------------------------

BulkField::BulkField(const LevelGrid& g) : grid(g) {
  if (g.levels < 3) throw Error(ErrorCode::EmptyGrid, "need at least 3 levels per side");
  if (!(g.dy > 0.0)) throw Error(ErrorCode::PreconditionViolated, "level spacing must be positive");
  slices.assign(g.count(), ScalarField(g.n, g.m));
}

BulkField BulkField::sample(const LevelGrid& g,
                            const std::function<double(double, double, double)>& f) {
  BulkField out(g);
  for (int l = 0; l < g.count(); ++l) {
    const double y = g.y(l);
    out.slices[l] = ScalarField::sample(g.n, g.m, [&](double x0, double x1) { return f(x0, x1, y); });
  }
  return out;
}

void validate_field(const BulkField& f) {
  if (f.grid.levels < 3) throw Error(ErrorCode::EmptyGrid, "need at least 3 levels per side");
  if (static_cast<int>(f.slices.size()) != f.grid.count())
    throw Error(ErrorCode::GridMismatch, "slice count does not match level grid");
  for (const auto& s : f.slices) {
    if (s.n != f.grid.n || s.m != f.grid.m) throw Error(ErrorCode::GridMismatch, "slice grid mismatch");
    validate_field(s);
  }
}

std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x,
                                                  int max_order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

BulkField bulk_dy(const BulkField& f, int order) {
  validate_field(f);
  if (order < 1 || order > 2) throw Error(ErrorCode::PreconditionViolated, "y-derivative order must be 1 or 2");
  const LevelGrid& g = f.grid;
  const int L = g.levels;
  const int width = std::min(7, L);
  BulkField out(g);
  for (int l = 0; l < g.count(); ++l) {
    const int base = g.upper(l) ? L : 0;
    const int local = l - base;
    const int first = std::clamp(local - width / 2, 0, L - width);
    std::vector<double> nodes(width);
    for (int j = 0; j < width; ++j) nodes[j] = g.y(base + first + j);
    const auto w = fornberg_weights(g.y(l), nodes, order)[order];
    auto& dst = out.slices[l].values;
    for (int j = 0; j < width; ++j) {
      const auto& src = f.slices[base + first + j].values;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w[j] * src[i];
    }
  }
  return out;
}

BulkField bulk_dx(const BulkField& f, int axis, int order) {
  validate_field(f);
  BulkField out = f;
  for (auto& s : out.slices) s = spectral_derivative(s, axis, order);
  return out;
}

ScalarField trace(const BulkField& f, Side side) {
  validate_field(f);
  const int L = f.grid.levels;
  auto level = [&](int j) -> const ScalarField& {
    return side == Side::Upper ? f.slices[L + j - 1] : f.slices[L - j];
  };
  ScalarField out(f.grid.n, f.grid.m);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 3.0 * level(1)[i] - 3.0 * level(2)[i] + level(3)[i];
  return out;
}

}  // namespace twophase
