#pragma once

#include <array>
#include <functional>
#include <vector>

#include "twophase/core.hpp"

namespace twophase {

/// Samples on the uniform periodic grid of [0, 2 pi)^n, n in {1, 2}, with m
/// points per axis. Row-major: values[i0 * m + i1] sits at (i0 h, i1 h).
struct ScalarField {
  int n = 1;
  int m = 0;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(int dim, int points);

  static ScalarField sample(int dim, int points, const std::function<double(double, double)>& f);

  double spacing() const { return 2.0 * kPi / m; }
  std::size_t size() const { return values.size(); }
  std::array<double, 2> point(std::size_t idx) const;
  bool same_grid(const ScalarField& o) const { return n == o.n && m == o.m; }

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Throws EmptyGrid / PreconditionViolated unless n in {1, 2}, m >= 8 and
/// every value is finite.
void validate_field(const ScalarField& f);

/// Fourier multiplier on a real periodic array of shape m^n. `mult` gets the
/// signed integer wave indices (k0, k1), k1 = 0 when n = 1, and whether the
/// mode is a Nyquist mode on some axis.
using Multiplier = std::function<cplx(std::array<int, 2> k, bool nyquist)>;
std::vector<double> apply_multiplier(const std::vector<double>& values, int n, int m,
                                     const Multiplier& mult);

/// d^order f / dx_axis^order on the 2 pi periodic grid. Odd orders drop the
/// Nyquist mode.
ScalarField spectral_derivative(const ScalarField& f, int axis, int order = 1);
ScalarField spectral_laplacian(const ScalarField& f);

struct SurfaceDerivatives {
  std::vector<ScalarField> grad;  // n entries
  std::vector<ScalarField> hess;  // n * n entries, row-major
  ScalarField lap;
};
SurfaceDerivatives surface_derivatives(const ScalarField& h);

/// y-levels -L dy, ..., -dy, dy, ..., L dy; level index l < L lies below the
/// interface. y = 0 itself belongs to neither phase.
struct LevelGrid {
  int n = 1;
  int m = 0;
  double dy = 0.0;
  int levels = 0;  // L, per side

  int count() const { return 2 * levels; }
  double y(int l) const { return l < levels ? -(levels - l) * dy : (l - levels + 1) * dy; }
  bool upper(int l) const { return l >= levels; }
  bool operator==(const LevelGrid&) const = default;
};

/// One ScalarField per level.
struct BulkField {
  LevelGrid grid;
  std::vector<ScalarField> slices;

  BulkField() = default;
  explicit BulkField(const LevelGrid& g);

  static BulkField sample(const LevelGrid& g,
                          const std::function<double(double, double, double)>& f);
};

using BulkVector = std::vector<BulkField>;

void validate_field(const BulkField& f);

enum class Side { Lower, Upper };

/// Derivative in y by Fornberg weights on the seven nearest levels of the
/// same phase.
BulkField bulk_dy(const BulkField& f, int order = 1);
/// Spectral x-derivative applied level by level.
BulkField bulk_dx(const BulkField& f, int axis, int order = 1);
/// One-sided trace at y = 0+- by quadratic extrapolation 3 f1 - 3 f2 + f3.
ScalarField trace(const BulkField& f, Side side);

/// Finite difference weights for derivatives 0..max_order at x0 from the
/// given nodes; result[k][j] multiplies f(nodes[j]) for the k-th derivative.
std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& nodes,
                                                  int max_order);

}  // namespace twophase
