#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twophase/core.hpp"
#include "twophase/fields.hpp"

namespace twophase {

// Nonlinearities of the problem transformed to the flat interface y = 0.
// v holds the n horizontal velocity components, w the vertical one. Bulk
// kernels treat h as y-independent. Phase coefficients follow the sign of y.

struct FResult {
  BulkVector F_v;
  BulkField F_w;
};

FResult eval_F(const FluidParams& p, const BulkVector& v, const BulkField& w, const BulkField& pi,
               const ScalarField& h, const ScalarField& dth);

struct FdResult {
  BulkField direct;      // (grad h | d_y v)
  BulkField divergence;  // d_y (grad h | v)
  double max_gap = 0.0;
};

FdResult eval_F_d(const BulkVector& v, const ScalarField& h);

struct GResult {
  std::vector<ScalarField> G_v;
  ScalarField G_w;
  ScalarField G_kappa;
};

/// q is the pressure jump across the interface.
GResult eval_G(const FluidParams& p, const BulkVector& v, const BulkField& w, const ScalarField& q,
               const ScalarField& h);

/// Pointwise curvature correction from injected derivatives: grad has n
/// entries, hess n * n row-major.
double g_kappa_pointwise(std::span<const double> grad, std::span<const double> hess);
ScalarField eval_G_kappa(const ScalarField& h);

/// div(grad h / sqrt(1 + |grad h|^2)), the divergence taken spectrally.
ScalarField mean_curvature_graph(const ScalarField& h);
double mean_curvature_pointwise(std::span<const double> grad, std::span<const double> hess);

/// max |mean_curvature_graph(h) - (lap h - G_kappa(h))|
double curvature_identity_error(const ScalarField& h);

/// (b - v_trace | grad h)
ScalarField eval_H_b(const std::vector<ScalarField>& b, const std::vector<ScalarField>& v_trace,
                     const ScalarField& h);

// ---------------------------------------------------------------------------
// Frechet derivatives of the individual terms.

enum class KernelId { F1, F2, F3, F4, F5, Fd, G1, G2, G3, G4, G5, Hb };

inline constexpr KernelId kAllKernels[] = {KernelId::F1, KernelId::F2, KernelId::F3, KernelId::F4,
                                           KernelId::F5, KernelId::Fd, KernelId::G1, KernelId::G2,
                                           KernelId::G3, KernelId::G4, KernelId::G5, KernelId::Hb};

std::string_view kernel_name(KernelId id);
/// Throws UnknownKernel.
KernelId kernel_from_name(std::string_view name);

/// Base point or direction z = (u, pi, q, h) plus the data d_t h and b.
/// u has n + 1 components (v_1..v_n, w). b is data, not a variable: it is
/// ignored in directions.
struct KernelPoint {
  BulkVector u;
  BulkField pi;
  ScalarField q;
  ScalarField h;
  ScalarField dth;
  std::vector<ScalarField> b;
};

/// N(z), all output components flattened in a fixed order. G1 and G2 list
/// every index combination (i, k, j[, l]) with i over x_1..x_n, y.
std::vector<double> eval_kernel(KernelId id, const FluidParams& p, const KernelPoint& z);

/// DN(z)[zbar] from the closed-form derivative, same layout as eval_kernel.
std::vector<double> frechet_directional(KernelId id, const FluidParams& p, const KernelPoint& z,
                                        const KernelPoint& zbar);

/// Smooth seeded test point: low-frequency trigonometric polynomials in x
/// times Gaussian-damped polynomials in y, drawn per phase.
KernelPoint random_kernel_point(const LevelGrid& grid, std::uint64_t seed, double amplitude = 0.3);

/// z + t zbar
KernelPoint axpy(const KernelPoint& z, double t, const KernelPoint& zbar);

struct FrechetCheck {
  KernelId kernel;
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  double error_coarse = 0.0;  // max |central difference - DN|
  double error_fine = 0.0;
  double ratio = 0.0;         // error_coarse / error_fine
  double derivative_scale = 0.0;
  bool pass = false;          // ratio in [3.5, 4.5]
};

/// Central differences at eps and eps / 2 against the closed form, worst
/// ratio over `samples` seeded (z, zbar) pairs.
FrechetCheck check_frechet(KernelId id, const FluidParams& p, const LevelGrid& grid,
                           std::uint64_t seed, int samples = 3, double eps = 1e-3);

}  // namespace twophase
