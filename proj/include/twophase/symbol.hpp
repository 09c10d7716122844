#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "twophase/core.hpp"

namespace twophase {

/// omega_i = sqrt(rho_i lambda / mu_i + tau^2), principal branch.
struct DecayExponents {
  cplx omega1;
  cplx omega2;
};

DecayExponents decay_exponents(const FluidParams& p, cplx lambda, cplx tau);

/// 4x4 system for the unknown amplitudes ordered (a1, a2, p1, p2). Rows are
/// [[v]] = 0, [[w]] = 0, zero tangential-stress jump and the prescribed
/// normal-stress jump, all evaluated at y = 0.
struct InterfaceSystem {
  Eigen::Matrix4cd matrix;
  Eigen::Vector4cd rhs;
};

InterfaceSystem assemble_interface_system(const FluidParams& p, cplx lambda, double tau,
                                          cplx normal_stress_jump);

/// Solved exponential ansatz for one Fourier-Laplace mode. Phase 2 lives in
/// y > 0, phase 1 in y < 0; the evaluators pick the phase from the sign of y.
class InterfaceSolution {
 public:
  InterfaceSolution(const FluidParams& p, cplx lambda, double tau, cplx normal_stress_jump);

  cplx w(double y) const;
  cplx v(double y) const;
  cplx pressure(double y) const;
  cplx dw_dy(double y) const;
  cplx dv_dy(double y) const;

  /// One-sided limits at y = 0 (side = +1 for phase 2, -1 for phase 1).
  cplx w_trace(int side) const;
  cplx v_trace(int side) const;

  /// max over the four interface conditions of |residual| / scale
  double interface_residual() const;
  /// max over y in {+-0.1/tau, +-1/tau} of the relative residual of both
  /// momentum components and the divergence condition
  double bulk_residual() const;

  const Eigen::Vector4cd& amplitudes() const noexcept { return x_; }
  const DecayExponents& exponents() const noexcept { return omega_; }

 private:
  struct Terms {
    cplx rot, pres;  // coefficients multiplying exp(-omega|y|), exp(-tau|y|)
  };
  cplx eval(double y, int what, int order) const;

  FluidParams p_;
  cplx lambda_;
  double tau_;
  cplx q_;
  DecayExponents omega_;
  InterfaceSystem sys_;
  Eigen::Vector4cd x_;
};

inline constexpr double kResidualTolerance = 1e-10;

/// w(0) for a unit normal-stress jump and zero tangential-stress jump.
cplx normal_velocity_response(const FluidParams& p, cplx lambda, double tau);

/// Normal-velocity response function k(z) = tau * w(0; lambda = z tau^2, tau)
/// evaluated at tau = 1. k(0) is returned analytically.
cplx k_of_z(const FluidParams& p, cplx z);

struct SymbolValue {
  cplx lambda;
  cplx tau;
  cplx zeta;
  cplx z;
  cplx k;
  cplx s_tilde;
};

/// s~(lambda, tau, zeta) = lambda + sigma tau k(z) + i tau zeta - [[rho]] gamma_a k(z) / tau.
SymbolValue eval_extended_symbol(const FluidParams& p, cplx lambda, cplx tau, cplx zeta);

/// Assembles s~ from a precomputed k(z).
cplx extended_symbol_from_k(const FluidParams& p, cplx lambda, cplx tau, cplx zeta, cplx k);

/// s_{b0}(lambda, xi) = lambda + (sigma|xi| - [[rho]] gamma_a / |xi|) k(z) + i (b0 | xi).
cplx eval_boundary_symbol(const FluidParams& p, cplx lambda, std::span<const double> xi,
                          std::span<const double> b0);

/// s(lambda, tau) := s~(lambda, tau, 0), the symbol whose zeros govern the
/// linear stability of the flat interface.
cplx dispersion_symbol(const FluidParams& p, cplx lambda, double tau);

/// sup of |k(z)| + |z k(z)| over a log-spaced grid of z in the sector of
/// half-angle theta, moduli in [zmin, zmax].
double k_bound(const FluidParams& p, double theta, double zmin = 1e-10, double zmax = 1e10,
               int per_decade = 8, int rays = 13);

// ---------------------------------------------------------------------------
// Sandwich sweep of |s~| / (|lambda| + |tau|)

struct SandwichPoint {
  cplx lambda;
  cplx tau;
  cplx zeta;
};

/// Sector/strip parameters plus the Cartesian point lists of the sweep.
struct SandwichGrid {
  double lambda0 = 1.0;
  double eta = 0.1;
  double beta = 1.0;
  double delta = 0.1;
  std::vector<cplx> lambdas;
  std::vector<cplx> taus;
  std::vector<cplx> zetas;
  std::string description;
};

struct SandwichGridOptions {
  double lambda0 = 1.0;
  double eta = 0.1;
  double beta = 1.0;
  double delta = 0.1;
  double lambda_max = 1e4;
  double tau_min = 1e-3;
  double tau_max = 1e3;
  int per_decade = 24;
  int rays = 9;
  int zeta_points = 5;
};

SandwichGrid make_sandwich_grid(const SandwichGridOptions& opts);

struct BoundsReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  SandwichPoint argmin{};
  SandwichPoint argmax{};
  std::size_t points = 0;
  /// N = sup |k| + |z k| (log grid over the closed sector plus every z visited)
  double k_sup = 0.0;
  /// C = sigma N + (beta + 2) + |[[rho]]| gamma_a N / lambda0
  double upper_constant = 0.0;
  /// |s~| <= |lambda| + C |tau| held at every point
  bool upper_bound_holds = false;
  bool pass = false;
  std::string grid_spec;
};

/// Row of the optional streamed sweep output.
struct SandwichRow {
  SandwichPoint point;
  cplx k;
  cplx s;
  double ratio;
};

/// Throws EmptyGrid if any list is empty and PreconditionViolated if a point
/// leaves the admissible set. `threads` > 1 splits the lambda list; ties in
/// the min/max reduction resolve to the earliest grid index, so the report
/// does not depend on the thread count. With a row callback the sweep runs
/// serially in grid order.
BoundsReport verify_sandwich(const FluidParams& p, const SandwichGrid& grid, int threads = 1,
                             const std::function<void(const SandwichRow&)>& on_row = {});

}  // namespace twophase
