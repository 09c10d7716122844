#pragma once

#include <optional>
#include <vector>

#include "twophase/core.hpp"

namespace twophase {

/// tau* = sqrt((rho2 - rho1) gamma_a / sigma), present iff rho2 > rho1 and gamma_a > 0.
std::optional<double> critical_wavenumber(const FluidParams& p);

/// Positive real zero of s(., tau) for the heavy-over-light configuration,
/// by sign-change bracketing, bisection and a Newton polish. Empty when no
/// sign change exists (tau >= tau*). Throws PreconditionViolated unless
/// rho2 > rho1.
std::optional<double> find_growth_rate(const FluidParams& p, double tau);

/// d s / d lambda by central differences, step 1e-6 max(1, |lambda|). The
/// step is imaginary for Re lambda > 0 and real otherwise, so it never
/// crosses the cut along the negative real axis.
cplx symbol_lambda_derivative(const FluidParams& p, cplx lambda, double tau);

/// Rectangle {re in [r0, r1], im in [-h, h]} in the lambda plane.
struct Rectangle {
  double r0;
  double r1;
  double h;
};

/// [1e-6, 1e3] x [-1e3, 1e3] times the natural rate scale of the mode.
Rectangle default_zero_contour(const FluidParams& p, double tau);

struct WindingResult {
  int count = 0;
  double raw = 0.0;            // real part of (1/2 pi i) \oint s'/s before rounding
  double min_abs_symbol = 0.0; // smallest |s| met on the contour
};

/// Zeros of s(., tau) inside the rectangle via the argument principle.
/// Throws ZeroOnContour or NonIntegerWinding.
WindingResult winding_number(const FluidParams& p, double tau, const Rectangle& contour);

inline int count_zeros_rhp(const FluidParams& p, double tau, const Rectangle& contour) {
  return winding_number(p, tau, contour).count;
}

/// Axis-aligned box in the lambda plane; must not meet the closed negative real axis.
struct ZeroSearchBox {
  double re0;
  double re1;
  double im0;
  double im1;
};

/// All zeros of s(., tau) inside the box: counted by the argument principle,
/// located from contour moments (boxes holding more than three are split)
/// and refined by Newton. Sorted by decreasing real part.
std::vector<cplx> find_symbol_zeros(const FluidParams& p, double tau, const ZeroSearchBox& box);

struct DispersionRow {
  double tau;
  std::optional<double> lambda_star;
  int zero_count;
};

struct DispersionCurve {
  FluidParams params;
  std::optional<double> tau_star;
  std::vector<DispersionRow> rows;
};

/// Rows are independent; `threads` only changes wall time.
DispersionCurve dispersion_curve(const FluidParams& p, const std::vector<double>& tau_grid,
                                 int threads = 1);

struct ModeResponseOptions {
  /// the result uses 2 * nodes; nodes alone gives the convergence check
  int nodes = 16;
  /// multiplies the Talbot contour scale nodes / t; must lie in (0, 1]
  double contour_scale = 1.0;
  /// relative change allowed when the node count is doubled
  double convergence_tol = 1e-6;
};

struct ModeResponse {
  double tau = 0.0;
  std::vector<double> times;
  std::vector<cplx> values;
  std::optional<double> fitted_rate;
  std::optional<double> lambda_star;
  cplx residue{0.0, 0.0};
  /// complex zeros of s split off besides lambda*, with their residues 1/s'
  std::vector<cplx> poles;
  std::vector<cplx> pole_residues;
  int nodes = 0;
};

/// h(t)/h0 for the linearised interface mode with h(0) = h0 and zero initial
/// velocity, i.e. the inverse Laplace transform of 1/s(lambda, tau). The
/// real unstable pole and the complex zeros of s off the real axis are split
/// off analytically; the remainder is inverted on a Talbot contour around the
/// negative real axis.
ModeResponse mode_response(const FluidParams& p, double tau, const std::vector<double>& times,
                           const ModeResponseOptions& opts = {});

/// Least-squares slope of log|h| over the final third of the samples.
std::optional<double> fit_growth_rate(const std::vector<double>& times,
                                      const std::vector<cplx>& values);

}  // namespace twophase
