#pragma once

#include <complex>
#include <numbers>

#include "twophase/error.hpp"

namespace twophase {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Physical configuration of the two superposed fluids. Phase 1 occupies
/// y < h, phase 2 occupies y > h.
struct FluidParams {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double sigma = 1.0;
  double gamma_a = 1.0;

  /// [[rho]] = rho2 - rho1
  double density_jump() const noexcept { return rho2 - rho1; }
  double viscosity_jump() const noexcept { return mu2 - mu1; }

  friend bool operator==(const FluidParams&, const FluidParams&) = default;
};

/// Value on the phase-2 side minus value on the phase-1 side.
constexpr cplx jump(cplx value_omega2, cplx value_omega1) noexcept {
  return value_omega2 - value_omega1;
}

/// Open sector {w != 0 : |arg w| < theta}, principal argument in (-pi, pi].
bool in_sector(cplx w, double theta) noexcept;

struct Sector {
  double half_angle = kPi / 2;

  bool contains(cplx w) const noexcept { return in_sector(w, half_angle); }
};

/// U_{beta,delta} = {zeta : |Re zeta| < beta + 1, |Im zeta| < delta}.
struct StripDomain {
  double beta = 1.0;
  double delta = 0.1;

  bool contains(cplx zeta) const noexcept {
    return std::abs(zeta.real()) < beta + 1.0 && std::abs(zeta.imag()) < delta;
  }
};

/// Returns p unchanged, or throws NonPositiveParameter / NegativeGravity.
const FluidParams& validate_params(const FluidParams& p);

}  // namespace twophase
