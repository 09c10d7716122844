#include "twophase/core.hpp"

#include <cmath>
#include <string>

namespace twophase {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::NegativeGravity: return "NegativeGravity";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::SingularAtLambdaZero: return "SingularAtLambdaZero";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
    case ErrorCode::PoleOnContour: return "PoleOnContour";
    case ErrorCode::NonConvergedQuadrature: return "NonConvergedQuadrature";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::UnknownKernel: return "UnknownKernel";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool in_sector(cplx w, double theta) noexcept {
  if (w == cplx(0.0, 0.0)) return false;
  return std::abs(std::arg(w)) < theta;
}

const FluidParams& validate_params(const FluidParams& p) {
  auto positive = [](double value, const char* name) {
    // NaN fails this comparison as well
    if (!(value > 0.0)) throw Error(ErrorCode::NonPositiveParameter, name);
  };
  positive(p.rho1, "rho1");
  positive(p.rho2, "rho2");
  positive(p.mu1, "mu1");
  positive(p.mu2, "mu2");
  positive(p.sigma, "sigma");
  if (!(p.gamma_a >= 0.0)) throw Error(ErrorCode::NegativeGravity, "gamma_a");
  return p;
}

}  // namespace twophase
