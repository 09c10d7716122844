#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "twophase/core.hpp"

namespace twophase {

/// Samples on the box [lo, hi]^n, n in {1, 2}, m points per axis, row-major.
/// Periodic grids use x_i = lo + i (hi - lo) / m; closed grids include both
/// ends, x_i = lo + i (hi - lo) / (m - 1).
struct SampledFunction {
  int n = 1;
  int m = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
  std::vector<double> values;

  SampledFunction() = default;
  SampledFunction(int dim, int points, double lo, double hi, bool periodic);

  static SampledFunction sample(int dim, int points, double lo, double hi, bool periodic,
                                const std::function<double(double, double)>& f);

  double spacing() const { return (hi - lo) / (periodic ? m : m - 1); }
  double coord(int i) const { return lo + i * spacing(); }
  std::size_t size() const { return values.size(); }
};

void validate_function(const SampledFunction& g);

enum class SeminormMethod { DoubleIntegral, Poisson, Riesz };
std::string_view to_string(SeminormMethod m);

struct SeminormReport {
  double value = 0.0;
  double s = 0.0;
  double p = 0.0;
  SeminormMethod method = SeminormMethod::DoubleIntegral;
  int n = 1;
  int m = 0;
  double spacing = 0.0;
  /// quadrature details, keys sorted
  std::map<std::string, double> quadrature;
};

/// (\iint |g(x) - g(y)|^p / |x - y|^(n + s p) dx dy)^(1/p). Closed grids
/// treat g as zero outside the box (exact tail for the outer region) and
/// extrapolate over the grids h, 2h in the diagonal defect h^(p (1 - s)).
/// Periodic grids use the minimum-image distance on the torus.
/// Throws OrderOutOfRange unless 0 < s < 1, PreconditionViolated for p < 1.
SeminormReport slobodeckij_seminorm(const SampledFunction& g, double s, double p, int threads = 1);

/// Same double integral restricted to the box, no tail: the seminorm of the
/// interval or box itself.
double slobodeckij_on_box(const SampledFunction& g, double s, double p, int threads = 1);

/// (\int_0^inf t^((1 - s) p) ||d/dt P(t) g||_p^p dt / t)^(1/p) with the
/// Poisson semigroup applied as the multiplier exp(-t |xi|) on a zero-padded
/// periodic box. The t-integral is a trapezoid rule in log t on
/// [t_min, t_max]; the piece below t_min uses d/dt P(t) g ~ -|xi| g and the
/// piece above t_max the far-field of the Poisson kernel times the mass of g.
/// Throws TruncationNotConverged if doubling the t-range in both directions
/// moves the value by more than 1e-4 relative.
struct PoissonOptions {
  int pad_factor = 0;  // 0: 64 in 1-D, 8 in 2-D
  int nodes_per_decade = 16;
  double truncation_tol = 1e-4;
};
SeminormReport poisson_seminorm(const SampledFunction& g, double s, double p,
                                const PoissonOptions& opts = {});

/// p = 2 Fourier side: (c(s) (2 pi)^-n \int |xi|^(2s) |g^(xi)|^2 dxi)^(1/2) with
/// c(s) = \int |e^(i u_1) - 1|^2 / |u|^(n + 2s) du, which equals the double
/// integral seminorm exactly.
SeminormReport fourier_seminorm_p2(const SampledFunction& g, double s, int pad_factor = 8);

/// c(s) above for n = 1, 2.
double slobodeckij_fourier_constant(int n, double s);

/// F^-1(|xi|^s F g) on a periodic grid; the xi = 0 mode maps to 0 unless s = 0.
SampledFunction riesz_potential(const SampledFunction& g, double s);

/// L_p norm by composite quadrature (Simpson on closed grids with an odd
/// point count, trapezoid otherwise).
double lp_norm(const SampledFunction& g, double p);

/// d g / dx on a closed 1-D grid, 7-point finite differences.
SampledFunction derivative_1d(const SampledFunction& g);

struct HardyRatio {
  double ratio = 0.0;
  double lp = 0.0;         // ||g||_p
  double seminorm = 0.0;   // [g]_{r,p} on [0, a]
  double dlp = 0.0;        // ||g'||_p
};

/// (||g||_p + [g]_{r,p}) / (||g||_p + ||g'||_p) on [0, a]. Throws
/// ZeroDenominator if g vanishes, PreconditionViolated unless g(0) = 0.
HardyRatio hardy_ratio(const SampledFunction& g, double r, double p);

/// (E h)(t) = h(t) on [0, a], 3 h~(2a - t) - 2 h~(3a - 2t) beyond, where h~
/// is the zero extension. Output lives on [0, 3a] with the same spacing.
/// Throws PreconditionViolated if |h(0)| or |h'(0)| exceeds 1e-10.
SampledFunction extend_c1(const SampledFunction& h);

struct PartitionFamily {
  double epsilon = 0.0;
  std::vector<std::vector<double>> centers;  // each of length n
  std::vector<SampledFunction> phi;
  double max_sum_deviation = 0.0;             // max |sum phi_j^2 - 1|
};

/// phi_j = phi(. - x_j) (sum_k phi(. - x_k)^2)^(-1/2) on the lattice
/// x_j in (epsilon / 2) Z^n, phi a tensor product cutoff equal to 1 on
/// (epsilon / 4) Q and supported in (epsilon / 2) Q. Members whose support
/// meets the closed window [lo, hi]^n are sampled there. Throws
/// WindowTooSmall if fewer than two do.
PartitionFamily partition_of_unity(double epsilon, int n, double lo, double hi, int m);

/// The one-dimensional cutoff factor.
double cutoff_1d(double x, double epsilon);

}  // namespace twophase
