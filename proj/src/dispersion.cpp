#include "twophase/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "twophase/symbol.hpp"

namespace twophase {

namespace {

constexpr cplx kI{0.0, 1.0};

double k_at_rest(const FluidParams& p) { return 1.0 / (2.0 * (p.mu1 + p.mu2)); }

// s(0+, tau) from the analytic k(0)
double symbol_at_origin(const FluidParams& p, double tau) {
  return (p.sigma * tau - p.density_jump() * p.gamma_a / tau) * k_at_rest(p);
}

double real_symbol(const FluidParams& p, double lambda, double tau) {
  return dispersion_symbol(p, lambda, tau).real();
}

}  // namespace

std::optional<double> critical_wavenumber(const FluidParams& p) {
  if (p.rho2 > p.rho1 && p.gamma_a > 0.0)
    return std::sqrt(p.density_jump() * p.gamma_a / p.sigma);
  return std::nullopt;
}

cplx symbol_lambda_derivative(const FluidParams& p, cplx lambda, double tau) {
  const cplx dir = lambda.real() > 0.0 ? kI : cplx(1.0);
  const double h = 1e-6 * std::max(1.0, std::abs(lambda));
  const cplx up = dispersion_symbol(p, lambda + dir * h, tau);
  const cplx down = dispersion_symbol(p, lambda - dir * h, tau);
  return (up - down) / (2.0 * dir * h);
}

std::optional<double> find_growth_rate(const FluidParams& p, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be positive");
  if (!(p.rho2 > p.rho1))
    throw Error(ErrorCode::PreconditionViolated, "growth rate requires rho2 > rho1");
  const double s0 = symbol_at_origin(p, tau);
  if (!(s0 < 0.0)) return std::nullopt;

  constexpr double kCap = 1e8;
  double lo = 0.0;
  double hi = std::max(1.0, 10.0 * p.density_jump() * p.gamma_a * k_at_rest(p) / tau);
  while (real_symbol(p, hi, tau) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kCap) return std::nullopt;
  }
  while (hi - lo > 1e-12 * (1.0 + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (real_symbol(p, mid, tau) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double root = 0.5 * (lo + hi);
  if (root <= 0.0) return std::nullopt;

  // Newton polish, kept only while it stays inside the bracket and improves |s|
  double best = std::abs(real_symbol(p, root, tau));
  for (int it = 0; it < 3 && best > 0.0; ++it) {
    const double slope = symbol_lambda_derivative(p, root, tau).real();
    if (slope == 0.0) break;
    const double next = root - real_symbol(p, root, tau) / slope;
    if (!(next > lo - 1e-12 * (1.0 + lo) && next < hi + 1e-12 * (1.0 + hi))) break;
    const double val = std::abs(real_symbol(p, next, tau));
    if (!(val < best)) break;
    root = next;
    best = val;
  }
  return root;
}

Rectangle default_zero_contour(const FluidParams& p, double tau) {
  const double scale =
      (std::abs(p.density_jump()) * p.gamma_a / tau + p.sigma * tau) * k_at_rest(p);
  return {1e-6 * scale, 1e3 * scale, 1e3 * scale};
}

namespace {

struct ContourIntegrals {
  // moments[k] = (1/2 pi i) \oint ((lambda - center)/radius)^k s'/s dlambda
  std::vector<cplx> moments;
  double min_abs_symbol = std::numeric_limits<double>::infinity();
};

// Breakpoints on [a, b] at each focus f and f +- 10^j unit, so panels
// shrink towards the points of the edge nearest the origin and the branch
// points of s, where it varies on the scale of the distance to the edge.
std::vector<double> edge_breaks(double a, double b, double unit, const std::vector<double>& focus) {
  std::vector<double> marks;
  const double span = b - a + std::abs(a) + std::abs(b);
  for (double f : focus) {
    marks.push_back(f);
    for (double x = unit; x < span; x *= 10.0) {
      marks.push_back(f + x);
      marks.push_back(f - x);
    }
  }
  std::sort(marks.begin(), marks.end());
  std::vector<double> out{a};
  for (double m : marks)
    if (m > out.back() && m < b) out.push_back(m);
  out.push_back(b);
  return out;
}

ContourIntegrals log_derivative_moments(const FluidParams& p, double tau, const ZeroSearchBox& box,
                                        int max_moment, cplx center, double radius) {
  using boost::math::quadrature::gauss_kronrod;
  ContourIntegrals out;
  out.moments.assign(max_moment + 1, 0.0);
  bool hit_zero = false;
  cplx zero_at{};

  auto integrand = [&](cplx lambda) {
    std::vector<cplx> vals(max_moment + 1, 0.0);
    const cplx s = dispersion_symbol(p, lambda, tau);
    const double mag = std::abs(s);
    out.min_abs_symbol = std::min(out.min_abs_symbol, mag);
    if (mag < 1e-9 * std::max(1.0, std::abs(lambda))) {
      hit_zero = true;
      zero_at = lambda;
      return vals;
    }
    const cplx ld = symbol_lambda_derivative(p, lambda, tau) / s;
    const cplx w = (lambda - center) / radius;
    cplx pw = 1.0;
    for (int k = 0; k <= max_moment; ++k, pw *= w) vals[k] = pw * ld;
    return vals;
  };

  // Absolute error target per panel on the zeroth moment; the finite
  // difference s' carries noise near 1e-10 relative, so relative targets
  // cannot converge on panels whose contribution is tiny.
  constexpr double kPanelTol = 1e-9;
  const auto& xk = gauss_kronrod<double, 15>::abscissa();
  const auto& wk = gauss_kronrod<double, 15>::weights();
  const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
  std::function<void(cplx, cplx, int)> panel = [&](cplx a, cplx b, int depth) {
    const cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::vector<cplx> kron(max_moment + 1, 0.0);
    cplx gauss0 = 0.0;
    for (std::size_t i = 0; i < xk.size(); ++i) {
      const int signs = (xk[i] == 0.0) ? 1 : 2;
      for (int sgn = 0; sgn < signs; ++sgn) {
        const double x = sgn == 0 ? xk[i] : -xk[i];
        const auto v = integrand(mid + x * half);
        for (int k = 0; k <= max_moment; ++k) kron[k] += wk[i] * v[k] * half;
        // Gauss nodes are the even-indexed Kronrod abscissae
        if (i % 2 == 0) gauss0 += wg[i / 2] * v[0] * half;
      }
    }
    if (std::abs(kron[0] - gauss0) > kPanelTol && depth < 16) {
      panel(a, mid, depth + 1);
      panel(mid, b, depth + 1);
      return;
    }
    for (int k = 0; k <= max_moment; ++k) out.moments[k] += kron[k];
  };

  // omega_i vanishes at lambda = -mu_i tau^2 / rho_i
  const std::vector<double> re_focus{0.0, -p.mu1 * tau * tau / p.rho1, -p.mu2 * tau * tau / p.rho2};
  auto horizontal = [&](double y, double x_from, double x_to) {
    auto br = edge_breaks(std::min(x_from, x_to), std::max(x_from, x_to),
                          std::max(std::abs(y), 1e-300), re_focus);
    if (x_from > x_to) std::reverse(br.begin(), br.end());
    for (std::size_t i = 0; i + 1 < br.size(); ++i) panel({br[i], y}, {br[i + 1], y}, 0);
  };
  auto vertical = [&](double x, double y_from, double y_to) {
    auto br = edge_breaks(std::min(y_from, y_to), std::max(y_from, y_to),
                          std::max(std::abs(x), 1e-300), {0.0});
    if (y_from > y_to) std::reverse(br.begin(), br.end());
    for (std::size_t i = 0; i + 1 < br.size(); ++i) panel({x, br[i]}, {x, br[i + 1]}, 0);
  };
  horizontal(box.im0, box.re0, box.re1);
  vertical(box.re1, box.im0, box.im1);
  horizontal(box.im1, box.re1, box.re0);
  vertical(box.re0, box.im1, box.im0);

  if (hit_zero) {
    std::ostringstream msg;
    msg << "|s| below tolerance at lambda = " << zero_at;
    throw Error(ErrorCode::ZeroOnContour, msg.str());
  }
  for (auto& m : out.moments) m /= (2.0 * kPi * kI);
  return out;
}

int rounded_count(cplx winding) {
  const double rounded = std::round(winding.real());
  if (std::abs(winding.real() - rounded) > 0.01 || std::abs(winding.imag()) > 0.01) {
    std::ostringstream msg;
    msg << "winding integral " << winding << " is not integer-like";
    throw Error(ErrorCode::NonIntegerWinding, msg.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

WindingResult winding_number(const FluidParams& p, double tau, const Rectangle& c) {
  if (!(c.r0 > 0.0) || !(c.r1 > c.r0) || !(c.h > 0.0))
    throw Error(ErrorCode::PreconditionViolated, "contour must satisfy 0 < r0 < r1, h > 0");
  const auto ints = log_derivative_moments(p, tau, {c.r0, c.r1, -c.h, c.h}, 0, 0.0, 1.0);
  WindingResult out;
  out.raw = ints.moments[0].real();
  out.min_abs_symbol = ints.min_abs_symbol;
  out.count = rounded_count(ints.moments[0]);
  return out;
}

namespace {

void polish_zero(const FluidParams& p, double tau, cplx& root) {
  for (int it = 0; it < 8; ++it) {
    const cplx s = dispersion_symbol(p, root, tau);
    const cplx step = s / symbol_lambda_derivative(p, root, tau);
    root -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(root))) break;
  }
}

void zeros_recursive(const FluidParams& p, double tau, const ZeroSearchBox& box, int depth,
                     std::vector<cplx>& out) {
  constexpr int kMaxPerBox = 3;
  const cplx center(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1));
  const double radius = 0.5 * std::hypot(box.re1 - box.re0, box.im1 - box.im0);
  const auto ints = log_derivative_moments(p, tau, box, kMaxPerBox, center, radius);
  const int n = rounded_count(ints.moments[0]);
  if (n == 0) return;
  if (n > kMaxPerBox && depth < 8) {
    const double xm = 0.5 * (box.re0 + box.re1), ym = 0.5 * (box.im0 + box.im1);
    for (const ZeroSearchBox& sub : {ZeroSearchBox{box.re0, xm, box.im0, ym},
                                     ZeroSearchBox{xm, box.re1, box.im0, ym},
                                     ZeroSearchBox{box.re0, xm, ym, box.im1},
                                     ZeroSearchBox{xm, box.re1, ym, box.im1}})
      zeros_recursive(p, tau, sub, depth + 1, out);
    return;
  }
  if (n > kMaxPerBox) throw Error(ErrorCode::NonIntegerWinding, "zero cluster not resolved");
  // Newton identities: power sums -> monic polynomial in the scaled variable
  std::vector<cplx> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * ints.moments[i];
    e[k] = acc / static_cast<double>(k);
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) companion(0, i) = (i % 2 == 0 ? 1.0 : -1.0) * e[i + 1];
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion);
  for (int i = 0; i < n; ++i) {
    cplx root = center + radius * eig.eigenvalues()(i);
    polish_zero(p, tau, root);
    out.push_back(root);
  }
}

}  // namespace

std::vector<cplx> find_symbol_zeros(const FluidParams& p, double tau, const ZeroSearchBox& box) {
  if (!(box.re1 > box.re0) || !(box.im1 > box.im0))
    throw Error(ErrorCode::PreconditionViolated, "degenerate search box");
  if (box.im0 <= 0.0 && box.im1 >= 0.0 && box.re0 <= 0.0)
    throw Error(ErrorCode::PreconditionViolated, "search box may not cross the branch cut");
  std::vector<cplx> zeros;
  zeros_recursive(p, tau, box, 0, zeros);
  std::sort(zeros.begin(), zeros.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
  });
  return zeros;
}

DispersionCurve dispersion_curve(const FluidParams& p, const std::vector<double>& tau_grid,
                                 int threads) {
  if (tau_grid.empty()) throw Error(ErrorCode::EmptyGrid, "tau grid is empty");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be positive");
    if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
      throw Error(ErrorCode::PreconditionViolated, "tau grid must be strictly increasing");
  }
  DispersionCurve curve;
  curve.params = validate_params(p);
  curve.tau_star = critical_wavenumber(p);
  curve.rows.resize(tau_grid.size());

  auto row = [&](std::size_t i) {
    const double tau = tau_grid[i];
    DispersionRow r{tau, std::nullopt, 0};
    if (p.rho2 > p.rho1) r.lambda_star = find_growth_rate(p, tau);
    r.zero_count = count_zeros_rhp(p, tau, default_zero_contour(p, tau));
    curve.rows[i] = r;
  };
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(tau_grid.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < tau_grid.size(); ++i) row(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < tau_grid.size(); i += workers) row(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

// Modified Talbot contour lambda(theta) = (N/t) c (-0.6122 + 0.5017 theta
// cot(0.6407 theta) + 0.2645 i theta), theta in (-pi, pi), midpoint rule.
template <class F>
cplx talbot_inverse(const F& transform, double t, int nodes, double scale) {
  constexpr double a = -0.6122, b = 0.5017, c = 0.6407, d = 0.2645;
  const double m = scale * nodes / t;
  cplx sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double theta = -kPi + (j + 0.5) * 2.0 * kPi / nodes;
    const double ct = c * theta;
    const double cot = std::cos(ct) / std::sin(ct);
    const double sin2 = std::sin(ct) * std::sin(ct);
    const cplx lambda = m * cplx(a + b * theta * cot, d * theta);
    const cplx dlambda = m * cplx(b * cot - b * ct / sin2, d);
    sum += std::exp(lambda * t) * transform(lambda) * dlambda;
  }
  return sum / (cplx(0.0, 1.0) * static_cast<double>(nodes));
}

}  // namespace

std::optional<double> fit_growth_rate(const std::vector<double>& times,
                                      const std::vector<cplx>& values) {
  const std::size_t n = times.size();
  if (n < 3 || values.size() != n) return std::nullopt;
  const std::size_t first = n - std::max<std::size_t>(2, (n + 2) / 3);
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t cnt = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double mag = std::abs(values[i]);
    if (!std::isfinite(mag) || !(mag > 1e-300)) return std::nullopt;
    const double y = std::log(mag);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
    ++cnt;
  }
  const double denom = cnt * stt - st * st;
  if (denom == 0.0) return std::nullopt;
  return (cnt * sty - st * sy) / denom;
}

ModeResponse mode_response(const FluidParams& p, double tau, const std::vector<double>& times,
                           const ModeResponseOptions& opts) {
  if (!(tau > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw Error(ErrorCode::PreconditionViolated, "times must be positive and increasing");
  }
  if (opts.nodes < 4 || !(opts.contour_scale > 0.0 && opts.contour_scale <= 1.0))
    throw Error(ErrorCode::PreconditionViolated, "need nodes >= 4 and contour_scale in (0, 1]");
  ModeResponse out;
  out.tau = tau;
  out.times = times;
  out.nodes = 2 * opts.nodes;

  if (p.rho2 > p.rho1 && p.gamma_a > 0.0) out.lambda_star = find_growth_rate(p, tau);
  double pole = 0.0;
  cplx slope = 0.0;
  if (out.lambda_star) {
    pole = *out.lambda_star;
    slope = symbol_lambda_derivative(p, pole, tau);
    out.residue = 1.0 / slope;
  }

  // complex zeros (damped or growing waves) come in conjugate pairs; the
  // Talbot contour only resolves singularities near the negative real axis
  const Rectangle scale_box = default_zero_contour(p, tau);
  const double reach = scale_box.h;
  // zeros closer to the cut than 1e-6 reach are left to the contour
  for (cplx z : find_symbol_zeros(p, tau, {-reach, reach, 1e-6 * reach, reach})) {
    const cplx r = 1.0 / symbol_lambda_derivative(p, z, tau);
    out.poles.push_back(z);
    out.pole_residues.push_back(r);
    out.poles.push_back(std::conj(z));
    out.pole_residues.push_back(std::conj(r));
  }

  auto transform = [&](cplx lambda) {
    const cplx s = dispersion_symbol(p, lambda, tau);
    if (std::abs(s) < 1e-12 * std::max(1.0, std::abs(lambda)))
      throw Error(ErrorCode::PoleOnContour, "contour node sits on a zero of the symbol");
    cplx f = 1.0 / s;
    if (out.lambda_star) {
      if (std::abs(lambda - pole) < 1e-6 * std::max(1.0, pole))
        throw Error(ErrorCode::PoleOnContour, "contour node too close to the unstable pole");
      f -= 1.0 / (slope * (lambda - pole));
    }
    for (std::size_t i = 0; i < out.poles.size(); ++i) {
      if (std::abs(lambda - out.poles[i]) < 1e-6 * std::max(1.0, std::abs(out.poles[i])))
        throw Error(ErrorCode::PoleOnContour, "contour node too close to a complex pole");
      f -= out.pole_residues[i] / (lambda - out.poles[i]);
    }
    return f;
  };

  out.values.reserve(times.size());
  for (double t : times) {
    const cplx coarse = talbot_inverse(transform, t, opts.nodes, opts.contour_scale);
    const cplx fine = talbot_inverse(transform, t, 2 * opts.nodes, opts.contour_scale);
    cplx value = fine;
    if (out.lambda_star) value += std::exp(pole * t) * out.residue;
    for (std::size_t i = 0; i < out.poles.size(); ++i)
      value += std::exp(out.poles[i] * t) * out.pole_residues[i];
    const double diff = std::abs(fine - coarse);
    if (!(diff <= opts.convergence_tol * std::max(std::abs(value), 1e-6))) {
      std::ostringstream msg;
      msg << "Talbot inversion at t=" << t << " changed by " << diff << " on doubling nodes";
      throw Error(ErrorCode::NonConvergedQuadrature, msg.str());
    }
    out.values.push_back(value);
  }
  out.fitted_rate = fit_growth_rate(times, out.values);
  return out;
}

}  // namespace twophase
