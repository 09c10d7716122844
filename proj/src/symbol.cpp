#include "twophase/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace twophase {

namespace {

constexpr cplx kI{0.0, 1.0};

bool on_negative_axis(cplx value) { return value.imag() == 0.0 && value.real() <= 0.0; }

cplx checked_sqrt(cplx value, const char* what) {
  if (on_negative_axis(value)) {
    std::ostringstream msg;
    msg << what << " = " << value << " lies on the closed negative real axis";
    throw Error(ErrorCode::BranchCut, msg.str());
  }
  return std::sqrt(value);
}

enum Quantity { kW = 0, kV = 1, kP = 2 };

// Coefficients of one trace quantity as a row over the unknowns (a1, a2, p1, p2).
struct ModeCoefficients {
  double tau;
  cplx lambda;
  DecayExponents omega;
  double rho1, rho2;

  Eigen::RowVector4cd trace(int side, Quantity what, int order) const {
    Eigen::RowVector4cd row = Eigen::RowVector4cd::Zero();
    if (side > 0) {
      const cplx c2 = tau / (rho2 * lambda);
      const cplx k_rot = -omega.omega2;
      const cplx k_pres = -tau;
      switch (what) {
        case kW:
          row(1) = std::pow(k_rot, order);
          row(3) = c2 * std::pow(k_pres, order);
          break;
        case kV:
          row(1) = -kI * omega.omega2 / tau * std::pow(k_rot, order);
          row(3) = -kI * c2 * std::pow(k_pres, order);
          break;
        case kP:
          row(3) = std::pow(k_pres, order);
          break;
      }
    } else {
      const cplx c1 = tau / (rho1 * lambda);
      const cplx k_rot = omega.omega1;
      const cplx k_pres = tau;
      switch (what) {
        case kW:
          row(0) = std::pow(k_rot, order);
          row(2) = -c1 * std::pow(k_pres, order);
          break;
        case kV:
          row(0) = kI * omega.omega1 / tau * std::pow(k_rot, order);
          row(2) = -kI * c1 * std::pow(k_pres, order);
          break;
        case kP:
          row(2) = std::pow(k_pres, order);
          break;
      }
    }
    return row;
  }
};

void check_lambda(cplx lambda) {
  if (lambda == cplx(0.0, 0.0))
    throw Error(ErrorCode::SingularAtLambdaZero,
                "pressure-particular terms divide by rho*lambda; use k(0) instead");
}

// Row/column max-norm equilibration before partial-pivoting LU. Column
// magnitudes span |omega|^2 against 1/(rho lambda), so unscaled LU loses
// row-wise accuracy at large |z|.
Eigen::Vector4cd solve_equilibrated(const InterfaceSystem& sys) {
  Eigen::Matrix4cd a = sys.matrix;
  Eigen::Vector4d col = Eigen::Vector4d::Ones();
  Eigen::Vector4d row = Eigen::Vector4d::Ones();
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < 4; ++r) {
      const double m = a.row(r).cwiseAbs().maxCoeff();
      if (m > 0.0) {
        a.row(r) /= m;
        row(r) /= m;
      }
    }
    for (int c = 0; c < 4; ++c) {
      const double m = a.col(c).cwiseAbs().maxCoeff();
      if (m > 0.0) {
        a.col(c) /= m;
        col(c) /= m;
      }
    }
  }
  const Eigen::Vector4cd b = row.cast<cplx>().cwiseProduct(sys.rhs);
  const Eigen::PartialPivLU<Eigen::Matrix4cd> lu(a);
  Eigen::Vector4cd y = lu.solve(b);
  // one refinement step with the residual accumulated in extended precision
  using lcplx = std::complex<long double>;
  Eigen::Vector4cd r;
  for (int i = 0; i < 4; ++i) {
    lcplx acc = lcplx(b(i));
    for (int j = 0; j < 4; ++j) acc -= lcplx(a(i, j)) * lcplx(y(j));
    r(i) = cplx(acc);
  }
  y += lu.solve(r);
  return col.cast<cplx>().cwiseProduct(y);
}

double row_residual(const InterfaceSystem& sys, const Eigen::Vector4cd& x) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r) {
    cplx acc = -sys.rhs(r);
    double scale = std::abs(sys.rhs(r));
    for (int c = 0; c < 4; ++c) {
      const cplx term = sys.matrix(r, c) * x(c);
      acc += term;
      scale += std::abs(term);
    }
    if (scale > 0.0) worst = std::max(worst, std::abs(acc) / scale);
  }
  return worst;
}

}  // namespace

DecayExponents decay_exponents(const FluidParams& p, cplx lambda, cplx tau) {
  if (tau == cplx(0.0, 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be nonzero");
  const cplx tau2 = tau * tau;
  return {checked_sqrt(p.rho1 * lambda / p.mu1 + tau2, "rho1*lambda/mu1 + tau^2"),
          checked_sqrt(p.rho2 * lambda / p.mu2 + tau2, "rho2*lambda/mu2 + tau^2")};
}

InterfaceSystem assemble_interface_system(const FluidParams& p, cplx lambda, double tau,
                                          cplx normal_stress_jump) {
  if (!(tau > 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be positive");
  check_lambda(lambda);
  const ModeCoefficients m{tau, lambda, decay_exponents(p, lambda, tau), p.rho1, p.rho2};

  InterfaceSystem sys;
  // [[v]] = 0
  sys.matrix.row(0) = m.trace(+1, kV, 0) - m.trace(-1, kV, 0);
  // [[w]] = 0
  sys.matrix.row(1) = m.trace(+1, kW, 0) - m.trace(-1, kW, 0);
  // -[[mu dv/dy]] - [[mu i tau w]] = 0
  sys.matrix.row(2) = -(p.mu2 * m.trace(+1, kV, 1) - p.mu1 * m.trace(-1, kV, 1)) -
                      kI * tau * (p.mu2 * m.trace(+1, kW, 0) - p.mu1 * m.trace(-1, kW, 0));
  // -2[[mu dw/dy]] + [[pi]] = q
  sys.matrix.row(3) = -2.0 * (p.mu2 * m.trace(+1, kW, 1) - p.mu1 * m.trace(-1, kW, 1)) +
                      (m.trace(+1, kP, 0) - m.trace(-1, kP, 0));
  sys.rhs << 0.0, 0.0, 0.0, normal_stress_jump;
  return sys;
}

InterfaceSolution::InterfaceSolution(const FluidParams& p, cplx lambda, double tau,
                                     cplx normal_stress_jump)
    : p_(p),
      lambda_(lambda),
      tau_(tau),
      q_(normal_stress_jump),
      omega_(),
      sys_(assemble_interface_system(p, lambda, tau, normal_stress_jump)) {
  omega_ = decay_exponents(p, lambda, tau);
  x_ = solve_equilibrated(sys_);
}

cplx InterfaceSolution::eval(double y, int what, int order) const {
  const ModeCoefficients m{tau_, lambda_, omega_, p_.rho1, p_.rho2};
  const int side = y > 0.0 ? +1 : -1;
  // trace rows hold kappa^order * coefficient; multiply by exp(kappa y) per term
  const cplx k_rot = side > 0 ? -omega_.omega2 : omega_.omega1;
  const cplx k_pres = side > 0 ? cplx(-tau_) : cplx(tau_);
  const Eigen::RowVector4cd row = m.trace(side, static_cast<Quantity>(what), order);
  const int rot = side > 0 ? 1 : 0;
  const int pres = side > 0 ? 3 : 2;
  return row(rot) * x_(rot) * std::exp(k_rot * y) + row(pres) * x_(pres) * std::exp(k_pres * y);
}

cplx InterfaceSolution::w(double y) const { return eval(y, kW, 0); }
cplx InterfaceSolution::v(double y) const { return eval(y, kV, 0); }
cplx InterfaceSolution::pressure(double y) const { return eval(y, kP, 0); }
cplx InterfaceSolution::dw_dy(double y) const { return eval(y, kW, 1); }
cplx InterfaceSolution::dv_dy(double y) const { return eval(y, kV, 1); }

cplx InterfaceSolution::w_trace(int side) const {
  const ModeCoefficients m{tau_, lambda_, omega_, p_.rho1, p_.rho2};
  return m.trace(side, kW, 0) * x_;
}

cplx InterfaceSolution::v_trace(int side) const {
  const ModeCoefficients m{tau_, lambda_, omega_, p_.rho1, p_.rho2};
  return m.trace(side, kV, 0) * x_;
}

double InterfaceSolution::interface_residual() const { return row_residual(sys_, x_); }

double InterfaceSolution::bulk_residual() const {
  double worst = 0.0;
  const double tau2 = tau_ * tau_;
  for (double y : {0.1 / tau_, 1.0 / tau_, -0.1 / tau_, -1.0 / tau_}) {
    const double rho = y > 0 ? p_.rho2 : p_.rho1;
    const double mu = y > 0 ? p_.mu2 : p_.mu1;
    const cplx w0 = eval(y, kW, 0), w1 = eval(y, kW, 1), w2 = eval(y, kW, 2);
    const cplx v0 = eval(y, kV, 0), v2 = eval(y, kV, 2);
    const cplx pi0 = eval(y, kP, 0), pi1 = eval(y, kP, 1);

    auto rel = [](std::initializer_list<cplx> terms) {
      cplx sum = 0.0;
      double scale = 0.0;
      for (cplx t : terms) {
        sum += t;
        scale += std::abs(t);
      }
      return scale > 0.0 ? std::abs(sum) / scale : 0.0;
    };
    // rho lambda u - mu (d_yy - tau^2) u + grad pi, with grad = (i tau, d_y)
    worst = std::max(worst, rel({rho * lambda_ * w0, -mu * w2, mu * tau2 * w0, pi1}));
    worst = std::max(worst, rel({rho * lambda_ * v0, -mu * v2, mu * tau2 * v0, kI * tau_ * pi0}));
    worst = std::max(worst, rel({kI * tau_ * v0, w1}));
  }
  return worst;
}

cplx normal_velocity_response(const FluidParams& p, cplx lambda, double tau) {
  const InterfaceSolution sol(p, lambda, tau, 1.0);
  const double res = std::max(sol.interface_residual(), sol.bulk_residual());
  if (!(res < kResidualTolerance)) {
    std::ostringstream msg;
    msg << "relative residual " << res << " at lambda=" << lambda << ", tau=" << tau;
    throw Error(ErrorCode::ResidualTooLarge, msg.str());
  }
  const cplx upper = sol.w_trace(+1);
  const cplx lower = sol.w_trace(-1);
  if (std::abs(upper - lower) > 1e-12 * std::max(std::abs(upper), std::abs(lower))) {
    throw Error(ErrorCode::ResidualTooLarge, "one-sided normal velocities disagree");
  }
  return upper;
}

cplx k_of_z(const FluidParams& p, cplx z) {
  if (z == cplx(0.0, 0.0)) return 1.0 / (2.0 * (p.mu1 + p.mu2));
  if (on_negative_axis(z)) {
    std::ostringstream msg;
    msg << "z = " << z << " lies on the closed negative real axis";
    throw Error(ErrorCode::BranchCut, msg.str());
  }
  // Bulk equations hold identically for the ansatz; only the interface rows
  // depend on the solve, so they carry the residual contract here.
  const InterfaceSystem sys = assemble_interface_system(p, z, 1.0, 1.0);
  const Eigen::Vector4cd x = solve_equilibrated(sys);
  const double res = row_residual(sys, x);
  if (!(res < kResidualTolerance)) {
    std::ostringstream msg;
    msg << "relative residual " << res << " at z=" << z;
    throw Error(ErrorCode::ResidualTooLarge, msg.str());
  }
  // w(0+) = a2 + p2 / (rho2 z)
  return x(1) + x(3) / (p.rho2 * z);
}

cplx extended_symbol_from_k(const FluidParams& p, cplx lambda, cplx tau, cplx zeta, cplx k) {
  return lambda + p.sigma * tau * k + kI * tau * zeta - p.density_jump() * p.gamma_a * k / tau;
}

SymbolValue eval_extended_symbol(const FluidParams& p, cplx lambda, cplx tau, cplx zeta) {
  if (tau == cplx(0.0, 0.0)) throw Error(ErrorCode::PreconditionViolated, "tau must be nonzero");
  SymbolValue out;
  out.lambda = lambda;
  out.tau = tau;
  out.zeta = zeta;
  out.z = lambda / (tau * tau);
  out.k = k_of_z(p, out.z);
  out.s_tilde = extended_symbol_from_k(p, lambda, tau, zeta, out.k);
  return out;
}

cplx eval_boundary_symbol(const FluidParams& p, cplx lambda, std::span<const double> xi,
                          std::span<const double> b0) {
  if (xi.size() != b0.size())
    throw Error(ErrorCode::PreconditionViolated, "xi and b0 must have the same dimension");
  double norm2 = 0.0, dot = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    norm2 += xi[j] * xi[j];
    dot += b0[j] * xi[j];
  }
  if (norm2 == 0.0) throw Error(ErrorCode::ZeroFrequency, "xi = 0");
  const double tau = std::sqrt(norm2);
  const cplx k = k_of_z(p, lambda / norm2);
  return lambda + (p.sigma * tau - p.density_jump() * p.gamma_a / tau) * k + kI * dot;
}

cplx dispersion_symbol(const FluidParams& p, cplx lambda, double tau) {
  return eval_extended_symbol(p, lambda, tau, 0.0).s_tilde;
}

double k_bound(const FluidParams& p, double theta, double zmin, double zmax, int per_decade,
               int rays) {
  double sup = 0.0;
  const int decades = static_cast<int>(std::ceil(std::log10(zmax / zmin)));
  const int count = decades * per_decade + 1;
  for (int r = 0; r < rays; ++r) {
    // closed sector: rays include the boundary angles
    const double angle = rays == 1 ? 0.0 : -theta + 2.0 * theta * r / (rays - 1);
    for (int j = 0; j < count; ++j) {
      const double mod = zmin * std::pow(10.0, static_cast<double>(j) / per_decade);
      const cplx z = std::polar(mod, angle);
      const cplx k = k_of_z(p, z);
      sup = std::max(sup, std::abs(k) + std::abs(z * k));
    }
  }
  return sup;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const double decades = std::log10(hi / lo);
  const int count = static_cast<int>(std::lround(decades * per_decade)) + 1;
  out.reserve(count);
  for (int j = 0; j < count; ++j)
    out.push_back(lo * std::pow(10.0, decades * j / std::max(1, count - 1)));
  return out;
}

// strictly interior rays of the open sector |arg| < half_angle
std::vector<double> interior_rays(double half_angle, int rays) {
  std::vector<double> out;
  for (int r = 0; r < rays; ++r)
    out.push_back(-half_angle + 2.0 * half_angle * (r + 0.5) / rays);
  return out;
}

}  // namespace

SandwichGrid make_sandwich_grid(const SandwichGridOptions& o) {
  SandwichGrid g;
  g.lambda0 = o.lambda0;
  g.eta = o.eta;
  g.beta = o.beta;
  g.delta = o.delta;
  const auto lambda_angles = interior_rays(kPi / 2 + o.eta, o.rays);
  const auto tau_angles = interior_rays(o.eta, o.rays);
  for (double mod : log_spaced(o.lambda0, o.lambda_max, o.per_decade))
    for (double a : lambda_angles) g.lambdas.push_back(std::polar(mod, a));
  for (double mod : log_spaced(o.tau_min, o.tau_max, o.per_decade))
    for (double a : tau_angles) g.taus.push_back(std::polar(mod, a));
  for (int i = 0; i < o.zeta_points; ++i) {
    for (int j = 0; j < o.zeta_points; ++j) {
      const double fr = (i + 0.5) / o.zeta_points * 2.0 - 1.0;
      const double fi = (j + 0.5) / o.zeta_points * 2.0 - 1.0;
      g.zetas.emplace_back(fr * (o.beta + 1.0), fi * o.delta);
    }
  }
  std::ostringstream d;
  d << "lambda: |lambda| in [" << o.lambda0 << ", " << o.lambda_max << "], " << o.per_decade
    << "/decade, " << o.rays << " rays in sector pi/2+eta; tau: |tau| in [" << o.tau_min << ", "
    << o.tau_max << "], " << o.per_decade << "/decade, " << o.rays << " rays in sector eta; zeta: "
    << o.zeta_points << "x" << o.zeta_points << " in U(beta, delta); eta=" << o.eta
    << ", beta=" << o.beta << ", delta=" << o.delta;
  g.description = d.str();
  return g;
}

namespace {

struct Extremum {
  double value;
  std::size_t index;
  SandwichPoint point;
};

struct Partial {
  Extremum lo{std::numeric_limits<double>::infinity(), 0, {}};
  Extremum hi{-std::numeric_limits<double>::infinity(), 0, {}};
  double k_sup = 0.0;
  // max of |s~| - |lambda| over |tau|, the smallest admissible C
  double needed_c = 0.0;
  std::size_t points = 0;
};

void merge(Partial& into, const Partial& from) {
  auto better_lo = [](const Extremum& a, const Extremum& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  };
  auto better_hi = [](const Extremum& a, const Extremum& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
  };
  if (better_lo(from.lo, into.lo)) into.lo = from.lo;
  if (better_hi(from.hi, into.hi)) into.hi = from.hi;
  into.k_sup = std::max(into.k_sup, from.k_sup);
  into.needed_c = std::max(into.needed_c, from.needed_c);
  into.points += from.points;
}

void check_point_lists(const SandwichGrid& g) {
  if (g.lambdas.empty() || g.taus.empty() || g.zetas.empty())
    throw Error(ErrorCode::EmptyGrid, "sandwich grid has an empty axis");
  const StripDomain strip{g.beta, g.delta};
  for (cplx l : g.lambdas) {
    if (!in_sector(l, kPi / 2 + g.eta) || std::abs(l) < g.lambda0)
      throw Error(ErrorCode::PreconditionViolated, "lambda outside sector or below lambda0");
  }
  for (cplx t : g.taus)
    if (!in_sector(t, g.eta)) throw Error(ErrorCode::PreconditionViolated, "tau outside sector");
  for (cplx z : g.zetas)
    if (!strip.contains(z)) throw Error(ErrorCode::PreconditionViolated, "zeta outside strip");
}

}  // namespace

BoundsReport verify_sandwich(const FluidParams& p, const SandwichGrid& g, int threads,
                             const std::function<void(const SandwichRow&)>& on_row) {
  check_point_lists(g);
  const std::size_t nt = g.taus.size(), nz = g.zetas.size();

  auto sweep = [&](std::size_t l_begin, std::size_t l_end, Partial& part) {
    for (std::size_t li = l_begin; li < l_end; ++li) {
      const cplx lambda = g.lambdas[li];
      for (std::size_t ti = 0; ti < nt; ++ti) {
        const cplx tau = g.taus[ti];
        const cplx z = lambda / (tau * tau);
        const cplx k = k_of_z(p, z);
        part.k_sup = std::max(part.k_sup, std::abs(k) + std::abs(z * k));
        const double scale = std::abs(lambda) + std::abs(tau);
        for (std::size_t zi = 0; zi < nz; ++zi) {
          const cplx zeta = g.zetas[zi];
          const cplx s = extended_symbol_from_k(p, lambda, tau, zeta, k);
          const double ratio = std::abs(s) / scale;
          const std::size_t index = (li * nt + ti) * nz + zi;
          const SandwichPoint pt{lambda, tau, zeta};
          if (ratio < part.lo.value) part.lo = {ratio, index, pt};
          if (ratio > part.hi.value) part.hi = {ratio, index, pt};
          part.needed_c = std::max(part.needed_c, (std::abs(s) - std::abs(lambda)) / std::abs(tau));
          ++part.points;
          if (on_row) on_row({pt, k, s, ratio});
        }
      }
    }
  };

  Partial total;
  const std::size_t nl = g.lambdas.size();
  const int workers = on_row ? 1 : std::clamp<int>(threads, 1, static_cast<int>(nl));
  if (workers == 1) {
    sweep(0, nl, total);
  } else {
    std::vector<Partial> parts(workers);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      const std::size_t b = nl * w / workers, e = nl * (w + 1) / workers;
      pool.emplace_back([&, w, b, e] {
        try {
          sweep(b, e, parts[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
    for (const auto& part : parts) merge(total, part);
  }

  BoundsReport rep;
  rep.points = total.points;
  rep.min_ratio = total.lo.value;
  rep.max_ratio = total.hi.value;
  rep.argmin = total.lo.point;
  rep.argmax = total.hi.point;
  // the closed sector of half-angle 3pi/4 covers every z = lambda/tau^2 of an
  // admissible grid when eta <= pi/12; visited points are folded in as well
  rep.k_sup = std::max(total.k_sup, k_bound(p, 3.0 * kPi / 4.0));
  rep.upper_constant = p.sigma * rep.k_sup + (g.beta + 2.0) +
                       std::abs(p.density_jump()) * p.gamma_a * rep.k_sup / g.lambda0;
  rep.upper_bound_holds = total.needed_c <= rep.upper_constant * (1.0 + 1e-12);
  rep.pass = rep.min_ratio > 0.0 && rep.upper_bound_holds;
  rep.grid_spec = g.description;
  return rep;
}

}  // namespace twophase
