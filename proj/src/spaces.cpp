#include "twophase/spaces.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "twophase/fields.hpp"

namespace twophase {

SampledFunction::SampledFunction(int dim, int points, double lo_, double hi_, bool periodic_)
    : n(dim), m(points), lo(lo_), hi(hi_), periodic(periodic_) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be 1 or 2");
  if (points < 8) throw Error(ErrorCode::EmptyGrid, "need at least 8 points per axis");
  if (!(hi_ > lo_)) throw Error(ErrorCode::PreconditionViolated, "empty box");
  values.assign(dim == 1 ? points : static_cast<std::size_t>(points) * points, 0.0);
}

SampledFunction SampledFunction::sample(int dim, int points, double lo, double hi, bool periodic,
                                        const std::function<double(double, double)>& f) {
  SampledFunction g(dim, points, lo, hi, periodic);
  for (int i = 0; i < (dim == 1 ? points : points * points); ++i) {
    const int i0 = dim == 1 ? i : i / points;
    const int i1 = dim == 1 ? 0 : i % points;
    g.values[i] = f(g.coord(i0), dim == 1 ? 0.0 : g.coord(i1));
  }
  return g;
}

void validate_function(const SampledFunction& g) {
  if (g.n != 1 && g.n != 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be 1 or 2");
  if (g.m < 8) throw Error(ErrorCode::EmptyGrid, "need at least 8 points per axis");
  if (!(g.hi > g.lo)) throw Error(ErrorCode::PreconditionViolated, "empty box");
  const std::size_t want = g.n == 1 ? g.m : static_cast<std::size_t>(g.m) * g.m;
  if (g.values.size() != want) throw Error(ErrorCode::GridMismatch, "value count does not match grid");
  for (double v : g.values)
    if (!std::isfinite(v)) throw Error(ErrorCode::PreconditionViolated, "non-finite sample");
}

std::string_view to_string(SeminormMethod m) {
  switch (m) {
    case SeminormMethod::DoubleIntegral: return "double-integral";
    case SeminormMethod::Poisson: return "poisson";
    case SeminormMethod::Riesz: return "riesz";
  }
  return "unknown";
}

namespace {

void check_order(double s, double p) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::OrderOutOfRange, "fractional order must lie in (0, 1)");
  if (!(p >= 1.0)) throw Error(ErrorCode::PreconditionViolated, "integrability exponent must be >= 1");
}

double pow_abs(double x, double p) {
  const double a = std::abs(x);
  return p == 2.0 ? a * a : std::pow(a, p);
}

// Uniform grid of the double integral: values on count^n points, spacing h,
// per-axis quadrature weights, and whether distances wrap around.
struct PairGrid {
  int n;
  int count;
  double h;
  bool periodic;
  std::vector<double> values;
  std::vector<double> axis_weight;
  double box_lo, box_hi;  // closed grids: extent used by the tail
};

// Rows are distributed over threads; each row sum is stored and the total is
// accumulated in row order, so the result does not depend on `threads`.
template <class RowFn>
double sum_rows(int rows, int threads, RowFn&& row) {
  std::vector<double> partial(rows, 0.0);
  const int t = std::clamp(threads, 1, std::max(1, rows));
  if (t == 1) {
    for (int r = 0; r < rows; ++r) partial[r] = row(r);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k)
      pool.emplace_back([&, k] {
        for (int r = k; r < rows; r += t) partial[r] = row(r);
      });
    for (auto& th : pool) th.join();
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

// \int_{R^2 \ box} |x - y|^(-2 - sp) dy = (1 / sp) \int_0^{2 pi} R(theta)^(-sp) d theta
double outer_tail_2d(double x0, double x1, double lo, double hi, double sp) {
  using boost::math::quadrature::gauss;
  const double d[4] = {hi - x0, hi - x1, x0 - lo, x1 - lo};  // +x, +y, -x, -y faces
  const double c[4][2] = {{hi, hi}, {lo, hi}, {lo, lo}, {hi, lo}};  // corners between faces k, k+1
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double face = k * 0.5 * kPi;
    // angular extent of face k: from the corner before it to the corner after it
    const auto& cb = c[(k + 3) % 4];
    const auto& ca = c[k];
    auto rel = [&](const double* corner) {
      double a = std::atan2(corner[1] - x1, corner[0] - x0) - face;
      while (a > kPi) a -= 2.0 * kPi;
      while (a < -kPi) a += 2.0 * kPi;
      return a;
    };
    const double a0 = rel(cb), a1 = rel(ca);
    const double dist = d[k];
    auto f = [&](double phi) { return std::pow(std::cos(phi), sp); };
    total += std::pow(dist, -sp) * gauss<double, 30>::integrate(f, a0, a1);
  }
  return total / sp;
}

// \iint over the grid (diagonal dropped) plus, when `tail`, twice the
// contribution of pairs with one point outside the box where g = 0.
double pair_integral(const PairGrid& g, double s, double p, bool tail, int threads) {
  const double sp = s * p;
  const int N = g.count;
  const double hn = g.n == 1 ? g.h : g.h * g.h;
  if (g.n == 1) {
    std::vector<double> kern(N);
    for (int d = 1; d < N; ++d) {
      const int dd = g.periodic ? std::min(d, N - d) : d;
      kern[d] = std::pow(dd * g.h, -1.0 - sp);
    }
    const double inner = sum_rows(N, threads, [&](int i) {
      double acc = 0.0;
      for (int j = i + 1; j < N; ++j)
        acc += g.axis_weight[j] * pow_abs(g.values[i] - g.values[j], p) * kern[j - i];
      return 2.0 * g.axis_weight[i] * acc * hn * hn;
    });
    double outer = 0.0;
    if (tail)
      for (int i = 0; i < N; ++i) {
        if (g.values[i] == 0.0) continue;
        const double x = g.box_lo + i * g.h;
        outer += g.axis_weight[i] * pow_abs(g.values[i], p) *
                 (std::pow(g.box_hi - x, -sp) + std::pow(x - g.box_lo, -sp)) / sp;
      }
    return inner + 2.0 * outer * hn;
  }

  std::vector<double> kern(static_cast<std::size_t>(N) * N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      if (a == 0 && b == 0) continue;
      const int da = g.periodic ? std::min(a, N - a) : a;
      const int db = g.periodic ? std::min(b, N - b) : b;
      kern[a * N + b] = std::pow(std::hypot(da * g.h, db * g.h), -2.0 - sp);
    }
  const double inner = sum_rows(N * N, threads, [&](int idx) {
    const int i0 = idx / N, i1 = idx % N;
    const double gi = g.values[idx];
    const double wi = g.axis_weight[i0] * g.axis_weight[i1];
    double acc = 0.0;
    for (int j0 = 0; j0 < N; ++j0) {
      const int a = std::abs(j0 - i0);
      const double wj0 = g.axis_weight[j0];
      for (int j1 = 0; j1 < N; ++j1) {
        const int b = std::abs(j1 - i1);
        if (a == 0 && b == 0) continue;
        acc += wj0 * g.axis_weight[j1] * pow_abs(gi - g.values[j0 * N + j1], p) * kern[a * N + b];
      }
    }
    return wi * acc * hn * hn;
  });
  double outer = 0.0;
  if (tail)
    outer = sum_rows(N * N, threads, [&](int idx) {
      if (g.values[idx] == 0.0) return 0.0;
      const int i0 = idx / N, i1 = idx % N;
      const double w = g.axis_weight[i0] * g.axis_weight[i1];
      return w * pow_abs(g.values[idx], p) *
             outer_tail_2d(g.box_lo + i0 * g.h, g.box_lo + i1 * g.h, g.box_lo, g.box_hi, sp);
    });
  return inner + 2.0 * outer * hn;
}

// Sub-grid taking every `stride`-th point of a (possibly padded) grid.
PairGrid subsample(const PairGrid& g, int stride) {
  PairGrid out = g;
  out.count = (g.count - 1) / stride + 1;
  if (g.periodic) out.count = g.count / stride;
  out.h = g.h * stride;
  out.values.clear();
  out.axis_weight.assign(out.count, 1.0);
  if (!g.periodic) {
    out.axis_weight.front() = g.axis_weight.front();
    out.axis_weight.back() = g.axis_weight.back();
    out.box_hi = g.box_lo + (out.count - 1) * out.h;
  }
  if (g.n == 1) {
    for (int i = 0; i < out.count; ++i) out.values.push_back(g.values[i * stride]);
  } else {
    for (int i = 0; i < out.count; ++i)
      for (int j = 0; j < out.count; ++j)
        out.values.push_back(g.values[(i * stride) * g.count + j * stride]);
  }
  return out;
}

PairGrid pair_grid(const SampledFunction& g, int pad) {
  PairGrid pg;
  pg.n = g.n;
  pg.h = g.spacing();
  pg.periodic = g.periodic;
  if (g.periodic) pad = 0;
  pg.count = g.m + 2 * pad;
  pg.box_lo = g.lo - pad * pg.h;
  pg.box_hi = pg.box_lo + (pg.count - 1) * pg.h;
  pg.axis_weight.assign(pg.count, 1.0);
  if (!g.periodic && pad == 0) {
    pg.axis_weight.front() = 0.5;
    pg.axis_weight.back() = 0.5;
  }
  if (g.n == 1) {
    pg.values.assign(pg.count, 0.0);
    for (int i = 0; i < g.m; ++i) pg.values[pad + i] = g.values[i];
  } else {
    pg.values.assign(static_cast<std::size_t>(pg.count) * pg.count, 0.0);
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) pg.values[(pad + i) * pg.count + pad + j] = g.values[i * g.m + j];
  }
  return pg;
}

struct Extrapolated {
  double fine, coarse, value, exponent;
};

Extrapolated extrapolate(const PairGrid& pg, double s, double p, bool tail, int threads) {
  Extrapolated e{};
  e.exponent = p * (1.0 - s);
  e.fine = pair_integral(pg, s, p, tail, threads);
  const bool can_halve = pg.periodic ? pg.count % 2 == 0 && pg.count >= 16
                                     : (pg.count - 1) % 2 == 0 && pg.count >= 17;
  if (!can_halve) {
    e.coarse = e.value = e.fine;
    return e;
  }
  e.coarse = pair_integral(subsample(pg, 2), s, p, tail, threads);
  const double r = std::pow(2.0, e.exponent);
  e.value = e.fine + (e.fine - e.coarse) / (r - 1.0);
  return e;
}

}  // namespace

SeminormReport slobodeckij_seminorm(const SampledFunction& g, double s, double p, int threads) {
  validate_function(g);
  check_order(s, p);
  // zero padding keeps the tail integrand away from its singularity at the
  // box face; an even pad keeps the padded point count odd when m is odd
  const int pad = g.periodic ? 0 : 2 * ((g.n == 1 ? g.m / 2 : g.m / 4) / 2 + 1);
  const PairGrid pg = pair_grid(g, pad);
  const Extrapolated e = extrapolate(pg, s, p, !g.periodic, threads);
  SeminormReport r;
  r.value = std::pow(std::max(e.value, 0.0), 1.0 / p);
  r.s = s;
  r.p = p;
  r.method = SeminormMethod::DoubleIntegral;
  r.n = g.n;
  r.m = g.m;
  r.spacing = g.spacing();
  r.quadrature = {{"coarse_integral", e.coarse},
                  {"fine_integral", e.fine},
                  {"extrapolated_integral", e.value},
                  {"defect_exponent", e.exponent},
                  {"padding_points", static_cast<double>(pad)}};
  return r;
}

double slobodeckij_on_box(const SampledFunction& g, double s, double p, int threads) {
  validate_function(g);
  check_order(s, p);
  const Extrapolated e = extrapolate(pair_grid(g, 0), s, p, false, threads);
  return std::pow(std::max(e.value, 0.0), 1.0 / p);
}

// ---------------------------------------------------------------------------

namespace {

// ||d/dt P_t||_p^p at t = 1 for the Poisson kernel of R^n
double poisson_kernel_norm_p(int n, double p) {
  using boost::math::quadrature::gauss_kronrod;
  if (n == 1) {
    auto f = [&](double x) {
      return std::pow(std::abs((x * x - 1.0) / (kPi * (1.0 + x * x) * (1.0 + x * x))), p);
    };
    return 2.0 * (gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 10, 1e-14) +
                  gauss_kronrod<double, 61>::integrate(f, 1.0, std::numeric_limits<double>::infinity(), 10, 1e-14));
  }
  auto f = [&](double r) {
    const double k = (r * r - 2.0) / (2.0 * kPi * std::pow(1.0 + r * r, 2.5));
    return std::pow(std::abs(k), p) * 2.0 * kPi * r;
  };
  const double root = std::sqrt(2.0);
  return gauss_kronrod<double, 61>::integrate(f, 0.0, root, 10, 1e-14) +
         gauss_kronrod<double, 61>::integrate(f, root, std::numeric_limits<double>::infinity(), 10, 1e-14);
}

int next_pow2(long v) {
  int r = 1;
  while (r < v) r <<= 1;
  return r;
}

}  // namespace

SeminormReport poisson_seminorm(const SampledFunction& g, double s, double p,
                                const PoissonOptions& opts) {
  validate_function(g);
  check_order(s, p);
  const int n = g.n;
  const double h = g.spacing();
  const double box = g.periodic ? g.hi - g.lo : (g.m - 1) * h;

  // periodic box of side L carrying g, zero padded for closed grids
  int mp = g.m;
  double t_max = 4.0 * box;
  if (!g.periodic) {
    const int factor = opts.pad_factor > 0 ? opts.pad_factor : (n == 1 ? 64 : 8);
    mp = next_pow2(static_cast<long>(factor) * g.m);
    t_max = (n == 1 ? 2.0 : 0.5) * box;
  }
  const double L = mp * h;
  std::vector<double> padded(n == 1 ? mp : static_cast<std::size_t>(mp) * mp, 0.0);
  if (n == 1) {
    std::copy(g.values.begin(), g.values.end(), padded.begin());
  } else {
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) padded[static_cast<std::size_t>(i) * mp + j] = g.values[i * g.m + j];
  }
  const double hn = n == 1 ? h : h * h;
  const double dk = 2.0 * kPi / L;

  auto norm_p = [&](const std::vector<double>& f) {
    double acc = 0.0;
    for (double v : f) acc += pow_abs(v, p);
    return acc * hn;
  };
  auto dt_poisson = [&](double t) {
    return norm_p(apply_multiplier(padded, n, mp, [&](std::array<int, 2> k, bool) {
      const double xi = dk * std::hypot(static_cast<double>(k[0]), static_cast<double>(k[1]));
      return cplx(-xi * std::exp(-t * xi));
    }));
  };

  const double q = (1.0 - s) * p;
  const double lambda_norm = dt_poisson(0.0);  // || |xi| g ||_p^p
  double mass = 0.0;
  for (double v : g.values) mass += v;
  mass *= hn;
  const double far = g.periodic ? 0.0 : pow_abs(mass, p) * poisson_kernel_norm_p(n, p);
  const double far_exp = n - p * (s + n);  // t^far_exp decay of the far-field integrand

  // log-t lattice; the base range sits `extra` nodes inside the wide range
  const double du = std::log(10.0) / opts.nodes_per_decade;
  const double t_min = 0.01 * h;
  const int base_nodes = static_cast<int>(std::ceil(std::log(t_max / t_min) / du));
  const int extra = static_cast<int>(std::ceil(std::log(2.0) / du));
  const int total = base_nodes + 2 * extra + 1;
  const double u0 = std::log(t_min) - extra * du;
  std::vector<double> integrand(total);
  for (int j = 0; j < total; ++j) {
    const double t = std::exp(u0 + j * du);
    integrand[j] = std::pow(t, q) * dt_poisson(t);
  }

  auto integral = [&](int first, int last) {
    const double ta = std::exp(u0 + first * du), tb = std::exp(u0 + last * du);
    double acc = 0.5 * (integrand[first] + integrand[last]);
    for (int j = first + 1; j < last; ++j) acc += integrand[j];
    acc *= du;
    const double head = lambda_norm * std::pow(ta, q) / q;
    const double tail = far * std::pow(tb, far_exp) / (-far_exp);
    return std::array<double, 3>{acc + head + tail, head, tail};
  };
  const auto base = integral(extra, extra + base_nodes);
  const auto wide = integral(0, total - 1);
  const double change = std::abs(wide[0] - base[0]) / std::max(std::abs(wide[0]), 1e-300);
  if (base[0] > 0.0 && change > opts.truncation_tol) {
    std::ostringstream msg;
    msg << "Poisson seminorm moved by " << change << " relative when the t-range was doubled";
    throw Error(ErrorCode::TruncationNotConverged, msg.str());
  }

  SeminormReport r;
  r.value = std::pow(std::max(wide[0], 0.0), 1.0 / p);
  r.s = s;
  r.p = p;
  r.method = SeminormMethod::Poisson;
  r.n = n;
  r.m = g.m;
  r.spacing = h;
  r.quadrature = {{"t_min", std::exp(u0)},
                  {"t_max", std::exp(u0 + (total - 1) * du)},
                  {"nodes", static_cast<double>(total)},
                  {"padded_points", static_cast<double>(mp)},
                  {"head_fraction", wide[1] / std::max(wide[0], 1e-300)},
                  {"tail_fraction", wide[2] / std::max(wide[0], 1e-300)},
                  {"range_doubling_change", change}};
  return r;
}

double slobodeckij_fourier_constant(int n, double s) {
  if (n != 1 && n != 2) throw Error(ErrorCode::PreconditionViolated, "dimension must be 1 or 2");
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::OrderOutOfRange, "fractional order must lie in (0, 1)");
  return 2.0 * std::pow(kPi, 0.5 * n) * std::tgamma(1.0 - s) /
         (s * std::pow(4.0, s) * std::tgamma(0.5 * n + s));
}

SeminormReport fourier_seminorm_p2(const SampledFunction& g, double s, int pad_factor) {
  validate_function(g);
  check_order(s, 2.0);
  const int n = g.n;
  const double h = g.spacing();
  const int mp = g.periodic ? g.m : next_pow2(static_cast<long>(std::max(1, pad_factor)) * g.m);
  std::vector<double> padded(n == 1 ? mp : static_cast<std::size_t>(mp) * mp, 0.0);
  for (int i = 0; i < (n == 1 ? g.m : g.m * g.m); ++i) {
    const int i0 = n == 1 ? i : i / g.m, i1 = n == 1 ? 0 : i % g.m;
    padded[n == 1 ? i0 : static_cast<std::size_t>(i0) * mp + i1] = g.values[i];
  }
  const double dk = 2.0 * kPi / (mp * h);
  const auto lifted = apply_multiplier(padded, n, mp, [&](std::array<int, 2> k, bool) {
    const double xi = dk * std::hypot(static_cast<double>(k[0]), static_cast<double>(k[1]));
    return cplx(xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s));
  });
  // Parseval: (2 pi)^-n \int |xi|^2s |g^|^2 = h^n sum g (|xi|^2s g)
  double acc = 0.0;
  for (std::size_t i = 0; i < padded.size(); ++i) acc += padded[i] * lifted[i];
  acc *= n == 1 ? h : h * h;
  SeminormReport r;
  r.value = std::sqrt(std::max(0.0, slobodeckij_fourier_constant(n, s) * acc));
  r.s = s;
  r.p = 2.0;
  r.method = SeminormMethod::Riesz;
  r.n = n;
  r.m = g.m;
  r.spacing = h;
  r.quadrature = {{"padded_points", static_cast<double>(mp)},
                  {"fourier_constant", slobodeckij_fourier_constant(n, s)}};
  return r;
}

SampledFunction riesz_potential(const SampledFunction& g, double s) {
  validate_function(g);
  if (!g.periodic) throw Error(ErrorCode::PreconditionViolated, "Riesz potential needs a periodic grid");
  const double dk = 2.0 * kPi / (g.hi - g.lo);
  SampledFunction out = g;
  out.values = apply_multiplier(g.values, g.n, g.m, [&](std::array<int, 2> k, bool) {
    const double xi = dk * std::hypot(static_cast<double>(k[0]), static_cast<double>(k[1]));
    if (s == 0.0) return cplx(1.0);
    return cplx(xi == 0.0 ? 0.0 : std::pow(xi, s));
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> axis_weights(const SampledFunction& g) {
  std::vector<double> w(g.m, 1.0);
  if (g.periodic) return w;
  if (g.m % 2 == 1) {
    for (int i = 0; i < g.m; ++i) w[i] = (i == 0 || i == g.m - 1) ? 1.0 / 3.0 : (i % 2 ? 4.0 / 3.0 : 2.0 / 3.0);
  } else {
    w.front() = w.back() = 0.5;
  }
  return w;
}

}  // namespace

double lp_norm(const SampledFunction& g, double p) {
  validate_function(g);
  if (!(p >= 1.0)) throw Error(ErrorCode::PreconditionViolated, "integrability exponent must be >= 1");
  const auto w = axis_weights(g);
  const double h = g.spacing();
  double acc = 0.0;
  if (g.n == 1) {
    for (int i = 0; i < g.m; ++i) acc += w[i] * pow_abs(g.values[i], p);
    acc *= h;
  } else {
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.m; ++j) acc += w[i] * w[j] * pow_abs(g.values[i * g.m + j], p);
    acc *= h * h;
  }
  return std::pow(acc, 1.0 / p);
}

SampledFunction derivative_1d(const SampledFunction& g) {
  validate_function(g);
  if (g.n != 1 || g.periodic) throw Error(ErrorCode::PreconditionViolated, "needs a closed 1-D grid");
  const int width = 7;
  SampledFunction out = g;
  std::vector<double> nodes(width);
  for (int i = 0; i < g.m; ++i) {
    const int first = std::clamp(i - width / 2, 0, g.m - width);
    for (int j = 0; j < width; ++j) nodes[j] = static_cast<double>(first + j);
    const auto w = fornberg_weights(static_cast<double>(i), nodes, 1)[1];
    double acc = 0.0;
    for (int j = 0; j < width; ++j) acc += w[j] * g.values[first + j];
    out.values[i] = acc / g.spacing();
  }
  return out;
}

HardyRatio hardy_ratio(const SampledFunction& g, double r, double p) {
  validate_function(g);
  if (g.n != 1 || g.periodic || g.lo != 0.0)
    throw Error(ErrorCode::PreconditionViolated, "needs a closed grid on [0, a]");
  if (std::abs(g.values.front()) > 1e-10) throw Error(ErrorCode::PreconditionViolated, "g(0) must vanish");
  HardyRatio out;
  out.lp = lp_norm(g, p);
  if (out.lp == 0.0) throw Error(ErrorCode::ZeroDenominator, "g vanishes identically");
  out.seminorm = slobodeckij_on_box(g, r, p);
  out.dlp = lp_norm(derivative_1d(g), p);
  out.ratio = (out.lp + out.seminorm) / (out.lp + out.dlp);
  return out;
}

SampledFunction extend_c1(const SampledFunction& h) {
  validate_function(h);
  if (h.n != 1 || h.periodic || h.lo != 0.0)
    throw Error(ErrorCode::PreconditionViolated, "needs a closed grid on [0, a]");
  const double d0 = derivative_1d(h).values.front();
  if (std::abs(h.values.front()) > 1e-10 || std::abs(d0) > 1e-10)
    throw Error(ErrorCode::PreconditionViolated, "h(0) and h'(0) must vanish");
  const int m = h.m;
  SampledFunction out(1, 3 * (m - 1) + 1, 0.0, 3.0 * h.hi, false);
  auto zero_ext = [&](int idx) { return idx >= 0 ? h.values[idx] : 0.0; };
  for (int i = 0; i < m; ++i) out.values[i] = h.values[i];
  for (int j = 1; j <= 2 * (m - 1); ++j) {
    // t = a + j dt: 2a - t -> index m-1-j, 3a - 2t -> index m-1-2j
    out.values[m - 1 + j] = 3.0 * zero_ext(m - 1 - j) - 2.0 * zero_ext(m - 1 - 2 * j);
  }
  return out;
}

double cutoff_1d(double x, double epsilon) {
  const double t = (0.5 * epsilon - std::abs(x)) / (0.25 * epsilon);
  if (t >= 1.0) return 1.0;
  if (t <= 0.0) return 0.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

PartitionFamily partition_of_unity(double epsilon, int n, double lo, double hi, int m) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::PreconditionViolated, "epsilon must be positive");
  if (!(hi >= lo)) throw Error(ErrorCode::PreconditionViolated, "window bounds out of order");
  const double step = 0.5 * epsilon;
  // lattice indices j with (j step - eps/2, j step + eps/2) meeting [lo, hi]
  const long jlo = static_cast<long>(std::floor((lo - 0.5 * epsilon) / step)) + 1;
  const long jhi = static_cast<long>(std::ceil((hi + 0.5 * epsilon) / step)) - 1;
  std::vector<double> axis;
  for (long j = jlo; j <= jhi; ++j) axis.push_back(j * step);
  const std::size_t members = n == 1 ? axis.size() : axis.size() * axis.size();
  // open cubes of width epsilon on a lattice of step epsilon / 2 cover every
  // point twice except lattice points, so only a degenerate window trips this
  if (members < 2) throw Error(ErrorCode::WindowTooSmall, "fewer than two cubes meet the window");
  SampledFunction grid(n, m, lo, hi, false);

  PartitionFamily fam;
  fam.epsilon = epsilon;
  for (std::size_t a = 0; a < axis.size(); ++a) {
    if (n == 1) {
      fam.centers.push_back({axis[a]});
    } else {
      for (std::size_t b = 0; b < axis.size(); ++b) fam.centers.push_back({axis[a], axis[b]});
    }
  }
  // per-axis cutoff tables: cut[c][i] = cutoff(x_i - axis[c])
  std::vector<std::vector<double>> cut(axis.size(), std::vector<double>(m));
  for (std::size_t c = 0; c < axis.size(); ++c)
    for (int i = 0; i < m; ++i) cut[c][i] = cutoff_1d(grid.coord(i) - axis[c], epsilon);

  std::vector<double> norm(grid.size(), 0.0);
  auto raw = [&](std::size_t member, std::size_t idx) {
    if (n == 1) return cut[member][idx];
    const std::size_t ca = member / axis.size(), cb = member % axis.size();
    return cut[ca][idx / m] * cut[cb][idx % m];
  };
  for (std::size_t k = 0; k < members; ++k)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = raw(k, i);
      norm[i] += v * v;
    }
  for (std::size_t k = 0; k < members; ++k) {
    SampledFunction phi = grid;
    for (std::size_t i = 0; i < grid.size(); ++i) phi.values[i] = raw(k, i) / std::sqrt(norm[i]);
    fam.phi.push_back(std::move(phi));
  }
  std::vector<double> sum(grid.size(), 0.0);
  for (const auto& phi : fam.phi)
    for (std::size_t i = 0; i < grid.size(); ++i) sum[i] += phi.values[i] * phi.values[i];
  for (double v : sum) fam.max_sum_deviation = std::max(fam.max_sum_deviation, std::abs(v - 1.0));
  return fam;
}

}  // namespace twophase
