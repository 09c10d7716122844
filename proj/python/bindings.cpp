#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twophase/dispersion.hpp"
#include "twophase/io.hpp"
#include "twophase/kernels.hpp"
#include "twophase/spaces.hpp"
#include "twophase/symbol.hpp"

namespace py = pybind11;
using namespace twophase;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::object to_python(const io::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

// 1-D arrays give n = 1, square 2-D arrays n = 2
int array_dim(const Array& a) {
  if (a.ndim() == 1) return 1;
  if (a.ndim() == 2 && a.shape(0) == a.shape(1)) return 2;
  throw Error(ErrorCode::GridMismatch, "expected a 1-D or square 2-D array");
}

ScalarField field_from(const Array& a) {
  ScalarField f(array_dim(a), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), f.values.begin());
  validate_field(f);
  return f;
}

SampledFunction function_from(const Array& a, double lo, double hi, bool periodic) {
  SampledFunction g(array_dim(a), static_cast<int>(a.shape(0)), lo, hi, periodic);
  std::copy(a.data(), a.data() + a.size(), g.values.begin());
  validate_function(g);
  return g;
}

Array to_array(const std::vector<double>& v, int n, int m) {
  const std::vector<py::ssize_t> shape = n == 1 ? std::vector<py::ssize_t>{m} : std::vector<py::ssize_t>{m, m};
  Array out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-phase Stokes interface symbol, dispersion and function-space tools";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<FluidParams>(m, "FluidParams")
      .def(py::init([](double rho1, double rho2, double mu1, double mu2, double sigma, double gamma_a) {
             return FluidParams{rho1, rho2, mu1, mu2, sigma, gamma_a};
           }),
           py::arg("rho1") = 1.0, py::arg("rho2") = 2.0, py::arg("mu1") = 1.0, py::arg("mu2") = 1.0,
           py::arg("sigma") = 1.0, py::arg("gamma_a") = 1.0)
      .def_readwrite("rho1", &FluidParams::rho1)
      .def_readwrite("rho2", &FluidParams::rho2)
      .def_readwrite("mu1", &FluidParams::mu1)
      .def_readwrite("mu2", &FluidParams::mu2)
      .def_readwrite("sigma", &FluidParams::sigma)
      .def_readwrite("gamma_a", &FluidParams::gamma_a)
      .def("validate", [](const FluidParams& p) { validate_params(p); })
      .def("__repr__", [](const FluidParams& p) { return "FluidParams(" + io::to_json(p).dump() + ")"; });

  // symbol
  m.def("k_of_z", &k_of_z, py::arg("params"), py::arg("z"));
  m.def("normal_velocity_response", &normal_velocity_response, py::arg("params"), py::arg("lam"), py::arg("tau"));
  m.def("dispersion_symbol", &dispersion_symbol, py::arg("params"), py::arg("lam"), py::arg("tau"));
  m.def(
      "extended_symbol",
      [](const FluidParams& p, cplx lam, cplx tau, cplx zeta) { return eval_extended_symbol(p, lam, tau, zeta).s_tilde; },
      py::arg("params"), py::arg("lam"), py::arg("tau"), py::arg("zeta") = cplx(0.0));
  m.def(
      "verify_sandwich",
      [](const FluidParams& p, double lambda0, int per_decade, int rays, int zeta_points, int threads) {
        SandwichGridOptions o;
        o.lambda0 = lambda0;
        o.per_decade = per_decade;
        o.rays = rays;
        o.zeta_points = zeta_points;
        BoundsReport r;
        {
          py::gil_scoped_release release;
          r = verify_sandwich(p, make_sandwich_grid(o), threads);
        }
        return to_python(io::to_json(r));
      },
      py::arg("params"), py::arg("lambda0"), py::arg("per_decade") = 24, py::arg("rays") = 9,
      py::arg("zeta_points") = 5, py::arg("threads") = 1);

  // dispersion
  m.def("critical_wavenumber", &critical_wavenumber, py::arg("params"));
  m.def("growth_rate", &find_growth_rate, py::arg("params"), py::arg("tau"));
  m.def(
      "count_zeros_rhp", [](const FluidParams& p, double tau) { return count_zeros_rhp(p, tau, default_zero_contour(p, tau)); },
      py::arg("params"), py::arg("tau"));
  m.def(
      "dispersion_curve",
      [](const FluidParams& p, const std::vector<double>& taus) { return to_python(io::to_json(dispersion_curve(p, taus))); },
      py::arg("params"), py::arg("taus"));
  m.def(
      "mode_response",
      [](const FluidParams& p, double tau, const std::vector<double>& times, int nodes, double contour_scale) {
        ModeResponseOptions o;
        o.nodes = nodes;
        o.contour_scale = contour_scale;
        const ModeResponse r = mode_response(p, tau, times, o);
        py::dict d = to_python(io::to_json(r));
        d["times"] = py::array_t<double>(static_cast<py::ssize_t>(r.times.size()), r.times.data());
        d["values"] = py::array_t<cplx>(static_cast<py::ssize_t>(r.values.size()), r.values.data());
        return d;
      },
      py::arg("params"), py::arg("tau"), py::arg("times"), py::arg("nodes") = 16, py::arg("contour_scale") = 1.0);

  // kernels
  m.def(
      "mean_curvature", [](const Array& h) {
        const ScalarField f = field_from(h);
        return to_array(mean_curvature_graph(f).values, f.n, f.m);
      },
      py::arg("h"));
  m.def(
      "g_kappa", [](const Array& h) {
        const ScalarField f = field_from(h);
        return to_array(eval_G_kappa(f).values, f.n, f.m);
      },
      py::arg("h"));
  m.def(
      "curvature_identity_error", [](const Array& h) { return curvature_identity_error(field_from(h)); }, py::arg("h"));
  m.def("kernel_names", [] {
    std::vector<std::string> out;
    for (KernelId id : kAllKernels) out.emplace_back(kernel_name(id));
    return out;
  });
  m.def(
      "check_frechet",
      [](const std::string& kernel, const FluidParams& p, int n, int points, double dy, int levels, std::uint64_t seed,
         int samples, double eps) {
        return to_python(io::to_json(check_frechet(kernel_from_name(kernel), p, LevelGrid{n, points, dy, levels}, seed,
                                                   samples, eps)));
      },
      py::arg("kernel"), py::arg("params"), py::arg("n") = 1, py::arg("m") = 16, py::arg("dy") = 0.05,
      py::arg("levels") = 12, py::arg("seed") = 1, py::arg("samples") = 3, py::arg("eps") = 1e-3);

  // function spaces
  m.def(
      "slobodeckij_seminorm",
      [](const Array& g, double lo, double hi, double s, double p, bool periodic) {
        return to_python(io::to_json(slobodeckij_seminorm(function_from(g, lo, hi, periodic), s, p)));
      },
      py::arg("g"), py::arg("lo"), py::arg("hi"), py::arg("s"), py::arg("p"), py::arg("periodic") = false);
  m.def(
      "poisson_seminorm",
      [](const Array& g, double lo, double hi, double s, double p) {
        return to_python(io::to_json(poisson_seminorm(function_from(g, lo, hi, false), s, p)));
      },
      py::arg("g"), py::arg("lo"), py::arg("hi"), py::arg("s"), py::arg("p"));
  m.def(
      "fourier_seminorm_p2",
      [](const Array& g, double lo, double hi, double s) {
        return to_python(io::to_json(fourier_seminorm_p2(function_from(g, lo, hi, false), s)));
      },
      py::arg("g"), py::arg("lo"), py::arg("hi"), py::arg("s"));
  m.def(
      "riesz_potential",
      [](const Array& g, double lo, double hi, double s) {
        const SampledFunction r = riesz_potential(function_from(g, lo, hi, true), s);
        return to_array(r.values, r.n, r.m);
      },
      py::arg("g"), py::arg("lo"), py::arg("hi"), py::arg("s"));
  m.def(
      "hardy_ratio",
      [](const Array& g, double a, double r, double p) { return hardy_ratio(function_from(g, 0.0, a, false), r, p).ratio; },
      py::arg("g"), py::arg("a"), py::arg("r"), py::arg("p"));
  m.def(
      "extend_c1",
      [](const Array& h, double a) {
        const SampledFunction e = extend_c1(function_from(h, 0.0, a, false));
        return to_array(e.values, 1, e.m);
      },
      py::arg("h"), py::arg("a"));
  m.def(
      "partition_of_unity",
      [](double epsilon, int n, double lo, double hi, int points) {
        const PartitionFamily f = partition_of_unity(epsilon, n, lo, hi, points);
        py::list phi;
        for (const auto& g : f.phi) phi.append(to_array(g.values, g.n, g.m));
        py::dict d;
        d["centers"] = f.centers;
        d["phi"] = phi;
        d["max_sum_deviation"] = f.max_sum_deviation;
        return d;
      },
      py::arg("epsilon"), py::arg("n"), py::arg("lo"), py::arg("hi"), py::arg("m"));
}
