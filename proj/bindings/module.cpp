#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <stdexcept>

#include "membranes/blowup.hpp"
#include "membranes/geometry.hpp"
#include "membranes/grid.hpp"
#include "membranes/profiles.hpp"
#include "membranes/solver.hpp"
#include "membranes/weiss.hpp"

namespace py = pybind11;
using namespace membranes;

namespace {

using PyDomain = std::shared_ptr<GridDomain>;

DomainPtr as_const(const PyDomain &d) { return d; }

PyDomain py_build_domain(int n, double R, const std::string &shape) {
  DomainShape s = shape == "square" ? DomainShape::Square : DomainShape::Disk;
  return std::const_pointer_cast<GridDomain>(build_domain(n, R, s));
}

// (N, n, n) float64 array of node values, exterior nodes zero
py::array_t<double> stack_values(const MembraneStack &stack) {
  const int n = stack.dom->n;
  py::array_t<double> out({stack.N, n, n});
  auto w = out.mutable_unchecked<3>();
  for (int j = 0; j < stack.N; ++j)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) w(j, iy, ix) = stack.u[j].at(ix, iy);
  return out;
}

MembraneStack stack_from_values(const PyDomain &dom,
                                const py::array_t<double> &values) {
  auto v = values.unchecked<3>();
  const int n = dom->n;
  if (v.shape(1) != n || v.shape(2) != n)
    throw std::invalid_argument("values must have shape (N, n, n)");
  MembraneStack stack(as_const(dom), static_cast<int>(v.shape(0)));
  for (int j = 0; j < stack.N; ++j)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        if (dom->valued(ix, iy)) stack.u[j].at(ix, iy) = v(j, iy, ix);
  return stack;
}

Forcing make_forcing(const std::vector<double> &constants, double theta) {
  return Forcing(constants, theta);
}

BoundaryData bc_from_values(const PyDomain &dom,
                            const py::array_t<double> &values) {
  auto v = values.unchecked<3>();
  const int n = dom->n;
  if (v.shape(1) != n || v.shape(2) != n)
    throw std::invalid_argument("bc values must have shape (N, n, n)");
  BoundaryData bc(as_const(dom), static_cast<int>(v.shape(0)));
  for (int j = 0; j < bc.N(); ++j)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) bc.g[j][dom->idx(ix, iy)] = v(j, iy, ix);
  bc.validate_ordering();
  return bc;
}

py::dict report_dict(const SolveReport &rep) {
  py::dict d;
  d["sweeps"] = rep.sweeps;
  d["residual"] = rep.residual;
  d["energy"] = rep.energy;
  d["tol"] = rep.tol;
  d["converged"] = rep.converged;
  return d;
}

py::tuple py_solve(const PyDomain &dom, const std::vector<double> &forcing,
                   double theta, const py::array_t<double> &bc, double omega,
                   double tol, int max_sweeps) {
  SolveConfig cfg;
  cfg.omega = omega > 0 ? omega : optimal_omega(dom->n);
  cfg.tol = tol;
  cfg.max_sweeps = max_sweeps;
  auto [stack, rep] =
      solve(as_const(dom), Forcing(forcing, theta), bc_from_values(dom, bc), cfg);
  return py::make_tuple(stack, report_dict(rep));
}

py::dict weiss_dict(const WeissSample &s) {
  py::dict d;
  d["r"] = s.r;
  d["bulk"] = s.bulk;
  d["boundary"] = s.boundary;
  d["W"] = s.W;
  return d;
}

py::dict sweep_dict(const WeissSweep &sw) {
  py::dict d;
  std::vector<double> radii, W;
  for (const auto &s : sw.samples) {
    radii.push_back(s.r);
    W.push_back(s.W);
  }
  d["radii"] = radii;
  d["W"] = W;
  d["derivative"] = sw.derivative;
  d["lower_bound"] = sw.lower_bound;
  d["tol"] = sw.tol;
  std::vector<bool> fl(sw.flagged.begin(), sw.flagged.end());
  d["flagged"] = fl;
  d["flagged_count"] = sw.flagged_count;
  return d;
}

py::dict classify_dict(const ClassificationResult &res) {
  py::dict d;
  d["degenerate"] = res.degenerate;
  d["angle"] = res.angle;
  d["e"] = py::make_tuple(res.ex, res.ey);
  d["A"] = py::make_tuple(res.A.xx, res.A.xy, res.A.yy);
  d["a"] = res.a;
  d["b"] = res.b;
  d["k"] = res.k;
  d["misfit"] = res.misfit;
  d["fb_offsets"] = res.fb_offsets;
  d["active_pairs"] = res.active_pairs;
  d["alignment_defect"] = res.alignment_defect;
  d["label"] = res.label;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical laboratory for the N-membranes obstacle system";

  py::class_<GridDomain, PyDomain>(m, "Domain")
      .def_readonly("n", &GridDomain::n)
      .def_readonly("R", &GridDomain::R)
      .def_readonly("h", &GridDomain::h)
      .def("__repr__", [](const GridDomain &d) {
        return "Domain(n=" + std::to_string(d.n) +
               ", R=" + std::to_string(d.R) + ")";
      });

  py::class_<MembraneStack>(m, "Stack")
      .def_property_readonly("N", [](const MembraneStack &s) { return s.N; })
      .def_property_readonly("domain",
                             [](const MembraneStack &s) {
                               return std::const_pointer_cast<GridDomain>(s.dom);
                             })
      .def("values", &stack_values,
           "Node values as a (N, n, n) array indexed [membrane, iy, ix]");

  py::class_<BlowupProfile>(m, "BlowupProfile")
      .def_readonly("stack", &BlowupProfile::stack)
      .def_readonly("r", &BlowupProfile::r)
      .def_readonly("affine_correction", &BlowupProfile::affine_correction);

  m.def("build_domain", &py_build_domain, py::arg("n"), py::arg("R") = 1.0,
        py::arg("shape") = "disk",
        "Uniform grid on [-R, R]^2 with a disk or square mask; n odd");

  m.def("stack_from_values", &stack_from_values, py::arg("domain"),
        py::arg("values"), "Build a stack from a (N, n, n) value array");

  m.def("pava_project",
        [](const std::vector<double> &a) { return pava_project(a); },
        py::arg("values"),
        "Euclidean projection onto the non-increasing cone (PAVA)");

  m.def("solve", &py_solve, py::arg("domain"), py::arg("forcing"),
        py::arg("theta") = 0.0, py::arg("bc") = py::array_t<double>(),
        py::arg("omega") = -1.0, py::arg("tol") = -1.0,
        py::arg("max_sweeps") = 50000,
        "Projected SOR solve; bc is a (N, n, n) array of Dirichlet traces. "
        "Returns (stack, report)");

  m.def("optimal_omega", &optimal_omega, py::arg("n"));

  m.def(
      "example46_stack",
      [](const std::string &category, const PyDomain &dom, double e_angle) {
        return example46_stack(category_from_string(category), as_const(dom),
                               e_angle);
      },
      py::arg("category"), py::arg("domain"), py::arg("e_angle") = 0.0,
      "Closed-form three-membrane profile of the named category "
      "('i'..'v') sampled on the domain");

  m.def(
      "example46_boundary",
      [](const std::string &category, const PyDomain &dom, double e_angle) {
        MembraneStack s = example46_stack(category_from_string(category),
                                          as_const(dom), e_angle);
        return stack_values(s);
      },
      py::arg("category"), py::arg("domain"), py::arg("e_angle") = 0.0,
      "Category node values as a (3, n, n) array, usable as Dirichlet data");

  m.def(
      "weiss_of_category",
      [](const std::string &category, double e_angle) {
        return weiss_of_category(category_from_string(category), e_angle);
      },
      py::arg("category"), py::arg("e_angle") = 0.0,
      "Closed-form Weiss energy of the named category");

  m.def(
      "weiss_energy",
      [](const MembraneStack &stack, const std::vector<double> &forcing,
         double px, double py_, double r) {
        return weiss_dict(
            weiss_energy(stack, make_forcing(forcing, 0.0), px, py_, r));
      },
      py::arg("stack"), py::arg("forcing"), py::arg("px") = 0.0,
      py::arg("py") = 0.0, py::arg("r") = 1.0);

  m.def(
      "weiss_sweep",
      [](const MembraneStack &stack, const std::vector<double> &forcing,
         double px, double py_, const std::vector<double> &radii) {
        return sweep_dict(
            weiss_sweep(stack, make_forcing(forcing, 0.0), px, py_, radii));
      },
      py::arg("stack"), py::arg("forcing"), py::arg("px") = 0.0,
      py::arg("py") = 0.0, py::arg("radii"),
      "Weiss energy over increasing radii with monotonicity flags per gap");

  m.def(
      "contact_multiplicity",
      [](const MembraneStack &stack, double eps_c) {
        if (eps_c <= 0)
          eps_c = default_eps_c(*stack.dom, Forcing({}, 0.0));
        ContactMask mask = contact_sets(stack, eps_c);
        MultiplicityMap map = free_boundary_nodes(mask);
        const int n = stack.dom->n;
        py::array_t<int> out({n, n});
        auto w = out.mutable_unchecked<2>();
        for (int iy = 0; iy < n; ++iy)
          for (int ix = 0; ix < n; ++ix)
            w(iy, ix) = map.multiplicity[stack.dom->idx(ix, iy)];
        return out;
      },
      py::arg("stack"), py::arg("eps_c") = -1.0,
      "Per-node contact multiplicity (n, n), eps_c <= 0 for the default");

  m.def(
      "find_blowup_base",
      [](const MembraneStack &stack, double eps_c, double near_x,
         double near_y) -> py::tuple {
        if (eps_c <= 0)
          eps_c = default_eps_c(*stack.dom, Forcing({}, 0.0));
        ContactMask mask = contact_sets(stack, eps_c);
        const int node = find_blowup_base(stack, mask, near_x, near_y);
        if (node < 0) return py::make_tuple(py::none(), py::none());
        return py::make_tuple(node % stack.dom->n, node / stack.dom->n);
      },
      py::arg("stack"), py::arg("eps_c") = -1.0, py::arg("near_x") = 0.0,
      py::arg("near_y") = 0.0,
      "Grid indices (ix, iy) of a full-multiplicity contact node near the "
      "free boundary, or (None, None)");

  m.def(
      "rescale",
      [](const MembraneStack &stack, const std::vector<double> &forcing,
         int p_ix, int p_iy, double r, int n_ref) {
        return rescale(stack, make_forcing(forcing, 0.0), p_ix, p_iy, r, n_ref);
      },
      py::arg("stack"), py::arg("forcing"), py::arg("p_ix"), py::arg("p_iy"),
      py::arg("r"), py::arg("n_ref") = 257,
      "Blow-up rescaling u(p + r x)/r^2 onto the unit reference grid");

  m.def("homogeneity_defect", &homogeneity_defect, py::arg("profile"),
        py::arg("lambdas"));

  m.def(
      "classify",
      [](const MembraneStack &stack, const std::vector<double> &forcing,
         double theta) {
        ClassificationResult res = classify_halfspace(stack);
        if (static_cast<int>(forcing.size()) == stack.N)
          classify_example46(res, make_forcing(forcing, theta));
        return classify_dict(res);
      },
      py::arg("stack"), py::arg("forcing") = std::vector<double>{},
      py::arg("theta") = 0.0,
      "Fit the planar half-space family; with a length-N forcing, also "
      "match the five closed-form categories");

  m.def("normalize_average", &normalize_average, py::arg("stack"),
        "Subtract the pointwise membrane average from each field");
}
