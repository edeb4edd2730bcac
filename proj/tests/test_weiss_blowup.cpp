#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "membranes/blowup.hpp"
#include "membranes/profiles.hpp"
#include "membranes/weiss.hpp"

using namespace membranes;

namespace {
constexpr double kPi = std::numbers::pi;
const Category kCats[5] = {Category::I, Category::II, Category::III,
                           Category::IV, Category::V};
}  // namespace

TEST_CASE("weiss energy basics") {
  auto dom = build_domain(129, 1.2);
  const Forcing forcing = example46_forcing();
  MembraneStack zero(dom, 3);
  auto w = weiss_energy(zero, forcing, 0.0, 0.0, 0.5);
  CHECK(w.bulk == 0.0);
  CHECK(w.boundary == 0.0);
  CHECK(w.W == 0.0);
  CHECK(w.W == w.bulk - w.boundary);
  CHECK_THROWS(weiss_energy(zero, forcing, 0.9, 0.0, 0.5));  // ball leaves
  Forcing varying({1.0, 0.0, -1.0}, 1.0);
  varying.per_node.assign(3, std::vector<double>(dom->node_count(), 0.0));
  CHECK_THROWS(weiss_energy(zero, varying, 0.0, 0.0, 0.5));
}

TEST_CASE("weiss energy of category i on the grid") {
  auto dom = build_domain(257, 1.2);
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::I, dom);
  auto w = weiss_energy(st, forcing, 0.0, 0.0, 1.0);
  CHECK(w.W == doctest::Approx(kPi / 8).epsilon(8e-3));
  // homogeneity makes W(r) constant across radii
  const double w25 = weiss_energy(st, forcing, 0.0, 0.0, 0.25).W;
  const double w50 = weiss_energy(st, forcing, 0.0, 0.0, 0.5).W;
  CHECK(std::abs(w25 - w.W) < 2e-3);
  CHECK(std::abs(w50 - w.W) < 2e-3);
}

TEST_CASE("radial derivative basics") {
  auto dom = build_domain(129, 1.0);
  MembraneStack st(dom, 1);
  st.u[0] = sample_field(dom, [](double, double) { return 3.0; });
  auto d0 = radial_derivative(st, 0.0, 0.0, 0.5, 1.1);
  CHECK(std::abs(d0[0]) < 1e-12);
  st.u[0] = sample_field(dom, [](double x, double) { return x; });
  for (double r : {0.3, 0.6}) {
    auto d = radial_derivative(st, 0.0, 0.0, r, 0.7);
    CHECK(d[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-9));
  }
  // Euler relation for 2-homogeneous fields away from kinks
  st.u[0] = sample_field(dom, [](double x, double y) { return x * x + x * y; });
  const double ang = 0.4, r = 0.5;
  const double X = r * std::cos(ang), Y = r * std::sin(ang);
  const double u = X * X + X * Y;
  auto d = radial_derivative(st, 0.0, 0.0, r, ang);
  CHECK(d[0] == doctest::Approx(2.0 * u / r).epsilon(1e-3));
  CHECK_THROWS(radial_derivative(st, 0.0, 0.0, dom->h * 0.2, 0.0));
}

TEST_CASE("weiss sweep on analytic categories has tiny derivative and bound") {
  auto dom = build_domain(257, 1.2);
  const Forcing forcing = example46_forcing();
  for (Category c : kCats) {
    auto st = example46_stack(c, dom);
    std::vector<double> radii = {0.3, 0.45, 0.6, 0.8, 1.0};
    auto sweep = weiss_sweep(st, forcing, 0.0, 0.0, radii);
    CHECK(sweep.flagged_count == 0);
    for (std::size_t k = 0; k < sweep.derivative.size(); ++k) {
      CHECK(std::abs(sweep.derivative[k]) <= 1e-3);
      CHECK(std::abs(sweep.lower_bound[k]) <= 1e-3);
    }
  }
  MembraneStack zero(dom, 3);
  auto zs = weiss_sweep(zero, forcing, 0.0, 0.0, {0.2, 0.4, 0.6});
  CHECK(zs.flagged_count == 0);
  for (auto &s : zs.samples) CHECK(s.W == 0.0);
  CHECK_THROWS(weiss_sweep(zero, forcing, 0.0, 0.0, {0.2, 0.4}));
  CHECK_THROWS(weiss_sweep(zero, forcing, 0.0, 0.0, {0.4, 0.2, 0.6}));
}

TEST_CASE("rescale identity and homogeneity") {
  auto ref = reference_domain(257);
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::II, ref);
  // r = 1 on matching grids: identity up to the (zero) affine part
  auto prof = rescale(st, forcing, ref->origin_ix, ref->origin_iy, 1.0);
  CHECK(prof.affine_correction <= 1e-12);
  double diff = 0.0;
  for (std::size_t i = 0; i < ref->node_count(); ++i)
    if (ref->cls[i] != NodeClass::Exterior)
      for (int j = 0; j < 3; ++j)
        diff = std::max(diff, std::abs(prof.stack.u[j].v[i] - st.u[j].v[i]));
  CHECK(diff <= 1e-12);
  // exact 2-homogeneity: any scale gives the same profile
  auto prof2 = rescale(st, forcing, ref->origin_ix, ref->origin_iy, 0.5);
  CHECK(homogeneity_defect(prof2, {0.25, 0.5, 0.75}) <= 1e-3);
  double d2 = 0.0;
  for (std::size_t i = 0; i < ref->node_count(); ++i)
    if (ref->cls[i] != NodeClass::Exterior)
      for (int j = 0; j < 3; ++j)
        d2 = std::max(d2, std::abs(prof2.stack.u[j].v[i] - st.u[j].v[i]));
  CHECK(d2 <= 1e-3);
}

TEST_CASE("rescale rejects bad base points and balls") {
  auto dom = build_domain(129, 1.0);
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::I, dom);
  const int c = dom->origin_ix;
  CHECK_THROWS(rescale(st, forcing, c, c, 1.5));       // ball leaves
  CHECK_THROWS(rescale(st, forcing, c + 30, c, 0.2));  // separated point
  // non null-averaged stack
  MembraneStack off(dom, 2);
  off.u[0] = sample_field(dom, [](double, double) { return 1.0; });
  off.u[1] = off.u[0];
  CHECK_THROWS(rescale(off, Forcing({1.0, -1.0}, 2.0), c, c, 0.5));
}

TEST_CASE("homogeneity defect detects |x|^3") {
  auto dom = build_domain(257, 1.0);
  MembraneStack st(dom, 2);
  st.u[0] = sample_field(dom, [](double x, double y) {
    const double r = std::hypot(x, y);
    return r * r * r;
  });
  st.u[1] = sample_field(dom, [](double x, double y) {
    const double r = std::hypot(x, y);
    return -r * r * r;
  });
  auto prof = rescale(st, Forcing({1.0, -1.0}, 2.0), dom->origin_ix,
                      dom->origin_iy, 0.9);
  CHECK(homogeneity_defect(prof, {0.5}) > 0.05);
}

TEST_CASE("scaling symmetry of the Weiss energy") {
  const Forcing forcing = example46_forcing();
  double defect_fine = 0.0, defect_coarse = 0.0;
  for (Category c : kCats) {
    auto fine = example46_stack(c, build_domain(257, 1.2));
    auto coarse = example46_stack(c, build_domain(129, 1.2));
    const double df = scaling_symmetry_check(fine, forcing, 0.5);
    const double dc = scaling_symmetry_check(coarse, forcing, 0.5);
    CHECK(df <= 1e-3);
    defect_fine = std::max(defect_fine, df);
    defect_coarse = std::max(defect_coarse, dc);
  }
  CHECK(defect_fine <= 0.6 * defect_coarse);
}

TEST_CASE("classification round trip on all categories") {
  auto ref = reference_domain(257);
  const Forcing forcing = example46_forcing();
  for (Category c : kCats) {
    auto st = example46_stack(c, ref);
    auto res = classify_halfspace(st);
    CHECK(res.misfit <= 1e-8);
    CHECK(classify_example46(res, forcing) == to_string(c));
    if (c != Category::V) {
      // e is identified: must match (1, 0) up to orientation convention
      CHECK(std::abs(std::abs(res.ex) - 1.0) < 1e-4);
      CHECK(res.alignment_defect <= 2.0 / 256);
    }
  }
}

TEST_CASE("classification canonical coefficients of category i") {
  auto ref = reference_domain(257);
  auto st = example46_stack(Category::I, ref);
  auto res = classify_halfspace(st);
  REQUIRE(!res.degenerate);
  CHECK(res.a[0] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(res.a[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(res.a[2] == doctest::Approx(-0.5).epsilon(1e-7));
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(res.b[j]) < 1e-7);
  CHECK(std::sqrt(res.A.frob2()) < 1e-7);
}

TEST_CASE("rotated category ii recovers the angle") {
  auto ref = reference_domain(257);
  const double ang = kPi / 6;
  auto st = example46_stack(Category::II, ref, ang);
  auto res = classify_halfspace(st);
  CHECK(res.misfit <= 1e-8);
  const double got = std::remainder(res.angle - ang, 2.0 * kPi);
  CHECK(std::abs(got) < 0.5 * kPi / 180.0);
  auto resf = res;
  CHECK(classify_example46(resf, example46_forcing()) == "ii");
}

TEST_CASE("classification is invariant under a common quadratic") {
  auto ref = reference_domain(257);
  auto st = example46_stack(Category::II, ref);
  auto base = classify_halfspace(st);
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < ref->node_count(); ++i)
      if (ref->cls[i] != NodeClass::Exterior) {
        const double x = ref->x(static_cast<int>(i) % ref->n);
        const double y = ref->y(static_cast<int>(i) / ref->n);
        st.u[j].v[i] += 0.3 * x * x - 0.1 * x * y;
      }
  auto shifted = classify_halfspace(st);
  CHECK(shifted.misfit <= base.misfit + 1e-8);
  CHECK(std::abs(shifted.a[0] - base.a[0]) < 1e-6);
  CHECK(std::abs(shifted.b[2] - base.b[2]) < 1e-6);
  CHECK(shifted.A.xx - base.A.xx == doctest::Approx(0.6).epsilon(1e-5));
}

TEST_CASE("degenerate profile flags") {
  auto ref = reference_domain(129);
  MembraneStack st(ref, 3);
  for (int j = 0; j < 3; ++j)
    st.u[j] = sample_field(ref, [](double x, double y) { return x * x - y * y; });
  auto res = classify_halfspace(st);
  CHECK(res.degenerate);
  for (int j = 0; j < 3; ++j) {
    CHECK(res.a[j] == 0.0);
    CHECK(res.b[j] == 0.0);
  }
  CHECK(res.A.xx == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("classify_example46 validation") {
  auto ref = reference_domain(129);
  auto st = example46_stack(Category::I, ref);
  auto res = classify_halfspace(st);
  CHECK_THROWS(classify_example46(res, Forcing({2.0, 0.0, -1.0}, 1.0)));
  ClassificationResult two;
  two.H.assign(2, Sym2{});
  two.k.assign(2, 0.0);
  CHECK_THROWS(classify_example46(two, example46_forcing()));
}

TEST_CASE("connectedness of contact sets on the probe circle") {
  auto ref = reference_domain(257);
  const Forcing forcing = example46_forcing();
  auto prof_i =
      rescale(example46_stack(Category::I, ref), forcing, ref->origin_ix,
              ref->origin_iy, 1.0);
  auto verdict = connectedness_check(prof_i, 0.5, 1e-5);
  REQUIRE(verdict.size() == 2);
  CHECK(verdict[0].connected);
  CHECK(verdict[0].longest_arc == doctest::Approx(kPi).epsilon(0.05));

  // category v with the default matrices: differences are positive definite
  // away from the origin, so the probe circle carries no contact at all
  auto prof_v =
      rescale(example46_stack(Category::V, ref), forcing, ref->origin_ix,
              ref->origin_iy, 1.0);
  auto vv = connectedness_check(prof_v, 0.5, 1e-5);
  CHECK(vv[0].empty);
  CHECK(vv[1].empty);

  // all-equal stack: the full circle is contact
  MembraneStack eq(ref, 2);
  eq.u[0] = sample_field(ref, [](double x, double y) { return x * y; });
  eq.u[1] = eq.u[0];
  BlowupProfile pe;
  pe.ref = ref;
  pe.stack = eq;
  auto ve = connectedness_check(pe, 0.5, 1e-5);
  CHECK(ve[0].connected);
  CHECK(ve[0].longest_arc == doctest::Approx(2 * kPi));
  CHECK_THROWS(connectedness_check(pe, 0.95, 1e-5));
}

TEST_CASE("constancy implies homogeneity on analytic stacks") {
  auto ref = reference_domain(257);
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::II, ref);
  auto rep = constancy_homogeneity_check(st, forcing, ref->origin_ix,
                                         ref->origin_iy, {0.25, 0.5, 0.75, 1.0},
                                         2e-3, 1e-3);
  CHECK(rep.w_constant);
  CHECK(rep.homogeneous);
  CHECK(rep.implication_holds);

  MembraneStack zero(ref, 3);
  auto zrep = constancy_homogeneity_check(zero, forcing, ref->origin_ix,
                                          ref->origin_iy, {0.25, 0.5, 0.75});
  CHECK(zrep.w_range == 0.0);
  CHECK(zrep.defect == 0.0);
  CHECK(zrep.implication_holds);
}
