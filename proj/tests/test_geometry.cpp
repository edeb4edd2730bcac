#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "membranes/geometry.hpp"
#include "membranes/profiles.hpp"

using namespace membranes;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("contact sets and multiplicity on category i") {
  auto dom = build_domain(129, 1.0);
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::I, dom);
  const double eps = default_eps_c(*dom, forcing);
  auto cm = contact_sets(st, eps);
  CHECK(cm.pairs == 2);
  // deep in the half-space x < 0 both pairs touch; far on x > 0 they separate
  const int c = dom->origin_ix;
  CHECK(cm.contact(0, c - 20, c));
  CHECK(cm.contact(1, c - 20, c));
  CHECK_FALSE(cm.contact(0, c + 40, c));
  auto map = free_boundary_nodes(cm);
  CHECK(map.multiplicity[dom->idx(c - 20, c)] == 2);
  CHECK(map.multiplicity[dom->idx(c + 40, c)] == 0);
  // both pairs share the free boundary near {x = 0}; a full-multiplicity
  // common node exists near the origin
  const int p = find_highest_multiplicity_node(map, 0.0, 0.0);
  REQUIRE(p >= 0);
  const int piy = p / dom->n, pix = p % dom->n;
  CHECK(std::abs(dom->y(piy)) <= 1.0);
  CHECK(std::abs(dom->x(pix)) <= 0.1);
}

TEST_CASE("quadratic growth scan on category i is exact") {
  auto dom = build_domain(129, 1.2);  // h = 2.4/128 = 0.01875
  const Forcing forcing = example46_forcing();
  auto st = example46_stack(Category::I, dom);
  auto cm = contact_sets(st, default_eps_c(*dom, forcing));
  auto map = free_boundary_nodes(cm);
  const int c = dom->origin_ix;
  REQUIRE(map.multiplicity[dom->idx(c, c)] == 2);
  // radii chosen as exact multiples of h: sup over nodes of 1/2 (x)_+^2 on
  // the closed ball of radius r is exactly r^2/2
  const double h = dom->h;
  std::vector<double> radii = {8 * h, 12 * h, 16 * h, 24 * h};
  auto scan = quadratic_growth_scan(st, map, c, c, radii);
  for (int p = 0; p < 2; ++p) {
    CHECK(scan.slope[p] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(scan.c_upper[p] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(scan.c_lower[p] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(scan.degenerate[p]);
  }
  // base point must have full multiplicity
  CHECK_THROWS(quadratic_growth_scan(st, map, c + 40, c, radii));
}

TEST_CASE("nondegeneracy scan gates on theta") {
  auto dom = build_domain(65, 1.0);
  auto st = example46_stack(Category::I, dom);
  const Forcing nd = example46_forcing(1.0);
  const Forcing deg({1.0, 0.0, -1.0}, 0.0);
  auto cm = contact_sets(st, default_eps_c(*dom, nd));
  auto map = free_boundary_nodes(cm);
  const int c = dom->origin_ix;
  const double h = dom->h;
  std::vector<double> radii = {4 * h, 8 * h, 12 * h};
  auto scan = nondegeneracy_scan(st, map, c, c, radii, nd, 0.05);
  CHECK_FALSE(scan.flagged[0]);
  CHECK_FALSE(scan.flagged[1]);
  CHECK_THROWS(nondegeneracy_scan(st, map, c, c, radii, deg, 0.05));
}

TEST_CASE("hessian bound on analytic categories") {
  auto dom = build_domain(129, 1.0);
  auto st = example46_stack(Category::V, dom);
  // default matrices (I/2, 0, -I/2): largest Hessian entry is 1/2
  CHECK(hessian_bound_report(st, 0.1) == doctest::Approx(0.5).epsilon(1e-9));
  auto st1 = example46_stack(Category::I, dom);
  // kink profile: Hessian jump 2 k_1 = 1 along e
  CHECK(hessian_bound_report(st1, 0.1) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("circle restriction finds the pi arcs of category i") {
  auto dom = build_domain(257, 1.2);
  auto st = example46_stack(Category::I, dom);
  auto cr = circle_restriction(st, 0.0, 0.0, 1.0, 256, 1e-5);
  REQUIRE(cr.arcs.size() == 2);
  for (int p = 0; p < 2; ++p) {
    REQUIRE(cr.arcs[p].size() == 1);
    CHECK(cr.arcs[p][0].length == doctest::Approx(kPi).epsilon(0.02));
  }
  // all-equal stack: no separated arcs at all
  MembraneStack eq(dom, 2);
  eq.u[0] = sample_field(dom, [](double x, double y) { return x * x + y * y; });
  eq.u[1] = eq.u[0];
  auto cre = circle_restriction(eq, 0.0, 0.0, 1.0, 256, 1e-5);
  CHECK(cre.arcs[0].empty());
  // circle leaving the domain throws
  CHECK_THROWS(circle_restriction(st, 0.9, 0.0, 1.0, 256, 1e-5));
  CHECK_THROWS(circle_restriction(st, 0.0, 0.0, 0.5, 32, 1e-5));
}
