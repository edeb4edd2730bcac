#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "membranes/geometry.hpp"
#include "membranes/profiles.hpp"
#include "membranes/solver.hpp"

using namespace membranes;

namespace {
constexpr double kPi = std::numbers::pi;
const Category kCats[5] = {Category::I, Category::II, Category::III,
                           Category::IV, Category::V};
}  // namespace

TEST_CASE("category point values") {
  auto p1 = example46_profile(Category::I);
  CHECK(p1.value(0, 0.5, 0.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(p1.value(1, 0.5, 0.0) == 0.0);
  CHECK(p1.value(2, 0.5, 0.0) == doctest::Approx(-0.125).epsilon(1e-15));

  auto p2 = example46_profile(Category::II);
  CHECK(p2.value(0, -1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p2.value(1, -1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p2.value(2, -1.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));

  for (Category c : kCats) {
    auto p = example46_profile(c);
    for (int j = 0; j < 3; ++j) CHECK(p.value(j, 0.0, 0.0) == 0.0);
  }
}

TEST_CASE("categories are ordered, null-averaged and solve the system") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double f[3] = {1.0, 0.0, -1.0};
  for (Category c : kCats) {
    auto p = example46_profile(c, 0.3);
    CHECK(p.ordering_violation_sampled() <= 1e-12);
    for (int t = 0; t < 300; ++t) {
      const double x = U(rng), y = U(rng);
      double sum = 0.0, lap_sum = 0.0;
      for (int j = 0; j < 3; ++j) {
        sum += p.value(j, x, y);
        lap_sum += p.laplacian(j, x, y);
      }
      CHECK(std::abs(sum) < 1e-12);           // (NA)
      CHECK(std::abs(lap_sum) < 1e-12);       // sum of forcing is 0
      // separated membranes satisfy their own equation
      for (int j = 0; j < 3; ++j) {
        const bool sep_above =
            j == 0 || p.value(j - 1, x, y) - p.value(j, x, y) > 1e-9;
        const bool sep_below =
            j == 2 || p.value(j, x, y) - p.value(j + 1, x, y) > 1e-9;
        if (sep_above && sep_below)
          CHECK(std::abs(p.laplacian(j, x, y) - f[j]) < 1e-12);
      }
    }
  }
}

TEST_CASE("category constructor validation") {
  CHECK_THROWS(example46_profile(Category::III, 0.0, {Sym2{1.0, 0.0, 1.0}}));
  CHECK_THROWS(example46_profile(Category::V, 0.0,
                                 {Sym2{1, 0, 0}, Sym2{}, Sym2{0, 0, -0.5}}));
  CHECK_NOTHROW(example46_profile(Category::IV, 1.1, {Sym2{0.4, 0.0, 0.6}}));
}

TEST_CASE("halfspace profile algebra") {
  // N=2 difference collapses to a full quadratic in x.e
  HalfSpaceProfile p;
  p.a = {0.25, -0.25};
  p.b = {-0.25, 0.25};
  auto as = halfspace_profile_stack(p);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double x = U(rng), y = U(rng);
    const double want = 0.5 * x * x;  // e = (1,0)
    CHECK(as.value(0, x, y) - as.value(1, x, y) ==
          doctest::Approx(want).epsilon(1e-12));
  }

  // differences depend only on x.e
  HalfSpaceProfile q;
  q.ex = 0.6;
  q.ey = 0.8;
  q.a = {0.5, 0.1, -0.6};
  q.b = {-0.2, 0.0, 0.2};
  q.A = (2.0 * 0.0 / 3.0) * outer(0.6, 0.8);
  auto qs = halfspace_profile_stack(q);
  for (int t = 0; t < 200; ++t) {
    const double s = U(rng), t1 = U(rng), t2 = U(rng);
    // two points with the same x.e
    const double x1 = 0.6 * s - 0.8 * t1, y1 = 0.8 * s + 0.6 * t1;
    const double x2 = 0.6 * s - 0.8 * t2, y2 = 0.8 * s + 0.6 * t2;
    for (int j = 0; j + 1 < 3; ++j)
      CHECK(std::abs((qs.value(j, x1, y1) - qs.value(j + 1, x1, y1)) -
                     (qs.value(j, x2, y2) - qs.value(j + 1, x2, y2))) < 1e-10);
  }

  // a = b = 0: all membranes equal the common quadratic
  HalfSpaceProfile r;
  r.a = {0.0, 0.0};
  r.b = {0.0, 0.0};
  auto rs = halfspace_profile_stack(r);
  CHECK(rs.value(0, 0.3, -0.7) == rs.value(1, 0.3, -0.7));

  HalfSpaceProfile bad;
  bad.a = {0.0, 1.0};  // increasing
  bad.b = {0.0, 0.0};
  CHECK_THROWS(halfspace_profile_stack(bad));
}

TEST_CASE("halfspace compatibility validation") {
  HalfSpaceProfile p;
  p.a = {0.5, 0.0};
  p.b = {0.0, 0.0};  // sum a + sum b != 0
  CHECK_THROWS(halfspace_profile_stack(p));
  CHECK_NOTHROW(halfspace_profile_stack(p, false));
}

TEST_CASE("weiss closed forms: frozen constants and the ordering") {
  const double wi = weiss_of_category(Category::I);
  const double wii = weiss_of_category(Category::II);
  const double wiii = weiss_of_category(Category::III);
  const double wiv = weiss_of_category(Category::IV);
  const double wv = weiss_of_category(Category::V);

  CHECK(wi == doctest::Approx(kPi / 8).epsilon(1e-9));
  CHECK(wii == doctest::Approx(3 * kPi / 16).epsilon(1e-9));
  CHECK(wiii == doctest::Approx(7 * kPi / 32).epsilon(1e-9));
  CHECK(wiv == doctest::Approx(7 * kPi / 32).epsilon(1e-9));
  CHECK(wv == doctest::Approx(kPi / 4).epsilon(1e-9));

  CHECK(wii - wi > 1e-3);
  CHECK(wiii - wii > 1e-3);
  CHECK(std::abs(wiii - wiv) <= 1e-6);
  CHECK(wv - wiv > 1e-3);

  // invariant under the direction of e and deterministic
  CHECK(weiss_of_category(Category::I, 0.77) ==
        doctest::Approx(wi).epsilon(1e-12));
  CHECK(weiss_of_category(Category::V) == wv);
}

TEST_CASE("analytic stacks pass the residual check on a grid") {
  auto dom = build_domain(129, 1.0);
  const Forcing forcing = example46_forcing();
  for (Category c : {Category::I, Category::II, Category::V}) {
    auto st = example46_stack(c, dom);
    auto cm = contact_sets(st, default_eps_c(*dom, forcing));
    auto rep = el_residual(st, forcing, cm);
    CHECK(rep.separated <= 1e-8);
    CHECK(rep.sum <= 1e-8);
  }
}

TEST_CASE("cone solutions") {
  // single step: v = 1/2 (x.e0)_+^2 with e0 at angle pi/2
  ConeProfile single;
  single.breakpoints = {0.0, kPi / 2};
  single.sigma = {1.0};
  CHECK(cone_solution_value(single, 0.0, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cone_solution_value(single, 1.0, -0.5) == 0.0);

  // two steps: laplacian is 2 inside the second sector
  ConeProfile two;
  two.breakpoints = {0.0, kPi / 4, kPi / 2};
  two.sigma = {1.0, 2.0};
  const double mid = 0.5 * (kPi / 4 + kPi / 2) + kPi / 2;  // inside sector 2
  // sample a point whose angle from the base ray exceeds alpha_1
  {
    const double ang = kPi / 4 + 0.2;  // in (alpha_1, alpha)
    const double x = std::cos(ang + kPi / 2), y = std::sin(ang + kPi / 2);
    (void)mid;
    CHECK(cone_solution_laplacian(two, x, y) ==
          doctest::Approx(2.0).epsilon(1e-14));
  }

  // v and grad v vanish on the ray omega = 0 (the positive x-axis rotated
  // so that e_j = angle alpha_j + pi/2 kills it)
  for (double rho : {0.1, 0.7, 1.9}) {
    CHECK(std::abs(cone_solution_value(two, rho, 0.0)) < 1e-14);
    auto g = cone_solution_gradient(two, rho, 0.0);
    CHECK(std::abs(g[0]) < 1e-14);
    CHECK(std::abs(g[1]) < 1e-14);
  }

  // convexity for non-decreasing g
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const double x = U(rng), y = U(rng);
    const Sym2 hs = cone_solution_hessian(two, x, y);
    const double det = hs.xx * hs.yy - hs.xy * hs.xy;
    CHECK(hs.trace() >= -1e-12);
    CHECK(det >= -1e-12);
  }

  ConeProfile bad;
  bad.breakpoints = {0.0, 3.5};  // alpha > pi
  bad.sigma = {1.0};
  CHECK_THROWS(cone_solution_value(bad, 1.0, 0.0));
  ConeProfile neg;
  neg.breakpoints = {0.0, 1.0};
  neg.sigma = {-1.0};
  CHECK_THROWS(neg.validate());
}
