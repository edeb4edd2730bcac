#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "membranes/grid.hpp"
#include "membranes/io.hpp"
#include "membranes/solver.hpp"

using namespace membranes;

namespace {
constexpr double kPi = std::numbers::pi;

// dense projection oracle: enumerate all block compositions, keep feasible
// block-mean candidates, return the closest one
std::vector<double> isotonic_oracle(const std::vector<double> &a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> best;
  double best_d = -1.0;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<double> cand(n);
    int start = 0;
    bool feasible = true;
    double prev_mean = 0.0;
    bool first = true;
    for (int i = 0; i < n; ++i) {
      const bool cut = (i == n - 1) || (mask & (1 << i));
      if (!cut) continue;
      double mean = 0.0;
      for (int t = start; t <= i; ++t) mean += a[t];
      mean /= (i - start + 1);
      if (!first && mean > prev_mean + 1e-14) feasible = false;
      for (int t = start; t <= i; ++t) cand[t] = mean;
      prev_mean = mean;
      first = false;
      start = i + 1;
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (int i = 0; i < n; ++i) dist += (cand[i] - a[i]) * (cand[i] - a[i]);
    if (best_d < 0.0 || dist < best_d) {
      best_d = dist;
      best = cand;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("disk domain classification") {
  auto dom = build_domain(65, 1.0);
  CHECK(dom->h == doctest::Approx(2.0 / 64).epsilon(1e-15));
  CHECK(dom->interior(dom->origin_ix, dom->origin_iy));
  CHECK(dom->node_class(0, 0) == NodeClass::Exterior);
  // every cell overlapping the disk has four valued corners
  for (int iy = 0; iy + 1 < dom->n; ++iy)
    for (int ix = 0; ix + 1 < dom->n; ++ix) {
      const double x0 = dom->x(ix), y0 = dom->y(iy);
      const double w =
          disk_cell_overlap(0, 0, dom->R, x0, x0 + dom->h, y0, y0 + dom->h);
      if (w > 0.0) {
        CHECK(dom->valued(ix, iy));
        CHECK(dom->valued(ix + 1, iy));
        CHECK(dom->valued(ix, iy + 1));
        CHECK(dom->valued(ix + 1, iy + 1));
      }
    }
}

TEST_CASE("square domain classification") {
  auto dom = build_domain(9, 2.0, DomainShape::Square);
  CHECK(dom->node_class(0, 5) == NodeClass::Boundary);
  CHECK(dom->node_class(4, 4) == NodeClass::Interior);
}

TEST_CASE("build_domain argument validation") {
  CHECK_THROWS(build_domain(8, 1.0));
  CHECK_THROWS(build_domain(7, 1.0));
  CHECK_THROWS(build_domain(65, -1.0));
}

TEST_CASE("disk_cell_overlap exactness") {
  // full cell well inside
  CHECK(disk_cell_overlap(0, 0, 1.0, 0.1, 0.2, 0.1, 0.2) ==
        doctest::Approx(0.01).epsilon(1e-12));
  // cell fully outside
  CHECK(disk_cell_overlap(0, 0, 1.0, 2.0, 3.0, 2.0, 3.0) == 0.0);
  // quarter disk
  CHECK(disk_cell_overlap(0, 0, 1.0, 0.0, 2.0, 0.0, 2.0) ==
        doctest::Approx(kPi / 4).epsilon(1e-12));
  // partition of the plane recovers the full area
  double area = 0.0;
  const double h = 0.13;
  for (int iy = -20; iy < 20; ++iy)
    for (int ix = -20; ix < 20; ++ix)
      area += disk_cell_overlap(0.05, -0.02, 1.0, ix * h, (ix + 1) * h, iy * h,
                                (iy + 1) * h);
  CHECK(area == doctest::Approx(kPi).epsilon(1e-10));
}

TEST_CASE("discrete laplacian on quartics") {
  auto dom = build_domain(9, 1.0, DomainShape::Square);  // h = 0.25
  auto f = sample_field(dom,
                        [](double x, double) { return x * x * x * x; });
  // central second difference of x^4 is 12x^2 + 2h^2
  const int ix = 6, iy = 4;  // x = 0.5, y = 0
  CHECK(dom->x(ix) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(discrete_laplacian(f, ix, iy) ==
        doctest::Approx(3.125).epsilon(1e-10));
  CHECK_THROWS(discrete_laplacian(f, 0, 0));
}

TEST_CASE("discrete hessian exact on quadratics") {
  auto dom = build_domain(33, 1.0);
  auto f = sample_field(dom, [](double x, double y) {
    return 1.5 * x * x - 0.7 * x * y + 0.2 * y * y;
  });
  const int c = dom->origin_ix;
  auto hs = discrete_hessian(f, c + 3, c - 2);
  CHECK(hs[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(hs[1] == doctest::Approx(-0.7).epsilon(1e-10));
  CHECK(hs[2] == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("bilinear interpolation reproduces bilinear functions") {
  auto dom = build_domain(17, 1.0, DomainShape::Square);
  auto f = sample_field(
      dom, [](double x, double y) { return 2.0 + x - 3.0 * y + 0.5 * x * y; });
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-0.99, 0.99);
  for (int t = 0; t < 200; ++t) {
    const double x = U(rng), y = U(rng);
    const double want = 2.0 + x - 3.0 * y + 0.5 * x * y;
    CHECK(interpolate(f, x, y) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("normalize_average and ordering_violation") {
  auto dom = build_domain(17, 1.0);
  MembraneStack st(dom, 3);
  st.u[0] = sample_field(dom, [](double x, double) { return x + 2.0; });
  st.u[1] = sample_field(dom, [](double x, double) { return x; });
  st.u[2] = sample_field(dom, [](double x, double) { return x - 1.0; });
  CHECK(ordering_violation(st) <= 0.0);
  auto norm = normalize_average(st);
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix) {
      if (!dom->valued(ix, iy)) continue;
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += norm.u[j].at(ix, iy);
      CHECK(std::abs(s) < 1e-12);
      // pairwise differences unchanged
      CHECK(norm.u[0].at(ix, iy) - norm.u[1].at(ix, iy) ==
            doctest::Approx(2.0).epsilon(1e-12));
    }
  std::swap(st.u[0], st.u[2]);
  CHECK(ordering_violation(st) > 0.0);
}

TEST_CASE("pava basic properties") {
  // already sorted stays put
  std::vector<double> s{3.0, 2.0, 2.0, -1.0};
  CHECK(pava_project(s) == s);
  // single violator pools to the mean
  auto p = pava_project(std::vector<double>{1.0, 2.0});
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == doctest::Approx(1.5));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  std::uniform_int_distribution<int> len(1, 6);
  for (int t = 0; t < 10000; ++t) {
    const int n = len(rng);
    std::vector<double> a(n), b(n);
    double sum_a = 0.0;
    for (int i = 0; i < n; ++i) {
      a[i] = U(rng);
      b[i] = U(rng);
      sum_a += a[i];
    }
    auto pa = pava_project(a), pb = pava_project(b);
    // feasible and sum-preserving
    double sum_p = 0.0;
    for (int i = 0; i < n; ++i) sum_p += pa[i];
    CHECK(std::abs(sum_p - sum_a) < 1e-9);
    for (int i = 0; i + 1 < n; ++i) CHECK(pa[i] >= pa[i + 1] - 1e-12);
    // nonexpansive
    double dab = 0.0, dpp = 0.0;
    for (int i = 0; i < n; ++i) {
      dab += (a[i] - b[i]) * (a[i] - b[i]);
      dpp += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    }
    CHECK(dpp <= dab + 1e-9);
  }
}

TEST_CASE("pava matches the dense projection oracle") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  std::uniform_int_distribution<int> len(2, 6);
  for (int t = 0; t < 1000; ++t) {
    const int n = len(rng);
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = U(rng);
    auto got = pava_project(a);
    auto want = isotonic_oracle(a);
    for (int i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-9);
  }
}

TEST_CASE("harmonic extension reproduces linear data") {
  auto dom = build_domain(33, 1.0);
  std::vector<double> g(dom->node_count(), 0.0);
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix)
      if (dom->node_class(ix, iy) == NodeClass::Boundary)
        g[dom->idx(ix, iy)] = 0.5 * dom->x(ix) - dom->y(iy);
  auto u = harmonic_extension(dom, g, 1e-12);
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix)
      if (dom->valued(ix, iy))
        CHECK(std::abs(u.at(ix, iy) - (0.5 * dom->x(ix) - dom->y(iy))) < 1e-8);
}

TEST_CASE("discrete energy decreases monotonically under omega = 1") {
  auto dom = build_domain(33, 1.0);
  Forcing forcing({1.0, -1.0}, 2.0);
  auto bc = sample_boundary(dom, {[](double x, double) { return 0.1 + 0.05 * x; },
                                  [](double, double y) { return -0.1 + 0.05 * y; }});
  SolveConfig cfg;
  cfg.omega = 1.0;
  cfg.track_energy = true;
  cfg.max_sweeps = 200;
  auto [st, rep] = solve(dom, forcing, bc, cfg);
  REQUIRE(rep.energy_trace.size() > 10);
  for (std::size_t k = 1; k < rep.energy_trace.size(); ++k)
    CHECK(rep.energy_trace[k] <= rep.energy_trace[k - 1] + 1e-12);
  CHECK(ordering_violation(st) <= 1e-12);
}

TEST_CASE("solver argument validation") {
  auto dom = build_domain(17, 1.0);
  Forcing forcing({1.0, -1.0}, 2.0);
  BoundaryData bc(dom, 2);
  SolveConfig cfg;
  cfg.omega = 2.5;
  CHECK_THROWS(solve(dom, forcing, bc, cfg));
  BoundaryData bad(dom, 2);
  for (std::size_t i = 0; i < dom->node_count(); ++i)
    if (dom->cls[i] == NodeClass::Boundary) bad.g[1][i] = 1.0;  // g2 > g1
  CHECK_THROWS(solve(dom, forcing, bad, SolveConfig{}));
  CHECK_THROWS(Forcing({0.0, 1.0}, 1.0));  // violates declared separation
}

TEST_CASE("cell energy approximates continuum integrals") {
  auto dom = build_domain(129, 1.0);
  // u = x: integral of |grad|^2 over the unit disk is pi
  MembraneStack st(dom, 1);
  st.u[0] = sample_field(dom, [](double x, double) { return x; });
  CHECK(energy(st, Forcing({0.0})) == doctest::Approx(kPi).epsilon(2e-2));
  // u = 1, f = 1: integral of 2fu is 2 pi
  st.u[0] = sample_field(dom, [](double, double) { return 1.0; });
  CHECK(energy(st, Forcing({1.0})) == doctest::Approx(2 * kPi).epsilon(2e-2));
}

TEST_CASE("stack CSV + header round trip") {
  auto dom = build_domain(17, 1.3);
  Forcing forcing({1.0, 0.0, -1.0}, 1.0);
  MembraneStack st(dom, 3);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t i = 0; i < dom->node_count(); ++i)
    if (dom->cls[i] != NodeClass::Exterior)
      for (int j = 0; j < 3; ++j) st.u[j].v[i] = U(rng);
  write_stack_csv("roundtrip_stack.csv", st);
  write_stack_header("roundtrip_header.json", st, forcing);
  auto [rd, rf] = read_stack("roundtrip_header.json", "roundtrip_stack.csv");
  CHECK(rf.constants == forcing.constants);
  CHECK(rd.dom->n == dom->n);
  for (std::size_t i = 0; i < dom->node_count(); ++i)
    for (int j = 0; j < 3; ++j) CHECK(rd.u[j].v[i] == st.u[j].v[i]);
  std::remove("roundtrip_stack.csv");
  std::remove("roundtrip_header.json");
}
