#include "membranes/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace membranes {

double default_eps_c(const GridDomain &dom, const Forcing &forcing) {
  return 10.0 * dom.h * dom.h * std::max(1.0, forcing.max_abs());
}

ContactMask contact_sets(const MembraneStack &stack, double eps_c) {
  ContactMask cm;
  cm.dom = stack.dom;
  cm.pairs = stack.N - 1;
  cm.eps_c = eps_c;
  cm.mask.assign(static_cast<std::size_t>(cm.pairs) * stack.dom->node_count(),
                 0);
  for (int p = 0; p < cm.pairs; ++p) {
    const auto &hi = stack.u[p].v;
    const auto &lo = stack.u[p + 1].v;
    for (std::size_t i = 0; i < stack.dom->node_count(); ++i) {
      if (stack.dom->cls[i] == NodeClass::Exterior) continue;
      if (hi[i] - lo[i] <= eps_c)
        cm.mask[static_cast<std::size_t>(p) * stack.dom->node_count() + i] = 1;
    }
  }
  return cm;
}

MultiplicityMap free_boundary_nodes(const ContactMask &mask) {
  const GridDomain &d = *mask.dom;
  MultiplicityMap out;
  out.dom = mask.dom;
  out.pairs = mask.pairs;
  out.multiplicity.assign(d.node_count(), 0);
  out.fb_nodes.resize(mask.pairs);
  out.fb_any.assign(d.node_count(), 0);
  out.fb_all.assign(d.node_count(), 1);

  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int p = 0; p < mask.pairs; ++p) {
    std::vector<std::uint8_t> on_fb(d.node_count(), 0);
    for (int iy = 0; iy < d.n; ++iy) {
      for (int ix = 0; ix < d.n; ++ix) {
        if (!d.valued(ix, iy)) continue;
        const int i = d.idx(ix, iy);
        if (mask.contact(p, ix, iy)) out.multiplicity[i]++;
        bool transition = false;
        for (int q = 0; q < 4 && !transition; ++q) {
          const int jx = ix + dx[q], jy = iy + dy[q];
          if (jx < 0 || jy < 0 || jx >= d.n || jy >= d.n) continue;
          if (!d.valued(jx, jy)) continue;
          transition = mask.contact(p, ix, iy) != mask.contact(p, jx, jy);
        }
        if (transition) {
          on_fb[i] = 1;
          out.fb_nodes[p].push_back(i);
          out.fb_any[i] = 1;
        }
      }
    }
    for (std::size_t i = 0; i < d.node_count(); ++i)
      out.fb_all[i] = out.fb_all[i] && on_fb[i];
  }
  for (std::size_t i = 0; i < d.node_count(); ++i)
    if (d.cls[i] == NodeClass::Exterior) out.fb_all[i] = 0;
  return out;
}

int find_highest_multiplicity_node(const MultiplicityMap &map, double near_x,
                                   double near_y) {
  const GridDomain &d = *map.dom;
  int best = -1;
  double best_d2 = std::numeric_limits<double>::max();
  for (int iy = 0; iy < d.n; ++iy) {
    for (int ix = 0; ix < d.n; ++ix) {
      const int i = d.idx(ix, iy);
      if (map.multiplicity[i] != map.pairs || !map.fb_all[i]) continue;
      const double ddx = d.x(ix) - near_x, ddy = d.y(iy) - near_y;
      const double d2 = ddx * ddx + ddy * ddy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
  }
  return best;
}

namespace {

// sup of u_p - u_{p+1} over grid nodes with |x - p| <= r (closed ball)
std::vector<std::vector<double>> ball_sups(const MembraneStack &stack,
                                           double px, double py,
                                           const std::vector<double> &radii) {
  const GridDomain &d = *stack.dom;
  std::vector<std::vector<double>> sup(
      stack.N - 1, std::vector<double>(radii.size(), 0.0));
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const int ix0 = std::max(0, static_cast<int>((px - rmax + d.R) / d.h) - 1);
  const int ix1 =
      std::min(d.n - 1, static_cast<int>((px + rmax + d.R) / d.h) + 1);
  const int iy0 = std::max(0, static_cast<int>((py - rmax + d.R) / d.h) - 1);
  const int iy1 =
      std::min(d.n - 1, static_cast<int>((py + rmax + d.R) / d.h) + 1);
  const double pad = 1e-12 * std::max(1.0, rmax);
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      if (!d.valued(ix, iy)) continue;
      const double ddx = d.x(ix) - px, ddy = d.y(iy) - py;
      const double dist = std::sqrt(ddx * ddx + ddy * ddy);
      const int i = d.idx(ix, iy);
      for (std::size_t k = 0; k < radii.size(); ++k) {
        if (dist > radii[k] + pad) continue;
        for (int p = 0; p + 1 < stack.N; ++p)
          sup[p][k] =
              std::max(sup[p][k], stack.u[p].v[i] - stack.u[p + 1].v[i]);
      }
    }
  }
  return sup;
}

GrowthScan base_scan(const MembraneStack &stack, const MultiplicityMap &map,
                     int p_ix, int p_iy, const std::vector<double> &radii) {
  const GridDomain &d = *stack.dom;
  const int i = d.idx(p_ix, p_iy);
  if (map.multiplicity[i] != map.pairs)
    throw std::invalid_argument(
        "growth scan: base point is not a highest-multiplicity node");
  if (radii.empty())
    throw std::invalid_argument("growth scan: need at least one radius");
  GrowthScan scan;
  scan.px = d.x(p_ix);
  scan.py = d.y(p_iy);
  scan.radii = radii;
  scan.sup = ball_sups(stack, scan.px, scan.py, radii);
  const int pairs = stack.N - 1;
  scan.slope.assign(pairs, 0.0);
  scan.c_upper.assign(pairs, 0.0);
  scan.c_lower.assign(pairs, std::numeric_limits<double>::max());
  scan.degenerate.assign(pairs, false);
  scan.flagged.assign(pairs, false);
  for (int p = 0; p < pairs; ++p) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double s = scan.sup[p][k];
      scan.c_upper[p] = std::max(scan.c_upper[p], s / (radii[k] * radii[k]));
      scan.c_lower[p] = std::min(scan.c_lower[p], s / (radii[k] * radii[k]));
      if (s <= 0.0) continue;
      const double lx = std::log(radii[k]), ly = std::log(s);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m < 2) {
      scan.degenerate[p] = true;
      scan.c_lower[p] = 0.0;
      continue;
    }
    scan.slope[p] = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return scan;
}

}  // namespace

GrowthScan quadratic_growth_scan(const MembraneStack &stack,
                                 const MultiplicityMap &map, int p_ix, int p_iy,
                                 const std::vector<double> &radii) {
  return base_scan(stack, map, p_ix, p_iy, radii);
}

GrowthScan nondegeneracy_scan(const MembraneStack &stack,
                              const MultiplicityMap &map, int p_ix, int p_iy,
                              const std::vector<double> &radii,
                              const Forcing &forcing, double c_min) {
  if (!(forcing.theta > 0.0))
    throw std::invalid_argument(
        "nondegeneracy_scan: requires theta > 0 (non-degenerate forcing)");
  GrowthScan scan = base_scan(stack, map, p_ix, p_iy, radii);
  for (std::size_t p = 0; p < scan.flagged.size(); ++p)
    scan.flagged[p] = scan.c_lower[p] < c_min;
  return scan;
}

double hessian_bound_report(const MembraneStack &stack, double margin) {
  const GridDomain &d = *stack.dom;
  double bound = 0.0;
  for (int iy = 1; iy < d.n - 1; ++iy) {
    for (int ix = 1; ix < d.n - 1; ++ix) {
      if (!d.interior(ix, iy) || !hessian_stencil_ok(d, ix, iy)) continue;
      if (d.shape == DomainShape::Disk) {
        const double rad = std::hypot(d.x(ix), d.y(iy));
        if (d.R - rad < margin) continue;
      } else {
        const double bx = d.R - std::abs(d.x(ix));
        const double by = d.R - std::abs(d.y(iy));
        if (std::min(bx, by) < margin) continue;
      }
      for (int j = 0; j < stack.N; ++j) {
        const auto hss = discrete_hessian(stack.u[j], ix, iy);
        bound = std::max({bound, std::abs(hss[0]), std::abs(hss[1]),
                          std::abs(hss[2])});
      }
    }
  }
  return bound;
}

CircleRestriction circle_restriction(const MembraneStack &stack, double px,
                                     double py, double r, int m,
                                     double eps_c) {
  const GridDomain &d = *stack.dom;
  if (m < 64)
    throw std::invalid_argument("circle_restriction: need at least 64 samples");
  CircleRestriction out;
  out.r = r;
  out.m = m;
  out.values.assign(stack.N, std::vector<double>(m, 0.0));
  const double step = 2.0 * std::numbers::pi / m;
  for (int k = 0; k < m; ++k) {
    const double x = px + r * std::cos(k * step);
    const double y = py + r * std::sin(k * step);
    if (!interpolation_ok(d, x, y))
      throw std::invalid_argument("circle_restriction: circle leaves domain");
    for (int j = 0; j < stack.N; ++j)
      out.values[j][k] = interpolate(stack.u[j], x, y);
  }
  out.arcs.resize(stack.N - 1);
  for (int p = 0; p + 1 < stack.N; ++p) {
    std::vector<bool> pos(m);
    int positives = 0;
    for (int k = 0; k < m; ++k) {
      pos[k] = out.values[p][k] - out.values[p + 1][k] > eps_c;
      positives += pos[k];
    }
    if (positives == m) {
      out.arcs[p].push_back({0.0, 2.0 * std::numbers::pi});
      continue;
    }
    if (positives == 0) continue;
    // walk components with wraparound, starting after a negative sample
    int start = 0;
    while (pos[start]) start = (start + 1) % m;
    for (int off = 0; off < m;) {
      const int k = (start + off) % m;
      if (!pos[k]) {
        ++off;
        continue;
      }
      int len = 0;
      while (off + len < m && pos[(start + off + len) % m]) ++len;
      out.arcs[p].push_back({k * step, len * step});
      off += len;
    }
  }
  return out;
}

}  // namespace membranes
