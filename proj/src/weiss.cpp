#include "membranes/weiss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "membranes/blowup.hpp"

namespace membranes {

namespace {
constexpr double kPi = std::numbers::pi;

void check_ball(const GridDomain &d, double px, double py, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("weiss: r must be positive");
  const bool ok = d.shape == DomainShape::Disk
                      ? std::hypot(px, py) + r <= d.R + 1e-9
                      : std::max(std::abs(px), std::abs(py)) + r <= d.R + 1e-9;
  if (!ok) throw std::invalid_argument("weiss: ball leaves the domain");
}

int resolve_angles(const GridDomain &d, double r, int m_angles) {
  if (m_angles > 0) {
    if (m_angles < 128)
      throw std::invalid_argument("weiss: m_angles must be at least 128");
    return m_angles;
  }
  return std::max(128, 4 * static_cast<int>(std::ceil(2.0 * kPi * r / d.h)));
}

// interpolation with the point pulled fractionally inside the domain so
// samples on the outermost circle stay evaluable; cubic (Catmull-Rom) when
// the 4x4 stencil is available, bilinear near the rim
double rim_sample(const ScalarField &f, double X, double Y) {
  const GridDomain &d = *f.dom;
  if (d.shape == DomainShape::Disk) {
    const double rad = std::hypot(X, Y);
    if (rad > d.R) {
      const double t = d.R * (1.0 - 1e-12) / rad;
      X *= t;
      Y *= t;
    }
  }
  const double s = (X + d.R) / d.h, t = (Y + d.R) / d.h;
  const int ix = std::clamp(static_cast<int>(std::floor(s)), 0, d.n - 2);
  const int iy = std::clamp(static_cast<int>(std::floor(t)), 0, d.n - 2);
  bool cubic_ok = ix >= 1 && iy >= 1 && ix <= d.n - 3 && iy <= d.n - 3;
  for (int dy = -1; cubic_ok && dy <= 2; ++dy)
    for (int dx = -1; cubic_ok && dx <= 2; ++dx)
      cubic_ok = d.valued(ix + dx, iy + dy);
  if (!cubic_ok) return interpolate(f, X, Y);
  auto weights = [](double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = -0.5 * u3 + u2 - 0.5 * u;
    w[1] = 1.5 * u3 - 2.5 * u2 + 1.0;
    w[2] = -1.5 * u3 + 2.0 * u2 + 0.5 * u;
    w[3] = 0.5 * u3 - 0.5 * u2;
  };
  double wx[4], wy[4];
  weights(s - ix, wx);
  weights(t - iy, wy);
  double acc = 0.0;
  for (int dy = -1; dy <= 2; ++dy)
    for (int dx = -1; dx <= 2; ++dx)
      acc += wy[dy + 1] * wx[dx + 1] * f.at(ix + dx, iy + dy);
  return acc;
}

}  // namespace

WeissSample weiss_energy(const MembraneStack &stack, const Forcing &forcing,
                         double px, double py, double r, int m_angles) {
  if (forcing.has_fields())
    throw std::invalid_argument("Weiss module requires (CF)");
  const GridDomain &d = *stack.dom;
  check_ball(d, px, py, r);

  WeissSample out;
  out.px = px;
  out.py = py;
  out.r = r;

  // bulk: cell quadrature clipped by B_r(p). The midpoint rule carries a
  // systematic (h^2/24) Laplacian bias; a two-level Richardson step over
  // 2h blocks fully inside the ball removes it there, the rim band keeps
  // the plain rule.
  auto cell_term = [&](int ix, int iy, int step) {
    const int i = d.idx(ix, iy);
    const int dx = step, dy = step * d.n;
    double q = 0.0;
    for (int j = 0; j < stack.N; ++j) {
      const ScalarField &u = stack.u[j];
      const double sw = u.v[i], se = u.v[i + dx];
      const double nw = u.v[i + dy], ne = u.v[i + dy + dx];
      const double gx = 0.5 * ((se - sw) + (ne - nw)) / (step * d.h);
      const double gy = 0.5 * ((nw - sw) + (ne - se)) / (step * d.h);
      const double uc = 0.25 * (sw + se + nw + ne);
      q += gx * gx + gy * gy + 2.0 * forcing.constants[j] * uc;
    }
    return q;
  };
  // nodal gradients (central differences, one-sided at the valued rim) are
  // bilinearly interpolated inside rim-clipped cells, where the midpoint
  // value at the full-cell center would miss the clipped region's centroid
  auto node_grad = [&](const ScalarField &u, int ix, int iy, double &gx,
                       double &gy) {
    if (ix > 0 && ix + 1 < d.n && d.valued(ix - 1, iy) && d.valued(ix + 1, iy))
      gx = (u.at(ix + 1, iy) - u.at(ix - 1, iy)) / (2.0 * d.h);
    else if (ix + 1 < d.n && d.valued(ix + 1, iy))
      gx = (u.at(ix + 1, iy) - u.at(ix, iy)) / d.h;
    else
      gx = (u.at(ix, iy) - u.at(ix - 1, iy)) / d.h;
    if (iy > 0 && iy + 1 < d.n && d.valued(ix, iy - 1) && d.valued(ix, iy + 1))
      gy = (u.at(ix, iy + 1) - u.at(ix, iy - 1)) / (2.0 * d.h);
    else if (iy + 1 < d.n && d.valued(ix, iy + 1))
      gy = (u.at(ix, iy + 1) - u.at(ix, iy)) / d.h;
    else
      gy = (u.at(ix, iy) - u.at(ix, iy - 1)) / d.h;
  };
  // finer subdivision for small balls, where rim cells dominate the area
  const int kSub = r <= 16.0 * d.h ? 32 : (r <= 64.0 * d.h ? 16 : 8);
  auto clipped_cell = [&](int ix, int iy) {
    const double x0 = d.x(ix), y0 = d.y(iy);
    double val = 0.0;
    for (int j = 0; j < stack.N; ++j) {
      const ScalarField &u = stack.u[j];
      double gxc[2][2], gyc[2][2], uc[2][2];
      for (int cy = 0; cy < 2; ++cy)
        for (int cx = 0; cx < 2; ++cx) {
          node_grad(u, ix + cx, iy + cy, gxc[cy][cx], gyc[cy][cx]);
          uc[cy][cx] = u.at(ix + cx, iy + cy);
        }
      auto bilin = [&](const double v[2][2], double s, double t) {
        return (1 - t) * ((1 - s) * v[0][0] + s * v[0][1]) +
               t * ((1 - s) * v[1][0] + s * v[1][1]);
      };
      const double hs = d.h / kSub;
      for (int sy = 0; sy < kSub; ++sy)
        for (int sx = 0; sx < kSub; ++sx) {
          const double ws = disk_cell_overlap(px, py, r, x0 + sx * hs,
                                              x0 + (sx + 1) * hs, y0 + sy * hs,
                                              y0 + (sy + 1) * hs);
          if (ws <= 0.0) continue;
          const double s = (sx + 0.5) / kSub, t = (sy + 0.5) / kSub;
          const double gx = bilin(gxc, s, t), gy = bilin(gyc, s, t);
          val += ws * (gx * gx + gy * gy +
                       2.0 * forcing.constants[j] * bilin(uc, s, t));
        }
    }
    return val;
  };
  const int ix0 = std::max(0, static_cast<int>((px - r + d.R) / d.h) - 1);
  const int ix1 = std::min(d.n - 2, static_cast<int>((px + r + d.R) / d.h) + 1);
  const int iy0 = std::max(0, static_cast<int>((py - r + d.R) / d.h) - 1);
  const int iy1 = std::min(d.n - 2, static_cast<int>((py + r + d.R) / d.h) + 1);
  const double full = d.h * d.h * (1.0 - 1e-12);
  double bulk = 0.0;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double x0 = d.x(ix), y0 = d.y(iy);
      const double w =
          disk_cell_overlap(px, py, r, x0, x0 + d.h, y0, y0 + d.h);
      if (w <= 0.0) continue;
      if (!(d.valued(ix, iy) && d.valued(ix + 1, iy) && d.valued(ix, iy + 1) &&
            d.valued(ix + 1, iy + 1)))
        throw std::invalid_argument("weiss: ball leaves the valued region");
      bulk += w >= full ? w * cell_term(ix, iy, 1) : clipped_cell(ix, iy);
    }
  }
  // Richardson correction on even-aligned 2x2 blocks fully inside the ball
  const double h2 = d.h * d.h;
  for (int iy = (iy0 + 1) & ~1; iy + 1 <= iy1; iy += 2) {
    for (int ix = (ix0 + 1) & ~1; ix + 1 <= ix1; ix += 2) {
      if (ix + 2 >= d.n || iy + 2 >= d.n) continue;
      const double x0 = d.x(ix), y0 = d.y(iy);
      const double w2 =
          disk_cell_overlap(px, py, r, x0, x0 + 2 * d.h, y0, y0 + 2 * d.h);
      if (w2 < 4.0 * h2 * (1.0 - 1e-12)) continue;
      double fine = 0.0;
      fine += cell_term(ix, iy, 1) + cell_term(ix + 1, iy, 1) +
              cell_term(ix, iy + 1, 1) + cell_term(ix + 1, iy + 1, 1);
      fine *= h2;
      const double coarse = 4.0 * h2 * cell_term(ix, iy, 2);
      bulk += (fine - coarse) / 3.0;
    }
  }
  out.bulk = bulk / (r * r * r * r);

  // boundary: trapezoid rule on the circle
  const int m = resolve_angles(d, r, m_angles);
  double bdry = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    const double X = px + r * std::cos(th), Y = py + r * std::sin(th);
    for (int j = 0; j < stack.N; ++j) {
      const double u = rim_sample(stack.u[j], X, Y);
      bdry += u * u;
    }
  }
  out.boundary = 2.0 * bdry * (r * 2.0 * kPi / m) / std::pow(r, 5);
  out.W = out.bulk - out.boundary;
  return out;
}

std::vector<double> radial_derivative(const MembraneStack &stack, double px,
                                      double py, double r, double angle) {
  const GridDomain &d = *stack.dom;
  const double delta = 0.5 * d.h;
  if (r - delta <= 0.0)
    throw std::invalid_argument("radial_derivative: r too small for the step");
  check_ball(d, px, py, r + delta);
  const double cx = std::cos(angle), cy = std::sin(angle);
  std::vector<double> out(stack.N);
  for (int j = 0; j < stack.N; ++j) {
    const double hi =
        rim_sample(stack.u[j], px + (r + delta) * cx, py + (r + delta) * cy);
    const double lo =
        rim_sample(stack.u[j], px + (r - delta) * cx, py + (r - delta) * cy);
    out[j] = (hi - lo) / (2.0 * delta);
  }
  return out;
}

double weiss_lower_bound(const MembraneStack &stack, double px, double py,
                         double r, int m_angles) {
  const GridDomain &d = *stack.dom;
  check_ball(d, px, py, r + 0.5 * d.h);
  const int m = resolve_angles(d, r, m_angles);
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    const std::vector<double> dr = radial_derivative(stack, px, py, r, th);
    const double X = px + r * std::cos(th), Y = py + r * std::sin(th);
    for (int j = 0; j < stack.N; ++j) {
      const double u = rim_sample(stack.u[j], X, Y);
      const double t = dr[j] - 2.0 * u / r;
      acc += t * t;
    }
  }
  return acc * (r * 2.0 * kPi / m) / (r * r * r * r);
}

WeissSweep weiss_sweep(const MembraneStack &stack, const Forcing &forcing,
                       double px, double py, const std::vector<double> &radii,
                       int m_angles, double tol_W) {
  if (radii.size() < 3)
    throw std::invalid_argument("weiss_sweep: need at least 3 radii");
  for (std::size_t k = 0; k + 1 < radii.size(); ++k)
    if (radii[k + 1] <= radii[k])
      throw std::invalid_argument("weiss_sweep: radii must increase strictly");

  WeissSweep sweep;
  sweep.px = px;
  sweep.py = py;
  for (double r : radii)
    sweep.samples.push_back(weiss_energy(stack, forcing, px, py, r, m_angles));
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const WeissSample &a = sweep.samples[k], &b = sweep.samples[k + 1];
    const double dWdr = (b.W - a.W) / (b.r - a.r);
    const double rm = 0.5 * (a.r + b.r);
    const double L = weiss_lower_bound(stack, px, py, rm, m_angles);
    const double tol =
        tol_W > 0.0 ? tol_W
                    : 0.05 * (1.0 + std::max(std::abs(a.W), std::abs(b.W)));
    sweep.derivative.push_back(dWdr);
    sweep.lower_bound.push_back(L);
    sweep.tol.push_back(tol);
    const bool flag = dWdr < L - tol;
    sweep.flagged.push_back(flag);
    if (flag) ++sweep.flagged_count;
  }
  return sweep;
}

double scaling_symmetry_check(const MembraneStack &stack,
                              const Forcing &forcing, double r, int n_ref) {
  const GridDomain &d = *stack.dom;
  const int c = d.origin_ix;
  const WeissSample direct =
      weiss_energy(stack, forcing, d.x(c), d.y(c), r);
  const BlowupProfile prof = rescale(stack, forcing, c, c, r, n_ref);
  const WeissSample scaled =
      weiss_energy(prof.stack, forcing, 0.0, 0.0, 1.0);
  return std::abs(direct.W - scaled.W);
}

ConstancyReport constancy_homogeneity_check(const MembraneStack &stack,
                                            const Forcing &forcing, int p_ix,
                                            int p_iy,
                                            const std::vector<double> &radii,
                                            double tau_const, double tau_hom) {
  if (radii.size() < 3)
    throw std::invalid_argument(
        "constancy_homogeneity_check: need at least 3 radii");
  const GridDomain &d = *stack.dom;
  const double px = d.x(p_ix), py = d.y(p_iy);
  ConstancyReport rep;
  rep.w_min = rep.w_max = weiss_energy(stack, forcing, px, py, radii[0]).W;
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const double W = weiss_energy(stack, forcing, px, py, radii[k]).W;
    rep.w_min = std::min(rep.w_min, W);
    rep.w_max = std::max(rep.w_max, W);
  }
  rep.w_range = rep.w_max - rep.w_min;
  rep.w_constant = rep.w_range <= tau_const;

  const double r_big = *std::max_element(radii.begin(), radii.end());
  const BlowupProfile prof = rescale(stack, forcing, p_ix, p_iy, r_big);
  rep.defect = homogeneity_defect(prof, {0.25, 0.5, 0.75});
  rep.homogeneous = rep.defect <= tau_hom;
  rep.implication_holds = !rep.w_constant || rep.homogeneous;
  return rep;
}

}  // namespace membranes
