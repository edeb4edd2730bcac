#include "membranes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "membranes/geometry.hpp"

namespace membranes {

std::vector<double> pava_project(std::span<const double> a) {
  std::vector<double> out(a.begin(), a.end());
  pava_project_inplace(out);
  return out;
}

void pava_project_inplace(std::vector<double> &a) {
  // Non-increasing isotonic regression: pool adjacent violators.
  const int n = static_cast<int>(a.size());
  if (n <= 1) return;
  // blocks of (mean, weight)
  static thread_local std::vector<double> mean, weight;
  mean.clear();
  weight.clear();
  for (int i = 0; i < n; ++i) {
    double m = a[i], w = 1.0;
    while (!mean.empty() && mean.back() < m) {
      m = (m * w + mean.back() * weight.back()) / (w + weight.back());
      w += weight.back();
      mean.pop_back();
      weight.pop_back();
    }
    mean.push_back(m);
    weight.push_back(w);
  }
  int pos = 0;
  for (std::size_t b = 0; b < mean.size(); ++b)
    for (int c = 0; c < static_cast<int>(weight[b]); ++c) a[pos++] = mean[b];
}

double gs_candidate(const MembraneStack &stack, const Forcing &forcing, int ix,
                    int iy, int j) {
  const GridDomain &d = *stack.dom;
  if (!d.interior(ix, iy))
    throw std::invalid_argument("gs_candidate: node is not interior");
  const ScalarField &u = stack.u[j];
  const double f = forcing.value(j, d.idx(ix, iy));
  return (u.at(ix + 1, iy) + u.at(ix - 1, iy) + u.at(ix, iy + 1) +
          u.at(ix, iy - 1) - d.h * d.h * f) *
         0.25;
}

double psor_sweep(MembraneStack &stack, const Forcing &forcing,
                  const SolveConfig &config) {
  const GridDomain &d = *stack.dom;
  const int N = stack.N;
  const double h2 = d.h * d.h;
  const double omega = config.omega;
  double max_change = 0.0;
  std::vector<double> vec(N);
  for (int iy = 1; iy < d.n - 1; ++iy) {
    for (int ix = 1; ix < d.n - 1; ++ix) {
      if (!d.interior(ix, iy)) continue;
      const int i = d.idx(ix, iy);
      for (int j = 0; j < N; ++j) {
        const ScalarField &u = stack.u[j];
        const double cand = (u.v[i + 1] + u.v[i - 1] + u.v[i + d.n] +
                             u.v[i - d.n] - h2 * forcing.value(j, i)) *
                            0.25;
        vec[j] = u.v[i] + omega * (cand - u.v[i]);
      }
      pava_project_inplace(vec);
      for (int j = 0; j < N; ++j) {
        const double change = std::abs(vec[j] - stack.u[j].v[i]);
        max_change = std::max(max_change, change);
        stack.u[j].v[i] = vec[j];
      }
    }
  }
  return max_change;
}

double discrete_energy(const MembraneStack &stack, const Forcing &forcing) {
  const GridDomain &d = *stack.dom;
  const double h2 = d.h * d.h;
  double e = 0.0;
  for (int iy = 0; iy < d.n; ++iy) {
    for (int ix = 0; ix < d.n; ++ix) {
      if (!d.valued(ix, iy)) continue;
      const int i = d.idx(ix, iy);
      const bool right = ix + 1 < d.n && d.valued(ix + 1, iy);
      const bool up = iy + 1 < d.n && d.valued(ix, iy + 1);
      for (int j = 0; j < stack.N; ++j) {
        const ScalarField &u = stack.u[j];
        if (right) {
          const double du = u.v[i + 1] - u.v[i];
          e += du * du;
        }
        if (up) {
          const double du = u.v[i + d.n] - u.v[i];
          e += du * du;
        }
        if (d.interior(ix, iy)) e += 2.0 * h2 * forcing.value(j, i) * u.v[i];
      }
    }
  }
  return e;
}

double energy(const MembraneStack &stack, const Forcing &forcing) {
  const GridDomain &d = *stack.dom;
  const double h2 = d.h * d.h;
  double e = 0.0;
  for (int iy = 0; iy + 1 < d.n; ++iy) {
    for (int ix = 0; ix + 1 < d.n; ++ix) {
      if (!(d.valued(ix, iy) && d.valued(ix + 1, iy) && d.valued(ix, iy + 1) &&
            d.valued(ix + 1, iy + 1)))
        continue;
      double w = h2;
      if (d.shape == DomainShape::Disk) {
        // clip boundary cells by the exact disk coverage
        const double x0 = d.x(ix), y0 = d.y(iy);
        const double far2 =
            std::max(x0 * x0, (x0 + d.h) * (x0 + d.h)) +
            std::max(y0 * y0, (y0 + d.h) * (y0 + d.h));
        if (far2 > d.R * d.R)
          w = disk_cell_overlap(0.0, 0.0, d.R, x0, x0 + d.h, y0, y0 + d.h);
        if (w <= 0.0) continue;
      }
      const int i = d.idx(ix, iy);
      for (int j = 0; j < stack.N; ++j) {
        const ScalarField &u = stack.u[j];
        const double sw = u.v[i], se = u.v[i + 1];
        const double nw = u.v[i + d.n], ne = u.v[i + d.n + 1];
        const double gx = 0.5 * ((se - sw) + (ne - nw)) / d.h;
        const double gy = 0.5 * ((nw - sw) + (ne - se)) / d.h;
        const double uc = 0.25 * (sw + se + nw + ne);
        e += w * (gx * gx + gy * gy +
                  2.0 * forcing.value(j, i) * uc);
      }
    }
  }
  return e;
}

double optimal_omega(int n) {
  const double rho = std::cos(std::numbers::pi / (n - 1));
  return 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
}

ScalarField harmonic_extension(const DomainPtr &dom,
                               const std::vector<double> &g, double rel_tol,
                               int max_sweeps) {
  ScalarField u(dom);
  double scale = 0.0;
  for (std::size_t i = 0; i < dom->node_count(); ++i) {
    if (dom->cls[i] == NodeClass::Boundary) {
      u.v[i] = g[i];
      scale = std::max(scale, std::abs(g[i]));
    }
  }
  const double omega = optimal_omega(dom->n);
  const double tol = rel_tol * std::max(scale, 1e-300);
  const int n = dom->n;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (int iy = 1; iy < n - 1; ++iy) {
      for (int ix = 1; ix < n - 1; ++ix) {
        if (!dom->interior(ix, iy)) continue;
        const int i = dom->idx(ix, iy);
        const double cand =
            0.25 * (u.v[i + 1] + u.v[i - 1] + u.v[i + n] + u.v[i - n]);
        const double next = u.v[i] + omega * (cand - u.v[i]);
        change = std::max(change, std::abs(next - u.v[i]));
        u.v[i] = next;
      }
    }
    if (change <= tol) break;
  }
  return u;
}

namespace {

double resolved_tol(const GridDomain &dom, const Forcing &forcing,
                    const BoundaryData &bc, const SolveConfig &config) {
  if (config.tol > 0.0) return config.tol;
  const double scale =
      std::max(bc.max_abs(), dom.h * dom.h * forcing.max_abs());
  return 1e-10 * std::max(scale, 1e-6);
}

void impose_boundary(MembraneStack &stack, const BoundaryData &bc) {
  for (std::size_t i = 0; i < stack.dom->node_count(); ++i)
    if (stack.dom->cls[i] == NodeClass::Boundary)
      for (int j = 0; j < stack.N; ++j) stack.u[j].v[i] = bc.g[j][i];
}

void project_nodewise(MembraneStack &stack) {
  std::vector<double> vec(stack.N);
  for (std::size_t i = 0; i < stack.dom->node_count(); ++i) {
    if (stack.dom->cls[i] == NodeClass::Exterior) continue;
    for (int j = 0; j < stack.N; ++j) vec[j] = stack.u[j].v[i];
    pava_project_inplace(vec);
    for (int j = 0; j < stack.N; ++j) stack.u[j].v[i] = vec[j];
  }
}

}  // namespace

std::pair<MembraneStack, SolveReport> solve_from(MembraneStack stack,
                                                 const Forcing &forcing,
                                                 const BoundaryData &bc,
                                                 const SolveConfig &config) {
  if (config.omega < 1.0 || config.omega >= 2.0)
    throw std::invalid_argument("solve: omega must lie in [1, 2)");
  if (forcing.N() != stack.N || bc.N() != stack.N)
    throw std::invalid_argument("solve: membrane count mismatch");
  bc.validate_ordering();

  impose_boundary(stack, bc);
  project_nodewise(stack);

  SolveReport report;
  report.tol = resolved_tol(*stack.dom, forcing, bc, config);
  if (config.track_energy)
    report.energy_trace.push_back(discrete_energy(stack, forcing));

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    report.residual = psor_sweep(stack, forcing, config);
    report.sweeps = sweep + 1;
    if (config.track_energy)
      report.energy_trace.push_back(discrete_energy(stack, forcing));
    if (report.residual <= report.tol) {
      report.converged = true;
      break;
    }
  }
  report.energy = discrete_energy(stack, forcing);
  return {std::move(stack), report};
}

std::pair<MembraneStack, SolveReport> solve(const DomainPtr &dom,
                                            const Forcing &forcing,
                                            const BoundaryData &bc,
                                            const SolveConfig &config) {
  MembraneStack stack(dom, forcing.N());
  for (int j = 0; j < stack.N; ++j)
    stack.u[j] = harmonic_extension(dom, bc.g[j], 1e-8);
  return solve_from(std::move(stack), forcing, bc, config);
}

ElResidualReport el_residual(const MembraneStack &stack, const Forcing &forcing,
                             const ContactMask &contact, int margin_cells) {
  const GridDomain &d = *stack.dom;
  const MultiplicityMap map = free_boundary_nodes(contact);
  // nodes within margin_cells (Chebyshev) of any free-boundary node
  std::vector<std::uint8_t> excluded(d.node_count(), 0);
  for (int iy = 0; iy < d.n; ++iy)
    for (int ix = 0; ix < d.n; ++ix)
      if (map.fb_any[d.idx(ix, iy)])
        for (int dy = -margin_cells; dy <= margin_cells; ++dy)
          for (int dx = -margin_cells; dx <= margin_cells; ++dx) {
            const int jx = ix + dx, jy = iy + dy;
            if (jx >= 0 && jy >= 0 && jx < d.n && jy < d.n)
              excluded[d.idx(jx, jy)] = 1;
          }

  ElResidualReport rep;
  double sum_f = 0.0;
  for (double f : forcing.constants) sum_f += f;
  for (int iy = 1; iy < d.n - 1; ++iy) {
    for (int ix = 1; ix < d.n - 1; ++ix) {
      if (!d.interior(ix, iy)) continue;
      const int i = d.idx(ix, iy);
      double lap_sum = 0.0;
      std::vector<double> lap(stack.N);
      for (int j = 0; j < stack.N; ++j) {
        lap[j] = discrete_laplacian(stack.u[j], ix, iy);
        lap_sum += lap[j];
      }
      rep.sum = std::max(rep.sum, std::abs(lap_sum - sum_f));
      if (excluded[i]) continue;
      for (int j = 0; j < stack.N; ++j) {
        const bool above = (j == 0) || !contact.contact(j - 1, ix, iy);
        const bool below = (j == stack.N - 1) || !contact.contact(j, ix, iy);
        if (above && below)
          rep.separated = std::max(
              rep.separated, std::abs(lap[j] - forcing.value(j, i)));
      }
      for (int j = 0; j + 1 < stack.N; ++j)
        if (contact.contact(j, ix, iy))
          rep.contact = std::max(rep.contact, std::abs(lap[j] - lap[j + 1]));
    }
  }
  return rep;
}

}  // namespace membranes
