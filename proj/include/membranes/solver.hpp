#pragma once

#include <span>
#include <vector>

#include "membranes/grid.hpp"

namespace membranes {

struct SolveConfig {
  double omega = 1.5;      // relaxation factor in [1, 2)
  double tol = -1.0;       // max node change per sweep; < 0 selects the
                           // scale-aware default 1e-10 max(|bc|, h^2 max|f|)
  int max_sweeps = 50000;
  bool track_energy = false;  // record the discrete energy after every sweep
};

struct SolveReport {
  int sweeps = 0;
  double residual = 0.0;  // last max node-vector change
  double energy = 0.0;    // discrete energy of the final stack
  double tol = 0.0;       // resolved stopping tolerance
  bool converged = false;
  std::vector<double> energy_trace;  // per sweep, when tracked
};

/// Euclidean projection of a vector onto {v_1 >= v_2 >= ... >= v_N}
/// (pool-adjacent-violators). Total on finite input; preserves the sum.
std::vector<double> pava_project(std::span<const double> a);
void pava_project_inplace(std::vector<double> &a);

/// Unconstrained Gauss-Seidel candidate for membrane j at an interior node:
/// (u_E + u_W + u_N + u_S - h^2 f_j) / 4.
double gs_candidate(const MembraneStack &stack, const Forcing &forcing, int ix,
                    int iy, int j);

/// One lexicographic projected-SOR pass over the interior nodes. Relaxes
/// every membrane candidate and replaces the node's N-vector by its isotonic
/// projection. Returns the max node-vector change of the sweep.
double psor_sweep(MembraneStack &stack, const Forcing &forcing,
                  const SolveConfig &config);

/// Edge-based discrete energy sum_edges (u_a - u_b)^2 + h^2 sum_int 2 f_j u_j.
/// This is the functional the sweep minimises; it decreases monotonically
/// under omega = 1.
double discrete_energy(const MembraneStack &stack, const Forcing &forcing);

/// Cell-quadrature energy: |grad u_j|^2 from forward differences per cell,
/// weighted by the exact disk-coverage fraction of boundary cells. Comparable
/// with the continuum energy integral.
double energy(const MembraneStack &stack, const Forcing &forcing);

/// Full solve: harmonic extension of each membrane's boundary data, nodewise
/// isotonic projection, then PSOR sweeps until the node-change residual
/// drops below tol. Non-convergence is reported, not thrown.
std::pair<MembraneStack, SolveReport> solve(const DomainPtr &dom,
                                            const Forcing &forcing,
                                            const BoundaryData &bc,
                                            const SolveConfig &config = {});

/// As above but starting from a caller-provided stack (projected nodewise if
/// infeasible). Boundary values of the stack are overwritten from bc.
std::pair<MembraneStack, SolveReport> solve_from(MembraneStack stack,
                                                 const Forcing &forcing,
                                                 const BoundaryData &bc,
                                                 const SolveConfig &config);

/// SOR omega that is asymptotically optimal for the 5-point Laplacian on an
/// n-per-side grid; convenient for production runs at large n.
double optimal_omega(int n);

/// Scalar SOR solve of Laplace(u) = 0 with Dirichlet values g at boundary
/// nodes (harmonic extension used for solver initialisation).
ScalarField harmonic_extension(const DomainPtr &dom,
                               const std::vector<double> &g,
                               double rel_tol = 1e-10, int max_sweeps = 20000);

struct ElResidualReport {
  double separated = 0.0;  // max |lap u_j - f_j| where the node is strictly
                           // separated from both neighbours of membrane j
  double contact = 0.0;    // max |lap u_j - lap u_{j+1}| on contact nodes
  double sum = 0.0;        // max |lap(sum u_j) - sum f_j| on all interior nodes
};

class ContactMask;  // geometry module

/// Euler-Lagrange residuals over interior nodes at least `margin_cells` cells
/// away from any free-boundary node of the mask.
ElResidualReport el_residual(const MembraneStack &stack, const Forcing &forcing,
                             const ContactMask &contact, int margin_cells = 2);

}  // namespace membranes
