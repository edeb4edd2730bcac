#pragma once

#include <vector>

#include "membranes/grid.hpp"

namespace membranes {

/// One evaluation of the Weiss-type energy (d = 2):
/// W = bulk - boundary with
///   bulk     = (1/r^4) int_{B_r(p)} sum_j (|grad u_j|^2 + 2 f_j u_j)
///   boundary = (2/r^5) int_{dB_r(p)} sum_j u_j^2.
struct WeissSample {
  double px = 0.0, py = 0.0;
  double r = 0.0;
  double bulk = 0.0;
  double boundary = 0.0;
  double W = 0.0;
};

struct WeissSweep {
  double px = 0.0, py = 0.0;
  std::vector<WeissSample> samples;
  std::vector<double> derivative;   // per gap, (W_{k+1} - W_k)/(r_{k+1} - r_k)
  std::vector<double> lower_bound;  // per gap, L at the midpoint radius
  std::vector<double> tol;          // per gap, resolved tol_W
  std::vector<bool> flagged;        // derivative < lower_bound - tol
  int flagged_count = 0;
};

/// Bulk term by circle-clipped cell quadrature, boundary term by the
/// trapezoid rule over m_angles interpolated samples (m_angles <= 0 selects
/// max(128, 4 ceil(2 pi r / h))). Requires constant forcing and the ball
/// inside the domain.
WeissSample weiss_energy(const MembraneStack &stack, const Forcing &forcing,
                         double px, double py, double r, int m_angles = 0);

/// Central difference (u(p + (r+d)w) - u(p + (r-d)w)) / 2d with d = h/2,
/// per membrane, at the direction given by `angle`.
std::vector<double> radial_derivative(const MembraneStack &stack, double px,
                                      double py, double r, double angle);

/// Derivative lower bound L(r) = (1/r^4) int_{dB_r} sum_j (d_r u_j - 2u_j/r)^2.
double weiss_lower_bound(const MembraneStack &stack, double px, double py,
                         double r, int m_angles = 0);

/// Samples W over at least three increasing radii, forms difference quotients
/// and midpoint lower bounds, and flags every gap where the quotient drops
/// below L - tol_W. tol_W <= 0 selects 0.05 (1 + |W|) per gap.
WeissSweep weiss_sweep(const MembraneStack &stack, const Forcing &forcing,
                       double px, double py, const std::vector<double> &radii,
                       int m_angles = 0, double tol_W = -1.0);

/// |W(u, 0, r) - W(T_{0,r}u, 0, 1)| with the rescaled stack built on the
/// reference grid; zero in the continuum by the scaling symmetry.
double scaling_symmetry_check(const MembraneStack &stack,
                              const Forcing &forcing, double r,
                              int n_ref = 257);

struct ConstancyReport {
  double w_min = 0.0, w_max = 0.0, w_range = 0.0;
  bool w_constant = false;          // w_range <= tau_const
  double defect = 0.0;              // homogeneity defect of the blow-up
  bool homogeneous = false;         // defect <= tau_hom
  bool implication_holds = false;   // constant W => homogeneous
};

/// Checks the constancy-implies-homogeneity link at a contact node: W is
/// sampled over the radii; when it is constant to tau_const the blow-up at
/// the largest radius must have homogeneity defect <= tau_hom.
ConstancyReport constancy_homogeneity_check(const MembraneStack &stack,
                                            const Forcing &forcing, int p_ix,
                                            int p_iy,
                                            const std::vector<double> &radii,
                                            double tau_const = 1e-3,
                                            double tau_hom = 1e-3);

}  // namespace membranes
