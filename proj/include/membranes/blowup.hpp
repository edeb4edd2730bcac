#pragma once

#include <string>
#include <vector>

#include "membranes/grid.hpp"
#include "membranes/profiles.hpp"

namespace membranes {

/// Rescaled stack T_{p,r}u on the unit-disk reference grid.
struct BlowupProfile {
  DomainPtr ref;
  MembraneStack stack;
  double px = 0.0, py = 0.0;
  double r = 1.0;
  double affine_correction = 0.0;  // magnitude of the subtracted affine part
  std::string source;
};

/// Unit-disk reference grid shared by all profiles.
DomainPtr reference_domain(int n_ref = 257);

class ContactMask;  // geometry module

/// Base node for a blow-up of a solved stack: full contact multiplicity,
/// within a band of the detected free boundary (width set by the eps_c
/// smearing, sqrt(2 eps_c)/h + 2 cells), minimising the measured affine
/// magnitude |u(p)|/h + |grad u(p)| at the node. The threshold-detected free
/// boundary sits O(sqrt(eps_c)) outside the true one; the affine score finds
/// the true contact boundary inside the band. Returns -1 without candidates.
int find_blowup_base(const MembraneStack &stack, const ContactMask &mask,
                     double near_x, double near_y);

/// T_{p,r}u_j(x) = u_j(p + r x) / r^2 interpolated onto the reference grid.
/// Requires the (scaled) reference disk inside the source domain, a
/// null-averaged stack, and a base node of full contact multiplicity for the
/// supplied threshold eps_c (< 0 selects the default). The affine part at the
/// origin is measured, gated against eps_grad = 10 h_ref, and subtracted.
BlowupProfile rescale(const MembraneStack &stack, const Forcing &forcing,
                      int p_ix, int p_iy, double r, int n_ref = 257,
                      double eps_c = -1.0);

/// Max over membranes, scales and reference nodes x (0.1 <= |x|, |lambda x|
/// <= 0.9) of |u(lambda x)/lambda^2 - u(x)|.
double homogeneity_defect(const BlowupProfile &profile,
                          const std::vector<double> &lambdas);

/// Fit of the half-space family u_j = 1/2 <A x,x> + a_j (x.e)_+^2
/// - b_j (x.e)_-^2 to a stack on a disk grid.
struct ClassificationResult {
  bool degenerate = false;  // all membranes equal; e carries no meaning
  double angle = 0.0;       // direction e as an angle
  double ex = 1.0, ey = 0.0;
  Sym2 A;
  std::vector<double> a, b;  // canonical gauge: sum b = 0
  std::vector<Sym2> H;       // per-membrane Hessian on {x.e < 0}
  std::vector<double> k;     // Hessian jump along e
  double misfit = 0.0;       // RMS residual relative to the stack scale
  std::vector<double> fb_offsets;  // fitted line offset per active pair
  std::vector<int> active_pairs;
  double alignment_defect = 0.0;   // max distance between per-pair lines
  std::string label = "none";
};

/// Angle search (1 degree grid + golden section) with per-membrane linear
/// least squares over {x^2, xy, y^2, (x.e)_+^2} at each candidate angle.
ClassificationResult classify_halfspace(const MembraneStack &stack);

/// Matches the fitted coefficients against the five closed-form categories
/// (free parameters resolved by least squares under the trace constraints).
/// Requires N = 3 and the canonical forcing (1, 0, -1); returns "none" when
/// every template misfit exceeds tau_cat. Updates result.label as well.
std::string classify_example46(ClassificationResult &result,
                               const Forcing &forcing, double tau_cat = 1e-2);

struct PairConnectedness {
  bool empty = false;       // no contact on the probe circle
  bool connected = false;   // contact contains an arc >= 4 * (2 pi / m)
  double longest_arc = 0.0;
  double total_arc = 0.0;
};

/// Contact-set connectedness on the circle of radius r_probe about the
/// origin of the profile, per pair.
std::vector<PairConnectedness> connectedness_check(const BlowupProfile &profile,
                                                   double r_probe,
                                                   double eps_c, int m = 720);

}  // namespace membranes
