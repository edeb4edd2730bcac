#pragma once

#include <cstdint>
#include <vector>

#include "membranes/grid.hpp"

namespace membranes {

/// Per-pair contact indicators: contact_j(x) = (u_j - u_{j+1} <= eps_c).
class ContactMask {
public:
  DomainPtr dom;
  int pairs = 0;
  double eps_c = 0.0;
  std::vector<std::uint8_t> mask;  // pairs * n * n

  bool contact(int pair, int ix, int iy) const {
    return mask[static_cast<std::size_t>(pair) * dom->node_count() +
                dom->idx(ix, iy)] != 0;
  }
};

/// Default contact threshold 10 h^2 max(1, max |f_j|).
double default_eps_c(const GridDomain &dom, const Forcing &forcing);

ContactMask contact_sets(const MembraneStack &stack, double eps_c);

/// Per-node contact multiplicity and per-pair free-boundary node sets
/// (nodes with at least one stencil neighbour of opposite contact state).
struct MultiplicityMap {
  DomainPtr dom;
  int pairs = 0;
  std::vector<std::uint8_t> multiplicity;       // n*n, 0..N-1
  std::vector<std::vector<int>> fb_nodes;       // per pair, node indices
  std::vector<std::uint8_t> fb_any;             // n*n, on some pair's FB
  std::vector<std::uint8_t> fb_all;             // n*n, on every pair's FB
};

MultiplicityMap free_boundary_nodes(const ContactMask &mask);

/// Node of full multiplicity lying on every pair's free boundary, closest to
/// `near` (grid coordinates); -1 when none exists.
int find_highest_multiplicity_node(const MultiplicityMap &map, double near_x,
                                   double near_y);

struct GrowthScan {
  double px = 0.0, py = 0.0;
  std::vector<double> radii;
  std::vector<std::vector<double>> sup;  // per pair, per radius
  std::vector<double> slope;             // per pair, log-log LSQ fit
  std::vector<double> c_upper;           // per pair, max sup/r^2
  std::vector<double> c_lower;           // per pair, min sup/r^2
  std::vector<bool> degenerate;          // all sups ~ 0
  std::vector<bool> flagged;             // nondegeneracy scan only
};

/// Sup of u_j - u_{j+1} over grid nodes in each ball B_r(p), log-log slope by
/// least squares and the growth constant C_upper (quadratic growth scan).
/// Throws when p is not a highest-multiplicity node of the supplied map.
GrowthScan quadratic_growth_scan(const MembraneStack &stack,
                                 const MultiplicityMap &map, int p_ix, int p_iy,
                                 const std::vector<double> &radii);

/// Reports c_lower = min_r sup/r^2 per pair, flagging pairs below the floor
/// c_min. Requires theta > 0 in the forcing (the (ND) gate).
GrowthScan nondegeneracy_scan(const MembraneStack &stack,
                              const MultiplicityMap &map, int p_ix, int p_iy,
                              const std::vector<double> &radii,
                              const Forcing &forcing, double c_min);

/// Max over interior nodes at distance >= margin from the domain boundary of
/// the largest |entry| of the discrete Hessian of every membrane.
double hessian_bound_report(const MembraneStack &stack, double margin);

struct CircleArc {
  double start = 0.0;   // angle of first sample in the arc
  double length = 0.0;  // angular length
};

struct CircleRestriction {
  double r = 0.0;
  int m = 0;
  std::vector<std::vector<double>> values;     // per membrane, m samples
  std::vector<std::vector<CircleArc>> arcs;    // per pair, components of
                                               // {u_j - u_{j+1} > eps_c}
};

/// Interpolated values of each membrane at m equispaced angles on the circle
/// of radius r about p, plus the positive arcs of each pairwise difference.
CircleRestriction circle_restriction(const MembraneStack &stack, double px,
                                     double py, double r, int m, double eps_c);

}  // namespace membranes
