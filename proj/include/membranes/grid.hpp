#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace membranes {

enum class NodeClass : std::uint8_t { Interior, Boundary, Exterior };
enum class DomainShape : std::uint8_t { Disk, Square };

/// Uniform square grid over [-R,R]^2 with an optional disk mask.
///
/// For the disk shape, nodes belonging to a cell that is fully inside the
/// disk of radius R are Interior; nodes touching a cell crossed by the
/// circle are Boundary (they carry Dirichlet data even if they sit slightly
/// outside the circle, so every cell that overlaps the disk has four valued
/// corners); the rest are Exterior.
class GridDomain {
public:
  int n = 0;              // nodes per side, odd
  double R = 0.0;         // half side length / disk radius
  double h = 0.0;         // mesh width, 2R/(n-1)
  DomainShape shape = DomainShape::Disk;
  std::vector<NodeClass> cls;  // n*n, row-major (iy*n+ix)
  int origin_ix = 0, origin_iy = 0;

  int idx(int ix, int iy) const { return iy * n + ix; }
  double x(int ix) const { return -R + ix * h; }
  double y(int iy) const { return -R + iy * h; }
  NodeClass node_class(int ix, int iy) const { return cls[idx(ix, iy)]; }
  bool valued(int ix, int iy) const {
    return cls[idx(ix, iy)] != NodeClass::Exterior;
  }
  bool interior(int ix, int iy) const {
    return cls[idx(ix, iy)] == NodeClass::Interior;
  }
  std::size_t node_count() const { return cls.size(); }
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr build_domain(int n, double R, DomainShape shape = DomainShape::Disk);

/// One scalar field sampled at the nodes of a domain. Values at Exterior
/// nodes carry no meaning and are kept at zero.
struct ScalarField {
  DomainPtr dom;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(DomainPtr d) : dom(std::move(d)), v(dom->node_count(), 0.0) {}

  double &at(int ix, int iy) { return v[dom->idx(ix, iy)]; }
  double at(int ix, int iy) const { return v[dom->idx(ix, iy)]; }
};

/// Samples an analytic function at every non-exterior node.
ScalarField sample_field(const DomainPtr &dom,
                         const std::function<double(double, double)> &f);

/// N ordered scalar fields on a shared domain, u_1 >= ... >= u_N.
struct MembraneStack {
  DomainPtr dom;
  int N = 0;
  std::vector<ScalarField> u;

  MembraneStack() = default;
  MembraneStack(DomainPtr d, int count)
      : dom(std::move(d)), N(count), u(count, ScalarField(dom)) {
    for (auto &f : u) f = ScalarField(dom);
  }
};

/// Constant forcing terms f_1..f_N with the declared separation theta of
/// (ND). Optional per-node fields are honoured by the solver only.
struct Forcing {
  std::vector<double> constants;
  double theta = 0.0;
  std::vector<std::vector<double>> per_node;  // empty or N fields of n*n values

  Forcing() = default;
  Forcing(std::vector<double> c, double th = 0.0);

  int N() const { return static_cast<int>(constants.size()); }
  double max_abs() const;
  bool has_fields() const { return !per_node.empty(); }
  double value(int j, int node) const {
    return has_fields() ? per_node[j][node] : constants[j];
  }
};

/// Dirichlet data for all membranes, meaningful at Boundary nodes.
struct BoundaryData {
  DomainPtr dom;
  std::vector<std::vector<double>> g;  // N fields

  BoundaryData() = default;
  BoundaryData(DomainPtr d, int N)
      : dom(std::move(d)), g(N, std::vector<double>(dom->node_count(), 0.0)) {}

  int N() const { return static_cast<int>(g.size()); }
  double max_abs() const;
  void validate_ordering() const;  // throws if g_j < g_{j+1} at a boundary node
};

/// Samples N analytic traces into boundary data.
BoundaryData sample_boundary(
    const DomainPtr &dom,
    const std::vector<std::function<double(double, double)>> &traces);

// ---- stencil operators -----------------------------------------------------

/// 5-point Laplacian at an interior node. Throws on non-interior nodes.
double discrete_laplacian(const ScalarField &f, int ix, int iy);

/// Symmetric 2x2 Hessian {fxx, fxy, fyy} by central differences; the cross
/// term uses the 4-point diagonal stencil. Requires a valued 8-neighbourhood.
std::array<double, 3> discrete_hessian(const ScalarField &f, int ix, int iy);

/// True when the full 3x3 neighbourhood of (ix,iy) is valued.
bool hessian_stencil_ok(const GridDomain &dom, int ix, int iy);

/// Bilinear interpolation on the containing cell; all four cell corners must
/// be valued.
double interpolate(const ScalarField &f, double px, double py);

bool interpolation_ok(const GridDomain &dom, double px, double py);

/// Subtracts the pointwise membrane average from each field, enforcing the
/// null-average normalisation. Pairwise differences are unchanged.
MembraneStack normalize_average(const MembraneStack &stack);

/// Largest ordering violation max_j max_x (u_{j+1} - u_j); <= 0 when feasible.
double ordering_violation(const MembraneStack &stack);

double max_abs_value(const MembraneStack &stack);

/// Exact area of the intersection of the disk |x-c| <= r with an axis-aligned
/// cell [x0,x1]x[y0,y1] (piecewise analytic 1-D integral, Gauss-Legendre on
/// smooth pieces).
double disk_cell_overlap(double cx, double cy, double r, double x0, double x1,
                         double y0, double y1);

}  // namespace membranes
