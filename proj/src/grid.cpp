#include "membranes/grid.hpp"

#include <algorithm>
#include <cmath>

namespace membranes {

namespace {

// Distance from the origin-centred circle test: is the cell with corner
// indices (ix,iy)..(ix+1,iy+1) fully inside / fully outside the disk?
enum class CellState { Inside, Crossing, Outside };

CellState cell_state(int ix, int iy, double R, double h) {
  const double x0 = -R + ix * h, x1 = x0 + h;
  const double y0 = -R + iy * h, y1 = y0 + h;
  // farthest corner from origin
  const double fx = std::max(std::abs(x0), std::abs(x1));
  const double fy = std::max(std::abs(y0), std::abs(y1));
  const double tol = 1e-12 * R;
  if (fx * fx + fy * fy <= R * R + tol) return CellState::Inside;
  // closest point of the cell to the origin
  const double cx = std::clamp(0.0, x0, x1);
  const double cy = std::clamp(0.0, y0, y1);
  if (cx * cx + cy * cy >= R * R - tol) return CellState::Outside;
  return CellState::Crossing;
}

}  // namespace

DomainPtr build_domain(int n, double R, DomainShape shape) {
  if (n < 9) throw std::invalid_argument("build_domain: n must be >= 9");
  if (n % 2 == 0) throw std::invalid_argument("build_domain: n must be odd");
  if (!(R > 0.0)) throw std::invalid_argument("build_domain: R must be positive");

  auto dom = std::make_shared<GridDomain>();
  dom->n = n;
  dom->R = R;
  dom->h = 2.0 * R / (n - 1);
  dom->shape = shape;
  dom->origin_ix = dom->origin_iy = (n - 1) / 2;
  dom->cls.assign(static_cast<std::size_t>(n) * n, NodeClass::Exterior);

  if (shape == DomainShape::Square) {
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        dom->cls[dom->idx(ix, iy)] =
            (ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1)
                ? NodeClass::Boundary
                : NodeClass::Interior;
    return dom;
  }

  // Disk: classify cells first, then nodes from the cells they touch.
  const int nc = n - 1;
  std::vector<CellState> cells(static_cast<std::size_t>(nc) * nc);
  for (int iy = 0; iy < nc; ++iy)
    for (int ix = 0; ix < nc; ++ix)
      cells[static_cast<std::size_t>(iy) * nc + ix] =
          cell_state(ix, iy, R, dom->h);

  auto cell = [&](int cx, int cy) -> CellState {
    if (cx < 0 || cy < 0 || cx >= nc || cy >= nc) return CellState::Outside;
    return cells[static_cast<std::size_t>(cy) * nc + cx];
  };

  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      bool any_inside = false, any_crossing = false, all_inside = true;
      for (int dy = -1; dy <= 0; ++dy) {
        for (int dx = -1; dx <= 0; ++dx) {
          const CellState s = cell(ix + dx, iy + dy);
          any_inside |= (s == CellState::Inside);
          any_crossing |= (s == CellState::Crossing);
          all_inside &= (s == CellState::Inside);
        }
      }
      NodeClass c = NodeClass::Exterior;
      if (all_inside)
        c = NodeClass::Interior;
      else if (any_inside || any_crossing)
        c = NodeClass::Boundary;
      dom->cls[dom->idx(ix, iy)] = c;
    }
  }
  return dom;
}

ScalarField sample_field(const DomainPtr &dom,
                         const std::function<double(double, double)> &f) {
  ScalarField out(dom);
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix)
      if (dom->valued(ix, iy)) out.at(ix, iy) = f(dom->x(ix), dom->y(iy));
  return out;
}

Forcing::Forcing(std::vector<double> c, double th)
    : constants(std::move(c)), theta(th) {
  if (theta > 0.0) {
    for (std::size_t j = 0; j + 1 < constants.size(); ++j)
      if (constants[j] - constants[j + 1] < theta - 1e-12)
        throw std::invalid_argument(
            "Forcing: declared separation theta is violated by the constants");
  }
}

double Forcing::max_abs() const {
  double m = 0.0;
  for (double c : constants) m = std::max(m, std::abs(c));
  return m;
}

double BoundaryData::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dom->node_count(); ++i)
    if (dom->cls[i] == NodeClass::Boundary)
      for (const auto &gj : g) m = std::max(m, std::abs(gj[i]));
  return m;
}

void BoundaryData::validate_ordering() const {
  for (std::size_t i = 0; i < dom->node_count(); ++i) {
    if (dom->cls[i] != NodeClass::Boundary) continue;
    for (std::size_t j = 0; j + 1 < g.size(); ++j)
      if (g[j][i] < g[j + 1][i] - 1e-12)
        throw std::invalid_argument("BoundaryData: traces are not ordered");
  }
}

BoundaryData sample_boundary(
    const DomainPtr &dom,
    const std::vector<std::function<double(double, double)>> &traces) {
  BoundaryData bc(dom, static_cast<int>(traces.size()));
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix)
      if (dom->node_class(ix, iy) == NodeClass::Boundary)
        for (std::size_t j = 0; j < traces.size(); ++j)
          bc.g[j][dom->idx(ix, iy)] = traces[j](dom->x(ix), dom->y(iy));
  return bc;
}

double discrete_laplacian(const ScalarField &f, int ix, int iy) {
  const GridDomain &d = *f.dom;
  if (!d.interior(ix, iy))
    throw std::invalid_argument("discrete_laplacian: node is not interior");
  const double h2 = d.h * d.h;
  return (f.at(ix + 1, iy) + f.at(ix - 1, iy) + f.at(ix, iy + 1) +
          f.at(ix, iy - 1) - 4.0 * f.at(ix, iy)) /
         h2;
}

bool hessian_stencil_ok(const GridDomain &dom, int ix, int iy) {
  if (ix < 1 || iy < 1 || ix > dom.n - 2 || iy > dom.n - 2) return false;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (!dom.valued(ix + dx, iy + dy)) return false;
  return true;
}

std::array<double, 3> discrete_hessian(const ScalarField &f, int ix, int iy) {
  const GridDomain &d = *f.dom;
  if (!hessian_stencil_ok(d, ix, iy))
    throw std::invalid_argument("discrete_hessian: stencil leaves the domain");
  const double h2 = d.h * d.h;
  const double fxx =
      (f.at(ix + 1, iy) - 2.0 * f.at(ix, iy) + f.at(ix - 1, iy)) / h2;
  const double fyy =
      (f.at(ix, iy + 1) - 2.0 * f.at(ix, iy) + f.at(ix, iy - 1)) / h2;
  const double fxy = (f.at(ix + 1, iy + 1) - f.at(ix - 1, iy + 1) -
                      f.at(ix + 1, iy - 1) + f.at(ix - 1, iy - 1)) /
                     (4.0 * h2);
  return {fxx, fxy, fyy};
}

bool interpolation_ok(const GridDomain &dom, double px, double py) {
  const double s = (px + dom.R) / dom.h, t = (py + dom.R) / dom.h;
  int ix = static_cast<int>(std::floor(s)), iy = static_cast<int>(std::floor(t));
  ix = std::clamp(ix, 0, dom.n - 2);
  iy = std::clamp(iy, 0, dom.n - 2);
  if (px < -dom.R - 1e-12 || px > dom.R + 1e-12 || py < -dom.R - 1e-12 ||
      py > dom.R + 1e-12)
    return false;
  return dom.valued(ix, iy) && dom.valued(ix + 1, iy) &&
         dom.valued(ix, iy + 1) && dom.valued(ix + 1, iy + 1);
}

double interpolate(const ScalarField &f, double px, double py) {
  const GridDomain &d = *f.dom;
  const double s = (px + d.R) / d.h, t = (py + d.R) / d.h;
  int ix = static_cast<int>(std::floor(s)), iy = static_cast<int>(std::floor(t));
  ix = std::clamp(ix, 0, d.n - 2);
  iy = std::clamp(iy, 0, d.n - 2);
  if (!interpolation_ok(d, px, py))
    throw std::invalid_argument("interpolate: point outside the valued region");
  const double a = s - ix, b = t - iy;
  return (1.0 - a) * (1.0 - b) * f.at(ix, iy) + a * (1.0 - b) * f.at(ix + 1, iy) +
         (1.0 - a) * b * f.at(ix, iy + 1) + a * b * f.at(ix + 1, iy + 1);
}

MembraneStack normalize_average(const MembraneStack &stack) {
  MembraneStack out = stack;
  const std::size_t count = stack.dom->node_count();
  for (std::size_t i = 0; i < count; ++i) {
    if (stack.dom->cls[i] == NodeClass::Exterior) continue;
    double avg = 0.0;
    for (int j = 0; j < stack.N; ++j) avg += stack.u[j].v[i];
    avg /= stack.N;
    for (int j = 0; j < stack.N; ++j) out.u[j].v[i] -= avg;
  }
  return out;
}

double ordering_violation(const MembraneStack &stack) {
  double worst = 0.0;
  const std::size_t count = stack.dom->node_count();
  for (std::size_t i = 0; i < count; ++i) {
    if (stack.dom->cls[i] == NodeClass::Exterior) continue;
    for (int j = 0; j + 1 < stack.N; ++j)
      worst = std::max(worst, stack.u[j + 1].v[i] - stack.u[j].v[i]);
  }
  return worst;
}

double max_abs_value(const MembraneStack &stack) {
  double m = 0.0;
  const std::size_t count = stack.dom->node_count();
  for (std::size_t i = 0; i < count; ++i) {
    if (stack.dom->cls[i] == NodeClass::Exterior) continue;
    for (int j = 0; j < stack.N; ++j) m = std::max(m, std::abs(stack.u[j].v[i]));
  }
  return m;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1,1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

}  // namespace

double disk_cell_overlap(double cx, double cy, double r, double x0, double x1,
                         double y0, double y1) {
  // Shift so the disk is centred at the origin.
  x0 -= cx; x1 -= cx; y0 -= cy; y1 -= cy;
  x0 = std::clamp(x0, -r, r);
  x1 = std::clamp(x1, -r, r);
  if (x1 <= x0) return 0.0;

  // Break abscissas where the clipped section changes branch.
  std::vector<double> brk = {x0, x1};
  auto push = [&](double v) {
    if (v > x0 && v < x1) brk.push_back(v);
  };
  for (double yb : {y0, y1}) {
    if (std::abs(yb) < r) {
      const double xb = std::sqrt(r * r - yb * yb);
      push(xb);
      push(-xb);
    }
  }
  std::sort(brk.begin(), brk.end());

  // antiderivative of sqrt(r^2 - x^2)
  auto G = [&](double x) {
    x = std::clamp(x, -r, r);
    return 0.5 * (x * std::sqrt(std::max(0.0, r * r - x * x)) +
                  r * r * std::asin(x / r));
  };

  double area = 0.0;
  for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
    const double a = brk[k], b = brk[k + 1];
    if (b - a < 1e-300) continue;
    const double xm = 0.5 * (a + b);
    const double c = std::sqrt(std::max(0.0, r * r - xm * xm));
    const double top = std::min(y1, c), bot = std::max(y0, -c);
    if (top <= bot) continue;  // branch pattern is constant on the piece
    double piece = 0.0;
    piece += (y1 < c) ? y1 * (b - a) : G(b) - G(a);
    piece -= (y0 > -c) ? y0 * (b - a) : -(G(b) - G(a));
    area += piece;
  }
  return area;
}

}  // namespace membranes
