#include "membranes/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace membranes {

namespace {
constexpr double kPi = std::numbers::pi;

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

double AnalyticStack::value(int j, double x, double y) const {
  const double s = x * ex + y * ey;
  const double sp = std::max(s, 0.0);
  return 0.5 * H[j].quad(x, y) + k[j] * sp * sp;
}

std::array<double, 2> AnalyticStack::gradient(int j, double x, double y) const {
  const double s = x * ex + y * ey;
  const double sp = std::max(s, 0.0);
  auto g = H[j].mul(x, y);
  g[0] += 2.0 * k[j] * sp * ex;
  g[1] += 2.0 * k[j] * sp * ey;
  return g;
}

double AnalyticStack::laplacian(int j, double x, double y) const {
  const double s = x * ex + y * ey;
  return H[j].trace() + (s > 0.0 ? 2.0 * k[j] : 0.0);
}

double AnalyticStack::ordering_violation_sampled(int samples) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double th = 2.0 * kPi * i / samples;
    const double x = std::cos(th), y = std::sin(th);
    for (int j = 0; j + 1 < N; ++j)
      worst = std::max(worst, value(j + 1, x, y) - value(j, x, y));
  }
  return worst;
}

MembraneStack sample_stack(const AnalyticStack &as, const DomainPtr &dom) {
  MembraneStack st(dom, as.N);
  for (int iy = 0; iy < dom->n; ++iy)
    for (int ix = 0; ix < dom->n; ++ix)
      if (dom->valued(ix, iy))
        for (int j = 0; j < as.N; ++j)
          st.u[j].at(ix, iy) = as.value(j, dom->x(ix), dom->y(iy));
  return st;
}

AnalyticStack halfspace_profile_stack(const HalfSpaceProfile &p,
                                      bool require_null_average) {
  const int N = p.N();
  if (N < 2 || static_cast<int>(p.b.size()) != N)
    throw std::invalid_argument("halfspace profile: need N >= 2 coefficients");
  for (int j = 0; j + 1 < N; ++j) {
    if (p.a[j] < p.a[j + 1] - 1e-12)
      throw std::invalid_argument("halfspace profile: a must be non-increasing");
    if (p.b[j] > p.b[j + 1] + 1e-12)
      throw std::invalid_argument("halfspace profile: b must be non-decreasing");
  }
  const double norm = std::hypot(p.ex, p.ey);
  const double ex = p.ex / norm, ey = p.ey / norm;
  if (require_null_average) {
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j < N; ++j) {
      sa += p.a[j];
      sb += p.b[j];
    }
    const Sym2 expect = (2.0 * sb / N) * outer(ex, ey);
    const Sym2 d = p.A - expect;
    if (std::abs(sa + sb) > 1e-10 || std::sqrt(d.frob2()) > 1e-10)
      throw std::invalid_argument(
          "halfspace profile: (A, a, b) violate the null-average compatibility");
  }
  AnalyticStack as;
  as.N = N;
  as.ex = ex;
  as.ey = ey;
  const Sym2 E = outer(ex, ey);
  for (int j = 0; j < N; ++j) {
    as.H.push_back(p.A - (2.0 * p.b[j]) * E);
    as.k.push_back(p.a[j] + p.b[j]);
  }
  return as;
}

MembraneStack halfspace_stack(const HalfSpaceProfile &p, const DomainPtr &dom,
                              bool require_null_average) {
  return sample_stack(halfspace_profile_stack(p, require_null_average), dom);
}

Category category_from_string(const std::string &s) {
  if (s == "i") return Category::I;
  if (s == "ii") return Category::II;
  if (s == "iii") return Category::III;
  if (s == "iv") return Category::IV;
  if (s == "v") return Category::V;
  throw std::invalid_argument("unknown category '" + s + "'");
}

std::string to_string(Category c) {
  switch (c) {
    case Category::I: return "i";
    case Category::II: return "ii";
    case Category::III: return "iii";
    case Category::IV: return "iv";
    case Category::V: return "v";
  }
  return "?";
}

AnalyticStack example46_profile(Category c, double e_angle,
                                const std::vector<Sym2> &A_params) {
  AnalyticStack as;
  as.N = 3;
  as.ex = std::cos(e_angle);
  as.ey = std::sin(e_angle);
  const Sym2 E = outer(as.ex, as.ey);
  const Sym2 Z{};
  const Sym2 halfI{0.5, 0.0, 0.5};

  auto one_A = [&](const Sym2 &fallback, double trace) {
    Sym2 A = A_params.empty() ? fallback : A_params.front();
    if (std::abs(A.trace() - trace) > 1e-10)
      throw std::invalid_argument("example46: tr(A) must be " +
                                  std::to_string(trace));
    return A;
  };

  switch (c) {
    case Category::I:
      as.H = {Z, Z, Z};
      as.k = {0.5, 0.0, -0.5};
      break;
    case Category::II:
      as.H = {0.5 * E, 0.5 * E, -1.0 * E};
      as.k = {0.25, -0.5, 0.25};
      break;
    case Category::III: {
      const Sym2 A = one_A(halfI, 1.0);
      as.H = {0.5 * A, 0.5 * A, -1.0 * A};
      as.k = {0.25, -0.25, 0.0};
      break;
    }
    case Category::IV: {
      const Sym2 A = one_A(halfI, 1.0);
      as.H = {A, -0.5 * A, -0.5 * A};
      as.k = {0.0, 0.25, -0.25};
      break;
    }
    case Category::V: {
      std::vector<Sym2> A = A_params;
      if (A.empty()) A = {halfI, Z, -1.0 * halfI};
      if (A.size() != 3)
        throw std::invalid_argument("example46 category v: need three matrices");
      const double tr[3] = {1.0, 0.0, -1.0};
      Sym2 sum{};
      for (int j = 0; j < 3; ++j) {
        if (std::abs(A[j].trace() - tr[j]) > 1e-10)
          throw std::invalid_argument("example46 category v: bad trace");
        sum = sum + A[j];
      }
      if (std::sqrt(sum.frob2()) > 1e-10)
        throw std::invalid_argument(
            "example46 category v: matrices must sum to zero (null average)");
      as.H = A;
      as.k = {0.0, 0.0, 0.0};
      break;
    }
  }
  if (as.ordering_violation_sampled() > 1e-12)
    throw std::invalid_argument("example46: parameters violate the ordering");
  return as;
}

MembraneStack example46_stack(Category c, const DomainPtr &dom, double e_angle,
                              const std::vector<Sym2> &A_params) {
  return sample_stack(example46_profile(c, e_angle, A_params), dom);
}

Forcing example46_forcing(double theta) {
  return Forcing({1.0, 0.0, -1.0}, theta);
}

double weiss_closed_form(const AnalyticStack &as,
                         const std::vector<double> &forcing) {
  if (static_cast<int>(forcing.size()) != as.N)
    throw std::invalid_argument("weiss_closed_form: forcing size mismatch");
  // W(0,1) = 1/4 int_{S1} sum(|grad u|^2 + 2 f u) dw  -  2 int_{S1} sum u^2 dw,
  // using 2-homogeneity to integrate the radius analytically.
  const double base = std::atan2(as.ey, as.ex);
  // kink angles of (x.e)_+: base +- pi/2
  std::vector<double> cuts = {base - 0.5 * kPi, base + 0.5 * kPi,
                              base + 1.5 * kPi};
  double bulk = 0.0, bdry = 0.0;
  for (int sec = 0; sec < 2; ++sec) {
    const double lo = cuts[sec], hi = cuts[sec + 1];
    const int panels = 8;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double a = lo + (hi - lo) * pnl / panels;
      const double b = lo + (hi - lo) * (pnl + 1) / panels;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int q = 0; q < kGL; ++q) {
        const double th = mid + half * kGLx[q];
        const double w = half * kGLw[q];
        const double x = std::cos(th), y = std::sin(th);
        double gsum = 0.0, usq = 0.0;
        for (int j = 0; j < as.N; ++j) {
          const double u = as.value(j, x, y);
          const auto g = as.gradient(j, x, y);
          gsum += g[0] * g[0] + g[1] * g[1] + 2.0 * forcing[j] * u;
          usq += u * u;
        }
        bulk += w * gsum;
        bdry += w * usq;
      }
    }
  }
  return 0.25 * bulk - 2.0 * bdry;
}

double weiss_of_category(Category c, double e_angle,
                         const std::vector<Sym2> &A_params) {
  const AnalyticStack as = example46_profile(c, e_angle, A_params);
  return weiss_closed_form(as, {1.0, 0.0, -1.0});
}

void ConeProfile::validate() const {
  if (sigma.empty() || breakpoints.size() != sigma.size() + 1)
    throw std::invalid_argument("cone profile: inconsistent step data");
  if (std::abs(breakpoints.front()) > 1e-15)
    throw std::invalid_argument("cone profile: breakpoints must start at 0");
  if (breakpoints.back() > kPi + 1e-12)
    throw std::invalid_argument("cone profile: alpha must not exceed pi");
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
    if (breakpoints[j + 1] <= breakpoints[j])
      throw std::invalid_argument("cone profile: breakpoints must increase");
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    if (sigma[j] < 0.0)
      throw std::invalid_argument("cone profile: sigma must be non-negative");
  }
}

namespace {

// Accumulates the quadratic pieces of the cone-solution formula.
template <typename F>
void cone_terms(const ConeProfile &p, F &&emit) {
  // coefficient sigma_0/2 on e_0, (sigma_j - sigma_{j-1})/2 on e_j
  for (int j = 0; j < p.steps(); ++j) {
    const double coeff =
        (j == 0) ? 0.5 * p.sigma[0] : 0.5 * (p.sigma[j] - p.sigma[j - 1]);
    if (coeff == 0.0) continue;
    const double ang = p.breakpoints[j] + 0.5 * kPi;
    emit(coeff, std::cos(ang), std::sin(ang));
  }
}

}  // namespace

double cone_solution_value(const ConeProfile &p, double x, double y) {
  p.validate();
  double v = 0.0;
  cone_terms(p, [&](double c, double ex, double ey) {
    const double s = std::max(x * ex + y * ey, 0.0);
    v += c * s * s;
  });
  return v;
}

std::array<double, 2> cone_solution_gradient(const ConeProfile &p, double x,
                                             double y) {
  p.validate();
  std::array<double, 2> g{0.0, 0.0};
  cone_terms(p, [&](double c, double ex, double ey) {
    const double s = std::max(x * ex + y * ey, 0.0);
    g[0] += 2.0 * c * s * ex;
    g[1] += 2.0 * c * s * ey;
  });
  return g;
}

double cone_solution_laplacian(const ConeProfile &p, double x, double y) {
  p.validate();
  double lap = 0.0;
  cone_terms(p, [&](double c, double ex, double ey) {
    if (x * ex + y * ey > 0.0) lap += 2.0 * c;
  });
  return lap;
}

Sym2 cone_solution_hessian(const ConeProfile &p, double x, double y) {
  p.validate();
  Sym2 hs{};
  cone_terms(p, [&](double c, double ex, double ey) {
    if (x * ex + y * ey > 0.0) hs = hs + (2.0 * c) * outer(ex, ey);
  });
  return hs;
}

ScalarField cone_solution_field(const ConeProfile &p, const DomainPtr &dom) {
  p.validate();
  return sample_field(
      dom, [&](double x, double y) { return cone_solution_value(p, x, y); });
}

}  // namespace membranes
