#pragma once

#include <array>
#include <string>
#include <vector>

#include "membranes/grid.hpp"

namespace membranes {

/// Symmetric 2x2 matrix stored as {xx, xy, yy}.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  double trace() const { return xx + yy; }
  std::array<double, 2> mul(double x, double y) const {
    return {xx * x + xy * y, xy * x + yy * y};
  }
  double quad(double x, double y) const {
    return xx * x * x + 2.0 * xy * x * y + yy * y * y;
  }
  double frob2() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
};

inline Sym2 operator+(Sym2 a, const Sym2 &b) {
  return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
inline Sym2 operator-(Sym2 a, const Sym2 &b) {
  return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}
inline Sym2 operator*(double s, const Sym2 &a) {
  return {s * a.xx, s * a.xy, s * a.yy};
}

/// Outer product e e^T for a direction (ex, ey).
inline Sym2 outer(double ex, double ey) {
  return {ex * ex, ex * ey, ey * ey};
}

/// Degree-2 homogeneous membrane family written piecewise against the line
/// {x.e = 0}:  u_j(x) = 1/2 <H_j x, x> + k_j (x.e)_+^2.
/// H_j is the Hessian on the side {x.e < 0}; k_j is the Hessian jump along e.
/// Every closed-form category and every half-space profile has this form.
struct AnalyticStack {
  int N = 0;
  double ex = 1.0, ey = 0.0;
  std::vector<Sym2> H;
  std::vector<double> k;

  double value(int j, double x, double y) const;
  std::array<double, 2> gradient(int j, double x, double y) const;
  /// Laplacian of u_j at (x,y); side resolved by sign of x.e.
  double laplacian(int j, double x, double y) const;

  /// Largest ordering violation of u_j >= u_{j+1} over sample points on the
  /// unit disk; <= 0 for a valid stack.
  double ordering_violation_sampled(int samples = 2048) const;
};

/// Samples the stack at every non-exterior node of a grid.
MembraneStack sample_stack(const AnalyticStack &as, const DomainPtr &dom);

// ---- planar half-space family -----------------------------------------------

/// u_j(x) = P(x) + a_j (x.e)_+^2 - b_j (x.e)_-^2 with P = 1/2 <A x, x>,
/// a non-increasing and b non-decreasing.
struct HalfSpaceProfile {
  double ex = 1.0, ey = 0.0;
  Sym2 A;
  std::vector<double> a, b;

  int N() const { return static_cast<int>(a.size()); }
};

/// Validates ordering of (a, b) and, when require_null_average is set, the
/// compatibility relation sum(a) + sum(b) = 0, A = (2 sum(b)/N) e e^T that
/// makes the sampled stack null-averaged. Throws on violation.
AnalyticStack halfspace_profile_stack(const HalfSpaceProfile &p,
                                      bool require_null_average = true);

MembraneStack halfspace_stack(const HalfSpaceProfile &p, const DomainPtr &dom,
                              bool require_null_average = true);

// ---- closed-form categories (N = 3, forcing (1, 0, -1)) ---------------------

enum class Category { I, II, III, IV, V };

Category category_from_string(const std::string &s);
std::string to_string(Category c);

/// Closed forms of the five categories. e is given by its angle; categories
/// iii/iv take a free symmetric A with tr A = 1 (default identity/2), and
/// category v takes three matrices with traces (1, 0, -1) summing to zero
/// (default (I/2, 0, -I/2)). Throws on trace or ordering violations.
AnalyticStack example46_profile(Category c, double e_angle = 0.0,
                                const std::vector<Sym2> &A_params = {});

MembraneStack example46_stack(Category c, const DomainPtr &dom,
                              double e_angle = 0.0,
                              const std::vector<Sym2> &A_params = {});

/// Canonical forcing of the example.
Forcing example46_forcing(double theta = 1.0);

/// Weiss-type energy W({u_j}, 0, 1) of an analytic stack by grid-free polar
/// quadrature (Gauss-Legendre in angle with sector splitting at the kink).
double weiss_closed_form(const AnalyticStack &as,
                         const std::vector<double> &forcing);

/// Convenience wrapper for the five categories with canonical forcing.
double weiss_of_category(Category c, double e_angle = 0.0,
                         const std::vector<Sym2> &A_params = {});

// ---- cone solutions ---------------------------------------------------------

/// Step data for g on [0, alpha]: g = sigma[j] on (alpha[j], alpha[j+1]],
/// breakpoints 0 = alpha_0 < ... < alpha_s = alpha <= pi.
struct ConeProfile {
  std::vector<double> breakpoints;  // s+1 values, first 0, last alpha
  std::vector<double> sigma;        // s values, non-negative

  int steps() const { return static_cast<int>(sigma.size()); }
  double alpha() const { return breakpoints.back(); }
  void validate() const;  // throws on alpha > pi, bad monotonicity, negatives
};

/// v(x) = sigma_0/2 (x.e_0)_+^2 + sum (sigma_j - sigma_{j-1})/2 (x.e_j)_+^2,
/// e_j the unit vector at angle alpha_j + pi/2.
double cone_solution_value(const ConeProfile &p, double x, double y);
std::array<double, 2> cone_solution_gradient(const ConeProfile &p, double x,
                                             double y);
/// Exact Laplacian from the piecewise-quadratic pieces.
double cone_solution_laplacian(const ConeProfile &p, double x, double y);
/// Exact Hessian at (x,y).
Sym2 cone_solution_hessian(const ConeProfile &p, double x, double y);

ScalarField cone_solution_field(const ConeProfile &p, const DomainPtr &dom);

}  // namespace membranes
