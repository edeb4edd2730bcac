#include "membranes/blowup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "membranes/geometry.hpp"

namespace membranes {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;
}  // namespace

DomainPtr reference_domain(int n_ref) {
  static std::map<int, DomainPtr> cache;
  auto it = cache.find(n_ref);
  if (it != cache.end()) return it->second;
  DomainPtr dom = build_domain(n_ref, 1.0, DomainShape::Disk);
  cache[n_ref] = dom;
  return dom;
}

namespace {

// Interpolates with the sample point clamped into the open domain, so the
// reference rim nodes sitting just outside the unit circle stay evaluable.
// Points that coincide with a valued source node use the node value directly.
double clamped_sample(const ScalarField &f, double X, double Y) {
  const GridDomain &d = *f.dom;
  if (interpolation_ok(d, X, Y)) return interpolate(f, X, Y);
  const int ix = static_cast<int>(std::lround((X + d.R) / d.h));
  const int iy = static_cast<int>(std::lround((Y + d.R) / d.h));
  if (ix >= 0 && iy >= 0 && ix < d.n && iy < d.n &&
      std::abs(d.x(ix) - X) < 1e-9 * d.h && std::abs(d.y(iy) - Y) < 1e-9 * d.h &&
      d.valued(ix, iy))
    return f.at(ix, iy);
  if (d.shape == DomainShape::Disk) {
    const double rad = std::hypot(X, Y);
    if (rad > d.R) {
      const double t = d.R * (1.0 - 1e-12) / rad;
      X *= t;
      Y *= t;
    }
  } else {
    X = std::clamp(X, -d.R * (1.0 - 1e-12), d.R * (1.0 - 1e-12));
    Y = std::clamp(Y, -d.R * (1.0 - 1e-12), d.R * (1.0 - 1e-12));
  }
  return interpolate(f, X, Y);
}

}  // namespace

int find_blowup_base(const MembraneStack &stack, const ContactMask &mask,
                     double near_x, double near_y) {
  const GridDomain &d = *mask.dom;
  const MultiplicityMap map = free_boundary_nodes(mask);
  const int band =
      static_cast<int>(std::ceil(std::sqrt(2.0 * mask.eps_c) / d.h)) + 2;
  std::vector<std::uint8_t> near_fb(d.node_count(), 0);
  for (int iy = 0; iy < d.n; ++iy)
    for (int ix = 0; ix < d.n; ++ix) {
      if (!map.fb_any[d.idx(ix, iy)]) continue;
      for (int dy = -band; dy <= band; ++dy)
        for (int dx = -band; dx <= band; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx >= 0 && jy >= 0 && jx < d.n && jy < d.n)
            near_fb[d.idx(jx, jy)] = 1;
        }
    }
  // a node on the true contact boundary has, for every pair, a stencil
  // neighbour whose difference has grown to the h^2 curvature scale; nodes
  // deeper inside the exact contact set fail this and are skipped
  const double grow = 0.05 * d.h * d.h;
  int best = -1;
  double best_score = 0.0;
  for (int iy = 2; iy + 2 < d.n; ++iy) {
    for (int ix = 2; ix + 2 < d.n; ++ix) {
      const int i = d.idx(ix, iy);
      if (!near_fb[i] || map.multiplicity[i] != map.pairs) continue;
      bool stencil = true;
      for (int t = -2; t <= 2 && stencil; ++t)
        stencil = d.valued(ix + t, iy) && d.valued(ix, iy + t);
      if (!stencil) continue;
      bool grows = true;
      double growth = 0.0;
      for (int p = 0; p + 1 < stack.N && grows; ++p) {
        double nb = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int jx = ix + dx, jy = iy + dy;
            nb = std::max(nb, stack.u[p].at(jx, jy) -
                                  stack.u[p + 1].at(jx, jy));
          }
        grows = nb >= grow;
        growth += nb;
      }
      if (!grows) continue;
      double score = 0.0;
      for (int j = 0; j < stack.N; ++j) {
        const ScalarField &u = stack.u[j];
        const double gx = 2.0 * (u.at(ix + 1, iy) - u.at(ix - 1, iy)) /
                              (2.0 * d.h) -
                          (u.at(ix + 2, iy) - u.at(ix - 2, iy)) / (4.0 * d.h);
        const double gy = 2.0 * (u.at(ix, iy + 1) - u.at(ix, iy - 1)) /
                              (2.0 * d.h) -
                          (u.at(ix, iy + 2) - u.at(ix, iy - 2)) / (4.0 * d.h);
        score = std::max(score,
                         std::abs(u.at(ix, iy)) / d.h + std::hypot(gx, gy));
      }
      // among equally flat candidates prefer the one with the strongest
      // separation nearby (outermost exact-contact node), then proximity
      score -= 1e-3 * d.h * std::min(growth / (d.h * d.h), 4.0);
      score += 1e-9 * std::hypot(d.x(ix) - near_x, d.y(iy) - near_y);
      if (best < 0 || score < best_score) {
        best = i;
        best_score = score;
      }
    }
  }
  return best;
}

BlowupProfile rescale(const MembraneStack &stack, const Forcing &forcing,
                      int p_ix, int p_iy, double r, int n_ref, double eps_c) {
  const GridDomain &src = *stack.dom;
  const double px = src.x(p_ix), py = src.y(p_iy);
  if (!(r > 0.0)) throw std::invalid_argument("rescale: r must be positive");
  if (src.shape == DomainShape::Disk) {
    if (std::hypot(px, py) + r > src.R + 1e-9)
      throw std::invalid_argument("rescale: ball leaves the domain");
  } else {
    if (std::max(std::abs(px), std::abs(py)) + r > src.R + 1e-9)
      throw std::invalid_argument("rescale: ball leaves the domain");
  }

  const double scale = std::max(1.0, max_abs_value(stack));
  double na = 0.0;
  for (std::size_t i = 0; i < src.node_count(); ++i) {
    if (src.cls[i] == NodeClass::Exterior) continue;
    double s = 0.0;
    for (int j = 0; j < stack.N; ++j) s += stack.u[j].v[i];
    na = std::max(na, std::abs(s));
  }
  if (na > 1e-6 * scale)
    throw std::invalid_argument("rescale: stack is not null-averaged");

  const double ec = eps_c > 0.0 ? eps_c : default_eps_c(src, forcing);
  const ContactMask cm = contact_sets(stack, ec);
  for (int p = 0; p + 1 < stack.N; ++p)
    if (!cm.contact(p, p_ix, p_iy))
      throw std::invalid_argument(
          "rescale: base point lacks full contact multiplicity");

  BlowupProfile out;
  out.ref = reference_domain(n_ref);
  out.px = px;
  out.py = py;
  out.r = r;
  out.stack = MembraneStack(out.ref, stack.N);
  const GridDomain &ref = *out.ref;
  const double r2 = r * r;
  for (int iy = 0; iy < ref.n; ++iy) {
    for (int ix = 0; ix < ref.n; ++ix) {
      if (!ref.valued(ix, iy)) continue;
      const double X = px + r * ref.x(ix), Y = py + r * ref.y(iy);
      for (int j = 0; j < stack.N; ++j)
        out.stack.u[j].at(ix, iy) = clamped_sample(stack.u[j], X, Y) / r2;
    }
  }

  // measure, gate and remove the affine part at the base point; the
  // Richardson combination 2 D(h) - D(2h) of central differences cancels
  // the O(h) artifact a kink profile k (x.e)_+^2 leaves in a plain central
  // difference. Exact source node values are preferred over interpolated
  // reference samples so the cancellation is not spoiled by interpolation.
  const double eps_grad = 10.0 * ref.h;
  auto src_ok = [&](int dx, int dy) {
    const int ix = p_ix + dx, iy = p_iy + dy;
    return ix >= 0 && iy >= 0 && ix < src.n && iy < src.n && src.valued(ix, iy);
  };
  const bool use_src = src_ok(-2, 0) && src_ok(2, 0) && src_ok(0, -2) &&
                       src_ok(0, 2) && src_ok(0, 0);
  const int c = ref.origin_ix;
  for (int j = 0; j < stack.N; ++j) {
    ScalarField &u = out.stack.u[j];
    double v0, gx, gy;
    if (use_src) {
      const ScalarField &us = stack.u[j];
      auto rich = [&](int dx, int dy) {
        const double d1 = (us.at(p_ix + dx, p_iy + dy) -
                           us.at(p_ix - dx, p_iy - dy)) /
                          (2.0 * src.h);
        const double d2 = (us.at(p_ix + 2 * dx, p_iy + 2 * dy) -
                           us.at(p_ix - 2 * dx, p_iy - 2 * dy)) /
                          (4.0 * src.h);
        return 2.0 * d1 - d2;
      };
      v0 = us.at(p_ix, p_iy) / r2;
      gx = rich(1, 0) / r;
      gy = rich(0, 1) / r;
    } else {
      auto rich = [&](int dx, int dy) {
        const double d1 =
            (u.at(c + dx, c + dy) - u.at(c - dx, c - dy)) / (2.0 * ref.h);
        const double d2 =
            (u.at(c + 2 * dx, c + 2 * dy) - u.at(c - 2 * dx, c - 2 * dy)) /
            (4.0 * ref.h);
        return 2.0 * d1 - d2;
      };
      v0 = u.at(c, c);
      gx = rich(1, 0);
      gy = rich(0, 1);
    }
    const double mag = std::hypot(gx, gy);
    if (std::abs(v0) > eps_grad || mag > eps_grad)
      throw std::invalid_argument(
          "rescale: residual affine part at the origin exceeds the gate");
    out.affine_correction =
        std::max(out.affine_correction, std::abs(v0) + mag);
    for (int iy = 0; iy < ref.n; ++iy)
      for (int ix = 0; ix < ref.n; ++ix)
        if (ref.valued(ix, iy))
          u.at(ix, iy) -= v0 + gx * ref.x(ix) + gy * ref.y(iy);
  }
  return out;
}

double homogeneity_defect(const BlowupProfile &profile,
                          const std::vector<double> &lambdas) {
  const GridDomain &ref = *profile.ref;
  for (double l : lambdas)
    if (!(l > 0.0 && l <= 1.0))
      throw std::invalid_argument("homogeneity_defect: lambdas must be in (0,1]");
  double defect = 0.0;
  for (int iy = 0; iy < ref.n; ++iy) {
    for (int ix = 0; ix < ref.n; ++ix) {
      if (!ref.valued(ix, iy)) continue;
      const double X = ref.x(ix), Y = ref.y(iy);
      const double rad = std::hypot(X, Y);
      if (rad < 0.1 || rad > 0.9) continue;
      for (double l : lambdas) {
        if (l * rad < 0.1) continue;
        for (int j = 0; j < profile.stack.N; ++j) {
          const double scaled =
              interpolate(profile.stack.u[j], l * X, l * Y) / (l * l);
          defect = std::max(
              defect, std::abs(scaled - profile.stack.u[j].at(ix, iy)));
        }
      }
    }
  }
  return defect;
}

namespace {

struct FitSamples {
  std::vector<double> x, y;
  std::vector<std::vector<double>> u;  // per membrane
  double scale = 0.0;                  // RMS of all values
};

FitSamples gather_samples(const MembraneStack &stack) {
  const GridDomain &d = *stack.dom;
  FitSamples s;
  s.u.resize(stack.N);
  double ss = 0.0;
  std::size_t count = 0;
  for (int iy = 0; iy < d.n; ++iy) {
    for (int ix = 0; ix < d.n; ++ix) {
      if (!d.valued(ix, iy)) continue;
      s.x.push_back(d.x(ix));
      s.y.push_back(d.y(iy));
      const int i = d.idx(ix, iy);
      for (int j = 0; j < stack.N; ++j) {
        s.u[j].push_back(stack.u[j].v[i]);
        ss += stack.u[j].v[i] * stack.u[j].v[i];
        ++count;
      }
    }
  }
  s.scale = count ? std::sqrt(ss / count) : 0.0;
  return s;
}

void solve4(double G[4][4], double rhs[4]) {
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(G[perm[r]][col]) > std::abs(G[perm[piv]][col])) piv = r;
    std::swap(perm[col], perm[piv]);
    const int pr = perm[col];
    if (std::abs(G[pr][col]) < 1e-300)
      throw std::invalid_argument("classify: singular normal equations");
    for (int r = col + 1; r < 4; ++r) {
      const double f = G[perm[r]][col] / G[pr][col];
      for (int c2 = col; c2 < 4; ++c2) G[perm[r]][c2] -= f * G[pr][c2];
      rhs[perm[r]] -= f * rhs[pr];
    }
  }
  double sol[4];
  for (int col = 3; col >= 0; --col) {
    double v = rhs[perm[col]];
    for (int c2 = col + 1; c2 < 4; ++c2) v -= G[perm[col]][c2] * sol[c2];
    sol[col] = v / G[perm[col]][col];
  }
  for (int col = 0; col < 4; ++col) rhs[col] = sol[col];
}

struct AngleFit {
  double misfit = 0.0;
  std::vector<Sym2> H;
  std::vector<double> k;
};

AngleFit fit_at_angle(const FitSamples &s, int N, double theta) {
  const double ex = std::cos(theta), ey = std::sin(theta);
  const std::size_t M = s.x.size();
  double G[4][4] = {};
  std::vector<std::array<double, 4>> rhs(N, {0, 0, 0, 0});
  for (std::size_t i = 0; i < M; ++i) {
    const double X = s.x[i], Y = s.y[i];
    const double sp = std::max(ex * X + ey * Y, 0.0);
    const double phi[4] = {0.5 * X * X, X * Y, 0.5 * Y * Y, sp * sp};
    for (int a2 = 0; a2 < 4; ++a2)
      for (int b2 = a2; b2 < 4; ++b2) G[a2][b2] += phi[a2] * phi[b2];
    for (int j = 0; j < N; ++j)
      for (int a2 = 0; a2 < 4; ++a2) rhs[j][a2] += phi[a2] * s.u[j][i];
  }
  for (int a2 = 0; a2 < 4; ++a2)
    for (int b2 = 0; b2 < a2; ++b2) G[a2][b2] = G[b2][a2];

  AngleFit fit;
  for (int j = 0; j < N; ++j) {
    double Gc[4][4];
    std::copy(&G[0][0], &G[0][0] + 16, &Gc[0][0]);
    double c[4] = {rhs[j][0], rhs[j][1], rhs[j][2], rhs[j][3]};
    solve4(Gc, c);
    fit.H.push_back({c[0], c[1], c[2]});
    fit.k.push_back(c[3]);
  }
  // explicit residual pass: the normal-equation shortcut y'y - c'X'y loses
  // all accuracy once the fit is near exact
  double res2 = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double X = s.x[i], Y = s.y[i];
    const double sp = std::max(ex * X + ey * Y, 0.0);
    const double phi[4] = {0.5 * X * X, X * Y, 0.5 * Y * Y, sp * sp};
    for (int j = 0; j < N; ++j) {
      const double pred = fit.H[j].xx * phi[0] + fit.H[j].xy * phi[1] +
                          fit.H[j].yy * phi[2] + fit.k[j] * phi[3];
      const double diff = s.u[j][i] - pred;
      res2 += diff * diff;
    }
  }
  fit.misfit = std::sqrt(res2 / (static_cast<double>(M) * N)) /
               std::max(s.scale, 1e-300);
  return fit;
}

// canonical (A, a, b) of an (H, k) fit: gauge with sum b = 0
struct Canonical {
  Sym2 A;
  std::vector<double> a, b;
};

Canonical canonicalize(const std::vector<Sym2> &H, const std::vector<double> &k,
                       double ex, double ey) {
  const int N = static_cast<int>(H.size());
  Canonical c;
  for (const Sym2 &Hj : H) c.A = c.A + Hj;
  c.A = (1.0 / N) * c.A;
  const double eAe = c.A.quad(ex, ey);
  for (int j = 0; j < N; ++j) {
    const Sym2 &Hj = H[j];
    const double b = 0.5 * (eAe - Hj.quad(ex, ey));
    c.b.push_back(b);
    c.a.push_back(k[j] - b);
  }
  return c;
}

bool lex_greater(const Canonical &l, const Canonical &r) {
  const int N = static_cast<int>(l.a.size());
  for (int j = 0; j < N; ++j) {
    if (l.a[j] > r.a[j] + 1e-12) return true;
    if (l.a[j] < r.a[j] - 1e-12) return false;
  }
  for (int j = 0; j < N; ++j) {
    if (-l.b[j] > -r.b[j] + 1e-12) return true;
    if (-l.b[j] < -r.b[j] - 1e-12) return false;
  }
  return false;
}

double pair_line_objective(const FitSamples &s, int p, double ex, double ey,
                           double da, double db, double c) {
  double obj = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double sv = ex * s.x[i] + ey * s.y[i] - c;
    const double sp = std::max(sv, 0.0), sm = std::max(-sv, 0.0);
    const double model = da * sp * sp + db * sm * sm;
    const double diff = s.u[p][i] - s.u[p + 1][i] - model;
    obj += diff * diff;
  }
  return obj;
}

template <typename F>
double golden_min(F &&f, double lo, double hi, int iters) {
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ClassificationResult classify_halfspace(const MembraneStack &stack) {
  const int N = stack.N;
  const FitSamples s = gather_samples(stack);
  ClassificationResult res;
  res.a.assign(N, 0.0);
  res.b.assign(N, 0.0);
  res.H.assign(N, Sym2{});
  res.k.assign(N, 0.0);

  if (s.scale < 1e-14) {
    res.degenerate = true;
    return res;
  }
  double maxdiff = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (int j = 0; j + 1 < N; ++j)
      maxdiff = std::max(maxdiff, std::abs(s.u[j][i] - s.u[j + 1][i]));

  if (maxdiff <= 1e-10 * std::max(1.0, s.scale)) {
    // all membranes equal: only the common quadratic is identified
    res.degenerate = true;
    const AngleFit fit = fit_at_angle(s, N, 0.0);
    Sym2 A{};
    for (int j = 0; j < N; ++j) A = A + (fit.H[j] + (2.0 * fit.k[j]) * Sym2{1, 0, 0});
    res.A = (1.0 / N) * A;
    res.H.assign(N, res.A);
    res.misfit = fit.misfit;
    return res;
  }

  double best_theta = 0.0;
  double best_misfit = std::numeric_limits<double>::max();
  for (int deg = 0; deg < 180; ++deg) {
    const double th = deg * kPi / 180.0;
    const double m = fit_at_angle(s, N, th).misfit;
    if (m < best_misfit) {
      best_misfit = m;
      best_theta = th;
    }
  }
  const double span = 1.5 * kPi / 180.0;
  best_theta = golden_min(
      [&](double th) { return fit_at_angle(s, N, th).misfit; },
      best_theta - span, best_theta + span, 48);

  AngleFit fit = fit_at_angle(s, N, best_theta);
  double ex = std::cos(best_theta), ey = std::sin(best_theta);

  // pick the orientation of e with lexicographically larger (a, -b)
  const Sym2 E = outer(ex, ey);
  std::vector<Sym2> Hf;
  std::vector<double> kf;
  for (int j = 0; j < N; ++j) {
    Hf.push_back(fit.H[j] + (2.0 * fit.k[j]) * E);
    kf.push_back(-fit.k[j]);
  }
  Canonical can = canonicalize(fit.H, fit.k, ex, ey);
  Canonical canf = canonicalize(Hf, kf, -ex, -ey);
  if (lex_greater(canf, can)) {
    can = canf;
    fit.H = Hf;
    fit.k = kf;
    ex = -ex;
    ey = -ey;
  }
  res.angle = std::atan2(ey, ex);
  if (res.angle < 0.0) res.angle += 2.0 * kPi;
  res.ex = ex;
  res.ey = ey;
  res.A = can.A;
  res.a = can.a;
  res.b = can.b;
  res.H = fit.H;
  res.k = fit.k;
  res.misfit = fit.misfit;

  // per-pair free-boundary lines {x.e = c_p}
  res.fb_offsets.assign(N - 1, std::numeric_limits<double>::quiet_NaN());
  const double R = stack.dom->R;
  for (int p = 0; p + 1 < N; ++p) {
    const double da = res.a[p] - res.a[p + 1];
    const double db = res.b[p + 1] - res.b[p];
    if (std::max(std::abs(da), std::abs(db)) < 1e-6 * std::max(1.0, s.scale))
      continue;
    // the line model only applies when the pair difference depends on x.e
    // alone, i.e. the quadratic part of u_p - u_{p+1} is a multiple of e e'
    const Sym2 dH = res.H[p] - res.H[p + 1];
    const Sym2 off = dH - dH.quad(ex, ey) * E;
    if (std::sqrt(off.frob2()) > 1e-5 * std::max(1.0, s.scale)) continue;
    res.active_pairs.push_back(p);
    auto obj = [&](double c) {
      return pair_line_objective(s, p, ex, ey, da, db, c);
    };
    double best_c = 0.0, best_o = obj(0.0);
    for (int step = -50; step <= 50; ++step) {
      const double c = step * 0.01 * R;
      const double o = obj(c);
      if (o < best_o) {
        best_o = o;
        best_c = c;
      }
    }
    res.fb_offsets[p] = golden_min(obj, best_c - 0.01 * R, best_c + 0.01 * R, 40);
  }
  for (std::size_t i = 0; i < res.active_pairs.size(); ++i)
    for (std::size_t j = i + 1; j < res.active_pairs.size(); ++j)
      res.alignment_defect = std::max(
          res.alignment_defect, std::abs(res.fb_offsets[res.active_pairs[i]] -
                                         res.fb_offsets[res.active_pairs[j]]));
  return res;
}

namespace {

double frob2_of(const std::vector<Sym2> &H) {
  double s = 0.0;
  for (const Sym2 &m : H) s += m.frob2();
  return s;
}

double dist_with_k(const std::vector<Sym2> &H, const std::vector<Sym2> &T,
                   const std::vector<double> &k, const std::vector<double> &kt) {
  double d2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    d2 += (H[j] - T[j]).frob2();
    d2 += (k[j] - kt[j]) * (k[j] - kt[j]);
  }
  return d2;
}

// least-squares A with tr A = target for templates (c_1 A, c_2 A, c_3 A)
Sym2 fit_scaled_A(const std::vector<Sym2> &H, const double c[3],
                  double target_trace) {
  double c2 = 0.0;
  Sym2 num{};
  for (int j = 0; j < 3; ++j) {
    c2 += c[j] * c[j];
    num = num + c[j] * H[j];
  }
  Sym2 A = (1.0 / c2) * num;
  const double mu = 0.5 * (target_trace - A.trace());
  return A + Sym2{mu, 0.0, mu};
}

double template_distance(Category cat, const std::vector<Sym2> &H,
                         const std::vector<double> &k, double ex, double ey) {
  const Sym2 E = outer(ex, ey);
  const Sym2 Z{};
  switch (cat) {
    case Category::I:
      return dist_with_k(H, {Z, Z, Z}, k, {0.5, 0.0, -0.5});
    case Category::II:
      return dist_with_k(H, {0.5 * E, 0.5 * E, -1.0 * E}, k,
                         {0.25, -0.5, 0.25});
    case Category::III: {
      const double c[3] = {0.5, 0.5, -1.0};
      const Sym2 A = fit_scaled_A(H, c, 1.0);
      return dist_with_k(H, {0.5 * A, 0.5 * A, -1.0 * A}, k,
                         {0.25, -0.25, 0.0});
    }
    case Category::IV: {
      const double c[3] = {1.0, -0.5, -0.5};
      const Sym2 A = fit_scaled_A(H, c, 1.0);
      return dist_with_k(H, {A, -0.5 * A, -0.5 * A}, k, {0.0, 0.25, -0.25});
    }
    case Category::V: {
      // project onto {sum H = 0, traces (1, 0, -1)}, k = 0
      Sym2 S{};
      for (const Sym2 &m : H) S = S + m;
      const double tr[3] = {1.0, 0.0, -1.0};
      std::vector<Sym2> T;
      for (int j = 0; j < 3; ++j) {
        Sym2 Hp = H[j] - (1.0 / 3.0) * S;
        const double mu = 0.5 * (tr[j] - Hp.trace());
        T.push_back(Hp + Sym2{mu, 0.0, mu});
      }
      return dist_with_k(H, T, k, {0.0, 0.0, 0.0});
    }
  }
  return std::numeric_limits<double>::max();
}

}  // namespace

std::string classify_example46(ClassificationResult &result,
                               const Forcing &forcing, double tau_cat) {
  if (static_cast<int>(result.H.size()) != 3)
    throw std::invalid_argument("classify_example46: requires N = 3");
  if (forcing.constants.size() != 3 || std::abs(forcing.constants[0] - 1.0) > 1e-12 ||
      std::abs(forcing.constants[1]) > 1e-12 ||
      std::abs(forcing.constants[2] + 1.0) > 1e-12)
    throw std::invalid_argument(
        "classify_example46: requires the canonical forcing (1, 0, -1)");

  // both orientations of the fitted data
  const Sym2 E = outer(result.ex, result.ey);
  std::vector<Sym2> Hf;
  std::vector<double> kf;
  for (int j = 0; j < 3; ++j) {
    Hf.push_back(result.H[j] + (2.0 * result.k[j]) * E);
    kf.push_back(-result.k[j]);
  }
  const double scale = std::max(1.0, std::sqrt(frob2_of(result.H) +
                                               result.k[0] * result.k[0] +
                                               result.k[1] * result.k[1] +
                                               result.k[2] * result.k[2]));
  const Category cats[5] = {Category::I, Category::II, Category::III,
                            Category::IV, Category::V};
  std::string best = "none";
  double best_d = std::numeric_limits<double>::max();
  for (Category c : cats) {
    const double d = std::min(
        template_distance(c, result.H, result.k, result.ex, result.ey),
        template_distance(c, Hf, kf, -result.ex, -result.ey));
    const double rel = std::sqrt(d) / scale;
    if (rel <= tau_cat && rel < best_d) {
      best_d = rel;
      best = to_string(c);
    }
  }
  result.label = best;
  return best;
}

std::vector<PairConnectedness> connectedness_check(const BlowupProfile &profile,
                                                   double r_probe, double eps_c,
                                                   int m) {
  if (!(r_probe > 0.2 && r_probe < 0.9))
    throw std::invalid_argument(
        "connectedness_check: probe radius must lie in (0.2, 0.9)");
  const CircleRestriction cr =
      circle_restriction(profile.stack, 0.0, 0.0, r_probe, m, eps_c);
  const double step = 2.0 * kPi / m;
  std::vector<PairConnectedness> out(profile.stack.N - 1);
  for (int p = 0; p + 1 < profile.stack.N; ++p) {
    std::vector<bool> contact(m);
    int count = 0;
    for (int k = 0; k < m; ++k) {
      contact[k] = cr.values[p][k] - cr.values[p + 1][k] <= eps_c;
      count += contact[k];
    }
    PairConnectedness &pc = out[p];
    pc.total_arc = count * step;
    if (count == 0) {
      pc.empty = true;
      continue;
    }
    if (count == m) {
      pc.longest_arc = 2.0 * kPi;
      pc.connected = true;
      continue;
    }
    int start = 0;
    while (contact[start]) start = (start + 1) % m;
    int longest = 0;
    for (int off = 0; off < m;) {
      if (!contact[(start + off) % m]) {
        ++off;
        continue;
      }
      int len = 0;
      while (off + len < m && contact[(start + off + len) % m]) ++len;
      longest = std::max(longest, len);
      off += len;
    }
    pc.longest_arc = longest * step;
    pc.connected = longest >= 4;
  }
  return out;
}

}  // namespace membranes
