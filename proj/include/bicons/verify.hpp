#pragma once

// Numerical differential geometry of an evaluable patch X(u,v) in R^3, S^3
// or H^3, and the residuals of the biconservative identities.
//
// Conventions
//   eta   unit normal inside the model, one sign per patch (f > 0 at the
//         rectangle center)
//   h_ij  <nabla_{X_i} X_j, eta>;  A = g^{-1} h;  f = tr A;  K = det A + c
//   Delta the geometer's Laplacian, Delta = -trace nabla^2

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bicons/ambient.hpp"
#include "bicons/errors.hpp"
#include "bicons/surface.hpp"

namespace bicons {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

struct FdOptions {
  double fd_step = 0.0;        // h; 0 selects 1e-4 x rectangle diagonal
  double outer_factor = 32.0;  // H = outer_factor * h, step for derivatives of f
  bool richardson = true;      // combine steps s and s/2

  double step_for(const Rect& r) const { return fd_step > 0.0 ? fd_step : 1e-4 * r.diagonal(); }
};

struct PointGeometry {
  double u = 0.0, v = 0.0;
  AmbientVector X, Xu, Xv;
  AmbientVector Xuu, Xuv, Xvv;
  AmbientVector eta;
  Mat2 g{}, g_inv{}, h{}, A{};
  double det_g = 0.0;
  double f = 0.0;
  double K = 0.0;
  double norm_A2 = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  Vec2 dir1{}, dir2{};  // g-unit principal directions, coordinates
  bool eig_degenerate = false;

  // Filled by the derivative stage.
  bool has_derivatives = false;
  Vec2 df{};      // (f_u, f_v)
  Vec2 grad_f{};  // g^{-1} df
  AmbientVector grad_f_ambient;
  double grad_norm = 0.0;
  double laplacian_f = 0.0;  // Delta = -trace Hess
  bool non_cmc = false;
};

// The threshold is a numerical choice, not part of the geometry.
inline bool is_non_cmc(double grad_norm, double f) {
  return grad_norm > 1e-6 * (1.0 + std::abs(f));
}

namespace detail {

inline Mat2 inverse(const Mat2& m, double det) {
  return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

inline Mat2 multiply(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline Vec2 apply(const Mat2& a, const Vec2& x) {
  return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
}

inline double quad(const Mat2& g, const Vec2& x, const Vec2& y) {
  return x[0] * (g[0][0] * y[0] + g[0][1] * y[1]) + x[1] * (g[1][0] * y[0] + g[1][1] * y[1]);
}

// Richardson combination of a second-order central difference at steps s, s/2.
template <class T>
T richardson(const T& coarse, const T& fine) {
  return (4.0 * fine - coarse) / 3.0;
}
inline double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

// Eigenvector of A for eigenvalue lam, normalized in g.
inline Vec2 eigenvector(const Mat2& A, const Mat2& g, double lam) {
  Vec2 a{A[0][1], lam - A[0][0]};
  Vec2 b{lam - A[1][1], A[1][0]};
  Vec2 w = std::hypot(a[0], a[1]) >= std::hypot(b[0], b[1]) ? a : b;
  const double n2 = quad(g, w, w);
  if (!(n2 > 0.0)) return {0.0, 0.0};
  const double s = 1.0 / std::sqrt(n2);
  return {w[0] * s, w[1] * s};
}

}  // namespace detail

class Verifier {
 public:
  Verifier(const SurfacePatch& patch, FdOptions opt = {}) : patch_(patch), opt_(opt) {
    h_ = opt_.step_for(patch_.rect);
    H_ = opt_.outer_factor * h_;
    if (!(h_ > 0.0) || !(H_ > 0.0)) throw UsageError("Verifier: finite-difference steps must be positive");
    const double uc = 0.5 * (patch_.rect.u0 + patch_.rect.u1);
    const double vc = 0.5 * (patch_.rect.v0 + patch_.rect.v1);
    if (shape(uc, vc).f < 0.0) sign_ = -1.0;
  }

  const SurfacePatch& patch() const { return patch_; }
  const FdOptions& options() const { return opt_; }
  double inner_step() const { return h_; }
  double outer_step() const { return H_; }
  double normal_sign() const { return sign_; }

  /// Largest rectangle on which every finite-difference stencil stays
  /// inside the patch rectangle.
  Rect grid_rect() const {
    const double m = H_ + 2.0 * h_;
    return patch_.rect.inset(m, m);
  }

  /// g, eta, h, A and the quantities derived from A at one point.
  PointGeometry shape(double u, double v) const {
    const SurfacePatch& p = patch_;
    PointGeometry pg;
    pg.u = u;
    pg.v = v;
    pg.X = p.X(u, v);
    pg.Xu = p.Xu(u, v);
    pg.Xv = p.Xv(u, v);

    auto level = [&](double s, AmbientVector& uu, AmbientVector& uv, AmbientVector& vv) {
      const double d = 0.5 / s;
      uu = (p.Xu(u + s, v) - p.Xu(u - s, v)) * d;
      vv = (p.Xv(u, v + s) - p.Xv(u, v - s)) * d;
      uv = ((p.Xu(u, v + s) - p.Xu(u, v - s)) + (p.Xv(u + s, v) - p.Xv(u - s, v))) * (0.5 * d);
    };
    level(h_, pg.Xuu, pg.Xuv, pg.Xvv);
    if (opt_.richardson) {
      AmbientVector uu, uv, vv;
      level(0.5 * h_, uu, uv, vv);
      pg.Xuu = detail::richardson(pg.Xuu, uu);
      pg.Xuv = detail::richardson(pg.Xuv, uv);
      pg.Xvv = detail::richardson(pg.Xvv, vv);
    }

    pg.g = {{{inner(pg.Xu, pg.Xu), inner(pg.Xu, pg.Xv)}, {inner(pg.Xv, pg.Xu), inner(pg.Xv, pg.Xv)}}};
    pg.det_g = pg.g[0][0] * pg.g[1][1] - pg.g[0][1] * pg.g[1][0];
    if (!(pg.det_g > 1e-10 * pg.g[0][0] * pg.g[1][1]))
      throw DegeneracyError("fundamental_forms: metric is near-degenerate at (" + std::to_string(u) +
                            ", " + std::to_string(v) + ")");
    pg.g_inv = detail::inverse(pg.g, pg.det_g);

    pg.eta = patch_normal(p, u, v) * sign_;

    // Gauss formula of the model: nabla_{X_i} X_j = X_ij + c <X_i,X_j> X.
    const double c = p.model.c;
    const double xe = c == 0.0 ? 0.0 : inner(pg.X, pg.eta);
    pg.h = {{{inner(pg.Xuu, pg.eta) + c * pg.g[0][0] * xe, inner(pg.Xuv, pg.eta) + c * pg.g[0][1] * xe},
             {inner(pg.Xuv, pg.eta) + c * pg.g[1][0] * xe, inner(pg.Xvv, pg.eta) + c * pg.g[1][1] * xe}}};
    pg.A = detail::multiply(pg.g_inv, pg.h);

    const Mat2& A = pg.A;
    pg.f = A[0][0] + A[1][1];
    const double det_A = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    pg.K = det_A + c;
    pg.norm_A2 = A[0][0] * A[0][0] + 2.0 * A[0][1] * A[1][0] + A[1][1] * A[1][1];
    const double half = 0.5 * pg.f;
    const double disc = std::sqrt(std::max(0.0, half * half - det_A));
    pg.lambda1 = half - disc;
    pg.lambda2 = half + disc;
    pg.eig_degenerate = 2.0 * disc < 1e-8 * (1.0 + std::abs(pg.f));
    if (!pg.eig_degenerate) {
      pg.dir1 = detail::eigenvector(A, pg.g, pg.lambda1);
      pg.dir2 = detail::eigenvector(A, pg.g, pg.lambda2);
    }
    return pg;
  }

  double f(double u, double v) const { return shape(u, v).f; }

  /// Full geometry including grad f and Delta f.
  PointGeometry geometry(double u, double v) const {
    PointGeometry pg = shape(u, v);
    const double f0 = pg.f;

    struct Diffs {
      double fu, fv, fuu, fuv, fvv;
    };
    auto level = [&](double s) {
      const double fp0 = f(u + s, v), fm0 = f(u - s, v);
      const double f0p = f(u, v + s), f0m = f(u, v - s);
      const double fpp = f(u + s, v + s), fpm = f(u + s, v - s);
      const double fmp = f(u - s, v + s), fmm = f(u - s, v - s);
      return Diffs{(fp0 - fm0) / (2.0 * s), (f0p - f0m) / (2.0 * s),
                   (fp0 - 2.0 * f0 + fm0) / (s * s), (fpp - fpm - fmp + fmm) / (4.0 * s * s),
                   (f0p - 2.0 * f0 + f0m) / (s * s)};
    };
    Diffs d = level(H_);
    if (opt_.richardson) {
      const Diffs e = level(0.5 * H_);
      d = {detail::richardson(d.fu, e.fu), detail::richardson(d.fv, e.fv),
           detail::richardson(d.fuu, e.fuu), detail::richardson(d.fuv, e.fuv),
           detail::richardson(d.fvv, e.fvv)};
    }

    pg.has_derivatives = true;
    pg.df = {d.fu, d.fv};
    pg.grad_f = detail::apply(pg.g_inv, pg.df);
    pg.grad_f_ambient = pg.grad_f[0] * pg.Xu + pg.grad_f[1] * pg.Xv;
    pg.grad_norm = std::sqrt(std::max(0.0, detail::quad(pg.g, pg.grad_f, pg.grad_f)));
    pg.non_cmc = is_non_cmc(pg.grad_norm, pg.f);

    // Divergence-form Laplacian expanded with Christoffel symbols,
    // Gamma^k_ij = g^{kl} <X_ij, X_l>.
    const std::array<const AmbientVector*, 3> second{&pg.Xuu, &pg.Xuv, &pg.Xvv};
    const Mat2 hess{{{d.fuu, d.fuv}, {d.fuv, d.fvv}}};
    double lap = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const AmbientVector& xij = *second[static_cast<std::size_t>(i + j)];
        const Vec2 low{inner(xij, pg.Xu), inner(xij, pg.Xv)};
        const Vec2 gamma = detail::apply(pg.g_inv, low);
        lap += pg.g_inv[i][j] * (hess[i][j] - gamma[0] * pg.df[0] - gamma[1] * pg.df[1]);
      }
    }
    pg.laplacian_f = -lap;
    return pg;
  }

 private:
  SurfacePatch patch_;
  FdOptions opt_;
  double h_ = 0.0;
  double H_ = 0.0;
  double sign_ = 1.0;
};

/// Pointwise fundamental forms with the patch-level normal orientation.
inline PointGeometry fundamental_forms(const SurfacePatch& patch, double u, double v, double fd_step = 0.0) {
  FdOptions opt;
  opt.fd_step = fd_step;
  return Verifier(patch, opt).shape(u, v);
}

// ---------------------------------------------------------------------------
// Residuals

inline void require_derivatives(const PointGeometry& pg) {
  if (!pg.has_derivatives) throw UsageError("residual needs grad f / Delta f; use Verifier::geometry");
}

/// |2 A(grad f) + f grad f|_g / (1 + |f| |grad f|).
inline double biconservative_residual(const PointGeometry& pg) {
  require_derivatives(pg);
  const Vec2 ag = detail::apply(pg.A, pg.grad_f);
  const Vec2 w{2.0 * ag[0] + pg.f * pg.grad_f[0], 2.0 * ag[1] + pg.f * pg.grad_f[1]};
  const double n = std::sqrt(std::max(0.0, detail::quad(pg.g, w, w)));
  return n / (1.0 + std::abs(pg.f) * pg.grad_norm);
}

struct CurvatureIdentityResiduals {
  double r_K = 0.0;
  double r_A2 = 0.0;
  std::optional<double> r_eig;  // only at non-CMC points
};

inline CurvatureIdentityResiduals curvature_identity_residuals(const PointGeometry& pg, int c) {
  CurvatureIdentityResiduals r;
  r.r_K = std::abs(pg.K + 0.75 * pg.f * pg.f - c);
  r.r_A2 = std::abs(pg.norm_A2 - 2.5 * pg.f * pg.f);
  if (pg.has_derivatives && pg.non_cmc)
    r.r_eig = std::max(std::abs(pg.lambda1 + 0.5 * pg.f), std::abs(pg.lambda2 - 1.5 * pg.f));
  return r;
}

/// |f Delta f + |grad f|^2 - (16/9) K (K - c)|.
inline double pde_residual(const PointGeometry& pg, int c) {
  require_derivatives(pg);
  return std::abs(pg.f * pg.laplacian_f + pg.grad_norm * pg.grad_norm -
                  16.0 / 9.0 * pg.K * (pg.K - c));
}

inline double pde_residual(const Verifier& ver, double u, double v) {
  return pde_residual(ver.geometry(u, v), ver.patch().model.c);
}

/// Delta f - f |A|^2 + f Ric(eta,eta); zero exactly when the surface is biharmonic.
inline double normal_bitension_residual(const PointGeometry& pg, const SpaceForm& m) {
  require_derivatives(pg);
  return pg.laplacian_f - pg.f * pg.norm_A2 + pg.f * m.normal_ricci();
}

/// |df(X2)| with X2 the unit principal direction of lambda2; empty at CMC
/// or umbilic points.
inline std::optional<double> x2f_residual(const PointGeometry& pg) {
  require_derivatives(pg);
  if (!pg.non_cmc || pg.eig_degenerate) return std::nullopt;
  return std::abs(pg.df[0] * pg.dir2[0] + pg.df[1] * pg.dir2[1]);
}

// ---------------------------------------------------------------------------
// Grid verification

struct ToleranceProfile {
  std::string name;
  std::map<std::string, double> limits;
  double bitension_floor = 1e-3;  // min |normal bitension| on non-CMC patches
};

inline ToleranceProfile tolerance_profile(const std::string& name) {
  ToleranceProfile t;
  t.name = name;
  if (name == "closed-form") {
    t.limits = {{"model", 1e-8},          {"normal", 1e-10},      {"biconservative", 1e-8},
                {"gauss", 1e-8},          {"norm_A2", 1e-8},      {"eigenvalues", 1e-8},
                {"x2f", 1e-8},            {"pde", 1e-4},          {"f_vs_2k", 1e-5},
                {"f_reference", 1e-8},    {"K_reference", 1e-8},  {"sheet", 0.5}};
    t.bitension_floor = 1e-6;
  } else if (name == "integrated") {
    t.limits = {{"model", 1e-8},          {"normal", 1e-10},      {"biconservative", 1e-5},
                {"gauss", 1e-5},          {"norm_A2", 1e-5},      {"eigenvalues", 1e-5},
                {"x2f", 1e-5},            {"pde", 1e-4},          {"f_vs_2k", 1e-5},
                {"f_reference", 1e-5},    {"K_reference", 1e-5},  {"sheet", 0.5}};
    t.bitension_floor = 1e-3;
  } else if (name == "loose") {
    t.limits = {{"model", 1e-6},          {"normal", 1e-8},       {"biconservative", 1e-3},
                {"gauss", 1e-3},          {"norm_A2", 1e-3},      {"eigenvalues", 1e-3},
                {"x2f", 1e-3},            {"pde", 1e-2},          {"f_vs_2k", 1e-3},
                {"f_reference", 1e-3},    {"K_reference", 1e-3},  {"sheet", 0.5}};
    t.bitension_floor = 0.0;
  } else {
    throw UsageError("unknown tolerance profile '" + name + "' (closed-form|integrated|loose)");
  }
  return t;
}

inline std::string default_tolerance_profile(SurfaceCase s) {
  return s == SurfaceCase::R3Revolution ? "closed-form" : "integrated";
}

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  Vec2 argmax{0.0, 0.0};
  std::size_t count = 0;
  std::optional<double> limit;  // empty: informational only
  bool pass = true;

  void add(double value, double u, double v) {
    const double a = std::abs(value);
    if (count == 0 || a > max) {
      max = a;
      argmax = {u, v};
    }
    min_abs = std::min(min_abs, a);
    mean += (a - mean) / static_cast<double>(count + 1);
    ++count;
  }
};

struct GridSpec {
  int nu = 64;
  int nv = 64;
  Rect rect;

  double u(int i) const { return rect.u0 + (rect.u1 - rect.u0) * i / (nu - 1); }
  double v(int j) const { return rect.v0 + (rect.v1 - rect.v0) * j / (nv - 1); }
};

struct VerificationReport {
  std::string schema = "bicons.verify/1";
  std::string case_name;
  SpaceForm model;
  GridSpec grid;
  FdOptions fd;
  double inner_step = 0.0;
  double outer_step = 0.0;
  double normal_sign = 1.0;
  ToleranceProfile tolerances;
  bool cmc_patch = false;
  std::vector<std::pair<std::string, ResidualStats>> residuals;

  // Per grid point, row-major in (u, v).
  std::vector<double> f_values;
  std::vector<double> K_values;
  std::vector<double> biconservative_values;
  std::vector<double> bitension_values;

  bool pass = true;

  const ResidualStats* find(const std::string& name) const {
    for (const auto& [n, s] : residuals)
      if (n == name) return &s;
    return nullptr;
  }
  const ResidualStats& at(const std::string& name) const {
    if (const auto* s = find(name)) return *s;
    throw UsageError("report has no residual '" + name + "'");
  }
};

struct VerifyOptions {
  int nu = 64;
  int nv = 64;
  FdOptions fd;
  std::string tolerance_profile;  // empty: per-case default
  std::optional<Rect> grid_rect;  // default: Verifier::grid_rect()
};

inline VerificationReport verify_patch(const SurfacePatch& patch, const VerifyOptions& opt = {}) {
  if (opt.nu < 2 || opt.nv < 2) throw UsageError("verify_patch: grid must be at least 2x2");
  const Verifier ver(patch, opt.fd);
  VerificationReport rep;
  rep.case_name = patch.label.empty() ? to_string(patch.tag) : patch.label;
  rep.model = patch.model;
  rep.fd = opt.fd;
  rep.inner_step = ver.inner_step();
  rep.outer_step = ver.outer_step();
  rep.normal_sign = ver.normal_sign();
  rep.tolerances = tolerance_profile(opt.tolerance_profile.empty() ? default_tolerance_profile(patch.tag)
                                                                   : opt.tolerance_profile);
  rep.grid = {opt.nu, opt.nv, opt.grid_rect.value_or(ver.grid_rect())};
  const Rect& gr = rep.grid.rect;
  if (!(gr.u0 >= ver.grid_rect().u0 - 1e-12 && gr.u1 <= ver.grid_rect().u1 + 1e-12 &&
        gr.v0 >= ver.grid_rect().v0 - 1e-12 && gr.v1 <= ver.grid_rect().v1 + 1e-12))
    throw UsageError("verify_patch: grid rectangle leaves room for no finite-difference stencil");

  const std::size_t npts = static_cast<std::size_t>(opt.nu) * static_cast<std::size_t>(opt.nv);
  std::vector<PointGeometry> pts;
  pts.reserve(npts);
  for (int i = 0; i < opt.nu; ++i)
    for (int j = 0; j < opt.nv; ++j) pts.push_back(ver.geometry(rep.grid.u(i), rep.grid.v(j)));

  rep.cmc_patch = std::none_of(pts.begin(), pts.end(), [](const PointGeometry& p) { return p.non_cmc; });
  if (rep.cmc_patch) {
    // f is constant to within the resolution of the differences.
    for (PointGeometry& p : pts) {
      p.df = {0.0, 0.0};
      p.grad_f = {0.0, 0.0};
      p.grad_f_ambient *= 0.0;
      p.grad_norm = 0.0;
      p.laplacian_f = 0.0;
    }
  }

  const SpaceForm& m = patch.model;
  const bool curved = m.c != 0;
  std::map<std::string, ResidualStats> acc;
  std::vector<std::string> order;
  auto add = [&](const std::string& name, double value, const PointGeometry& p) {
    auto [it, fresh] = acc.try_emplace(name);
    if (fresh) order.push_back(name);
    it->second.add(value, p.u, p.v);
  };

  rep.f_values.reserve(npts);
  rep.K_values.reserve(npts);
  rep.biconservative_values.reserve(npts);
  rep.bitension_values.reserve(npts);
  for (const PointGeometry& p : pts) {
    if (curved) {
      add("model", inner(p.X, p.X) - *m.constraint(), p);
      if (m.c < 0) add("sheet", p.X[3] > 0.0 ? 0.0 : 1.0 + std::abs(p.X[3]), p);
    }
    double nrm = std::abs(inner(p.eta, p.eta) - 1.0);
    nrm = std::max(nrm, std::abs(inner(p.eta, p.Xu)) / metric_norm(p.Xu));
    nrm = std::max(nrm, std::abs(inner(p.eta, p.Xv)) / metric_norm(p.Xv));
    if (curved) nrm = std::max(nrm, std::abs(inner(p.eta, p.X)));
    add("normal", nrm, p);

    const double bc = biconservative_residual(p);
    add("biconservative", bc, p);
    const auto ci = curvature_identity_residuals(p, m.c);
    if (!rep.cmc_patch) {
      add("gauss", ci.r_K, p);
      add("norm_A2", ci.r_A2, p);
    }
    if (ci.r_eig) add("eigenvalues", *ci.r_eig, p);
    if (const auto x2 = x2f_residual(p)) add("x2f", *x2, p);
    if (p.non_cmc && p.f > 0.0) add("pde", pde_residual(p, m.c), p);
    const double bt = normal_bitension_residual(p, m);
    add("normal_bitension", bt, p);
    if (patch.profile_k) add("f_vs_2k", p.f - 2.0 * patch.profile_k(p.u), p);
    if (patch.f_reference) add("f_reference", p.f - patch.f_reference(p.u, p.v), p);
    if (patch.K_reference) add("K_reference", p.K - patch.K_reference(p.u, p.v), p);

    rep.f_values.push_back(p.f);
    rep.K_values.push_back(p.K);
    rep.biconservative_values.push_back(bc);
    rep.bitension_values.push_back(bt);
  }

  rep.pass = true;
  for (const auto& name : order) {
    ResidualStats s = acc.at(name);
    if (name == "normal_bitension") {
      // Informational on CMC patches; on non-CMC patches the surface must
      // stay away from the biharmonic equation.
      if (!rep.cmc_patch) {
        s.limit = rep.tolerances.bitension_floor;
        s.pass = s.min_abs > rep.tolerances.bitension_floor;
      }
    } else if (auto it = rep.tolerances.limits.find(name); it != rep.tolerances.limits.end()) {
      s.limit = it->second;
      s.pass = s.max <= it->second;
    }
    rep.pass = rep.pass && s.pass;
    rep.residuals.emplace_back(name, s);
  }
  return rep;
}

}  // namespace bicons
