#pragma once

// Explicit ambient parametrizations X(u,v) of the biconservative surfaces.
//
//   R^3        X(rho,v) = (rho cos v, rho sin v, u(rho))
//   S^3, H^3   X(u,v)   = sigma(u) + r(u) (C1 (cos v - 1) + C2 sin v),   r = 1/kappa2
//   H^3 (par.) X(u,v)   = sigma(u) + r(u) (C1 (e^v - 1) + C2 (e^{-v} - 1)),
//                                                             r = 1/(sqrt(2) kappa2)

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "bicons/ambient.hpp"
#include "bicons/errors.hpp"
#include "bicons/profile_curve.hpp"

namespace bicons {

enum class SurfaceCase { R3Revolution, S3, H3Elliptic, H3Parabolic };

inline std::string to_string(SurfaceCase s) {
  switch (s) {
    case SurfaceCase::R3Revolution: return "R3Revolution";
    case SurfaceCase::S3: return "S3";
    case SurfaceCase::H3Elliptic: return "H3Elliptic";
    case SurfaceCase::H3Parabolic: return "H3Parabolic";
  }
  return "?";
}

struct Rect {
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;

  double diagonal() const { return std::hypot(u1 - u0, v1 - v0); }
  bool contains(double u, double v) const { return u >= u0 && u <= u1 && v >= v0 && v <= v1; }
  Rect inset(double du, double dv) const {
    if (2.0 * du >= u1 - u0 || 2.0 * dv >= v1 - v0)
      throw UsageError("Rect::inset: margin larger than the rectangle");
    return {u0 + du, u1 - du, v0 + dv, v1 - dv};
  }
};

using PatchMap = std::function<AmbientVector(double, double)>;
using ScalarField = std::function<double(double, double)>;

struct SurfacePatch {
  SurfaceCase tag = SurfaceCase::R3Revolution;
  std::string label;  // overrides the case name in reports
  SpaceForm model;
  Rect rect;
  PatchMap X, Xu, Xv;
  double C = 0.0;
  AmbientVector C1, C2;

  // Builder-side data kept only for comparison by the verifier.
  ScalarField f_reference;  // R^3 closed form
  ScalarField K_reference;  // R^3 closed form
  std::function<double(double)> profile_k;  // k(u) for S^3/H^3

  std::shared_ptr<const ProfileCurve> profile;
  std::optional<RevolutionProfile> revolution;
};

inline SurfacePatch build_r3_revolution(const RevolutionProfile& prof, Rect rect) {
  if (!(rect.u0 > prof.rho_min()) || !(rect.u1 <= prof.rho_max()) || !(rect.u0 < rect.u1))
    throw DomainError("build_r3_revolution: rho-range must lie in (C^{-3/2}, rho_max]");
  if (!(rect.v0 < rect.v1)) throw UsageError("build_r3_revolution: empty v-range");

  SurfacePatch p;
  p.tag = SurfaceCase::R3Revolution;
  p.model = SpaceForm::r3();
  p.rect = rect;
  p.C = prof.C();
  const Signature sig = p.model.ambient;
  p.C1 = AmbientVector::basis(sig, 0);
  p.C2 = AmbientVector::basis(sig, 1);
  p.revolution = prof;

  p.X = [prof, sig](double rho, double v) {
    return AmbientVector(sig, {rho * std::cos(v), rho * std::sin(v), prof.u_of_rho(rho)});
  };
  p.Xu = [prof, sig](double rho, double v) {
    return AmbientVector(sig, {std::cos(v), std::sin(v), prof.du_drho(rho)});
  };
  p.Xv = [sig](double rho, double v) {
    return AmbientVector(sig, {-rho * std::sin(v), rho * std::cos(v), 0.0});
  };
  p.f_reference = [prof](double rho, double) { return prof.f_reference(rho); };
  p.K_reference = [prof](double rho, double) { return prof.gauss_reference(rho); };
  return p;
}

namespace detail {

inline SurfacePatch orbit_patch(std::shared_ptr<const ProfileCurve> prof, SurfaceCase tag,
                                std::optional<std::pair<double, double>> v_range) {
  SurfacePatch p;
  p.tag = tag;
  p.model = prof->model;
  p.C = prof->C;
  p.C1 = prof->C1;
  p.C2 = prof->C2;
  p.profile = prof;
  const bool parabolic = tag == SurfaceCase::H3Parabolic;
  const auto vr = v_range.value_or(parabolic ? std::pair{-1.0, 1.0}
                                             : std::pair{0.0, 2.0 * std::numbers::pi});
  if (!(vr.first < vr.second)) throw UsageError("surface: empty v-range");
  p.rect = {prof->u_min(), prof->u_max(), vr.first, vr.second};
  if (!(p.rect.u0 < p.rect.u1)) throw ConstructionError("surface: profile span is empty");

  const AmbientVector c1 = prof->C1, c2 = prof->C2;
  // Orbit direction w(v) and its v-derivative.
  auto w = [c1, c2, parabolic](double v) {
    return parabolic ? c1 * (std::exp(v) - 1.0) + c2 * (std::exp(-v) - 1.0)
                     : c1 * (std::cos(v) - 1.0) + c2 * std::sin(v);
  };
  auto wv = [c1, c2, parabolic](double v) {
    return parabolic ? c1 * std::exp(v) - c2 * std::exp(-v)
                     : c1 * (-std::sin(v)) + c2 * std::cos(v);
  };

  p.X = [prof, w](double u, double v) {
    const ProfilePoint q = prof->at(u);
    return q.sigma + prof->orbit_scale(q.k) * w(v);
  };
  p.Xu = [prof, w](double u, double v) {
    const ProfilePoint q = prof->at(u);
    // r = a k^{-3/4}  =>  r' = -(3/4) r k'/k
    const double dr = -0.75 * prof->orbit_scale(q.k) * q.kp / q.k;
    return q.tangent + dr * w(v);
  };
  p.Xv = [prof, wv](double u, double v) {
    const ProfilePoint q = prof->at(u);
    return prof->orbit_scale(q.k) * wv(v);
  };
  p.profile_k = [prof](double u) { return prof->at(u).k; };
  return p;
}

}  // namespace detail

inline SurfacePatch build_s3(std::shared_ptr<const ProfileCurve> prof,
                             std::optional<std::pair<double, double>> v_range = std::nullopt) {
  if (!prof) throw UsageError("build_s3: null profile");
  if (prof->branch != ProfileBranch::S2) throw UsageError("build_s3: profile branch must be S2");
  if (!(prof->C > 0.0)) throw UsageError("build_s3: C must be positive");
  return detail::orbit_patch(std::move(prof), SurfaceCase::S3, v_range);
}

inline SurfacePatch build_s3(const ProfileCurve& prof,
                             std::optional<std::pair<double, double>> v_range = std::nullopt) {
  return build_s3(std::make_shared<const ProfileCurve>(prof), v_range);
}

inline SurfacePatch build_h3(std::shared_ptr<const ProfileCurve> prof,
                             std::optional<std::pair<double, double>> v_range = std::nullopt) {
  if (!prof) throw UsageError("build_h3: null profile");
  switch (prof->branch) {
    case ProfileBranch::H2_elliptic:
      if (!(prof->C > 0.0)) throw UsageError("build_h3: elliptic branch needs C > 0");
      return detail::orbit_patch(std::move(prof), SurfaceCase::H3Elliptic, v_range);
    case ProfileBranch::H2_parabolic:
      if (!(prof->C < 0.0)) throw UsageError("build_h3: parabolic branch needs C < 0");
      return detail::orbit_patch(std::move(prof), SurfaceCase::H3Parabolic, v_range);
    default:
      throw UsageError("build_h3: profile branch must be H2_elliptic or H2_parabolic");
  }
}

inline SurfacePatch build_h3(const ProfileCurve& prof,
                             std::optional<std::pair<double, double>> v_range = std::nullopt) {
  return build_h3(std::make_shared<const ProfileCurve>(prof), v_range);
}

/// Killing field generating the v-orbits: T(r) = <r,C1> C2 - <r,C2> C1.
inline AmbientVector killing_field(const SurfacePatch& p, const AmbientVector& r) {
  return inner(r, p.C1) * p.C2 - inner(r, p.C2) * p.C1;
}

/// Unit normal of the patch inside the model (cofactor orientation).
inline AmbientVector patch_normal(const SurfacePatch& p, double u, double v) {
  if (p.model.c == 0) return orthonormal_complement({p.Xu(u, v), p.Xv(u, v)});
  return orthonormal_complement({p.X(u, v), p.Xu(u, v), p.Xv(u, v)});
}

/// Max over an nu x nv grid of |<T, eta>|, the component of the Killing
/// field normal to the patch. T is tangent to the model everywhere.
inline double killing_tangency_check(const SurfacePatch& p, const Rect& grid, int nu, int nv) {
  if (nu < 2 || nv < 2) throw UsageError("killing_tangency_check: grid must be at least 2x2");
  double worst = 0.0;
  for (int i = 0; i < nu; ++i) {
    const double u = grid.u0 + (grid.u1 - grid.u0) * i / (nu - 1);
    for (int j = 0; j < nv; ++j) {
      const double v = grid.v0 + (grid.v1 - grid.v0) * j / (nv - 1);
      const AmbientVector t = killing_field(p, p.X(u, v));
      worst = std::max(worst, std::abs(inner(t, patch_normal(p, u, v))));
    }
  }
  return worst;
}

}  // namespace bicons
