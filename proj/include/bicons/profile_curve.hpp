#pragma once

// Profile curves of non-CMC biconservative surfaces.
//
//  * R^3: the meridian of the surface of revolution, given in closed form as
//    u(rho) and inverted numerically.
//  * S^3 / H^3: a unit-speed curve sigma in a totally geodesic S^2 or H^2
//    with geodesic curvature k(u), recovered by integrating the Frenet frame
//    together with the curvature ODE. Initial data are chosen so that sigma
//    satisfies the linear constraints <sigma, C1> (and <sigma, C2>) of the
//    classification; the constraints are then checked, not imposed, along
//    the whole span.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bicons/ambient.hpp"
#include "bicons/curvature_ode.hpp"
#include "bicons/dop853.hpp"
#include "bicons/errors.hpp"

namespace bicons {

// ---------------------------------------------------------------------------
// R^3 surface of revolution: rho'^2 = C rho^{2/3} - 1.

class RevolutionProfile {
 public:
  RevolutionProfile(double C, double rho_max) : C_(C), rho_max_(rho_max) {
    if (!(C > 0.0)) throw DomainError("revolution_profile: C must be positive");
    rho_min_ = std::pow(C, -1.5);
    if (!(rho_max > rho_min_))
      throw DomainError("revolution_profile: rho_max must exceed C^{-3/2}");
  }

  double C() const { return C_; }
  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }

  /// Height of the meridian over radius rho, rho in [C^{-3/2}, rho_max].
  double u_of_rho(double rho) const {
    check_rho(rho);
    const double c = C_;
    const double y = std::cbrt(rho);
    const double s = std::sqrt(excess(rho));
    return 1.5 / c * (y * s + std::log(2.0 * (c * y + std::sqrt(c) * s)) / std::sqrt(c));
  }

  /// du/drho = (C rho^{2/3} - 1)^{-1/2}; infinite at the boundary radius.
  double du_drho(double rho) const {
    check_rho(rho);
    if (rho <= rho_min_) throw DomainError("du_drho: unbounded at rho = C^{-3/2}");
    return 1.0 / std::sqrt(excess(rho));
  }

  double u_min() const { return u_of_rho(rho_min_); }
  double u_max() const { return u_of_rho(rho_max_); }

  /// Inverse of u(rho) by safeguarded Newton iteration.
  double rho_of_u(double u) const {
    const double ulo = u_min(), uhi = u_max();
    if (u < ulo - 1e-13 * std::max(1.0, std::abs(ulo)) || u > uhi + 1e-13 * std::max(1.0, std::abs(uhi)))
      throw DomainError("rho_of_u: u outside [u(C^{-3/2}), u(rho_max)]");
    if (u <= ulo) return rho_min_;
    if (u >= uhi) return rho_max_;
    double a = rho_min_, b = rho_max_;
    // u - u_min grows like (rho - rho_min)^{1/2} near the boundary, so start
    // from the linear-in-u^2 guess.
    const double t = (u - ulo) / (uhi - ulo);
    double rho = a + (b - a) * t * t;
    for (int it = 0; it < 200; ++it) {
      const double g = u_of_rho(rho) - u;
      if (g > 0.0) b = rho; else a = rho;
      double next = rho;
      if (rho > rho_min_) next = rho - g / du_drho(rho);
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - rho) <= 1e-16 * rho || b - a <= 4e-16 * b) {
        rho = next;
        break;
      }
      rho = next;
    }
    return rho;
  }

  /// d rho/du = sqrt(C rho^{2/3} - 1) on the increasing branch.
  double rho_prime(double rho) const {
    check_rho(rho);
    return std::sqrt(excess(rho));
  }

  /// Closed-form mean curvature function f = trace A.
  double f_reference(double rho) const {
    check_rho(rho);
    return 2.0 / (3.0 * std::sqrt(C_) * std::pow(rho, 4.0 / 3.0));
  }

  /// Closed-form Gauss curvature.
  double gauss_reference(double rho) const {
    check_rho(rho);
    return -1.0 / (3.0 * C_ * std::pow(rho, 8.0 / 3.0));
  }

 private:
  // C rho^{2/3} - 1 = (rho / rho_min)^{2/3} - 1, without cancellation near rho_min.
  double excess(double rho) const {
    return std::max(0.0, std::expm1(2.0 / 3.0 * std::log(rho / rho_min_)));
  }

  void check_rho(double rho) const {
    if (!(rho >= rho_min_ * (1.0 - 1e-14)) || !(rho <= rho_max_ * (1.0 + 1e-14)))
      throw DomainError("rho outside (C^{-3/2}, rho_max]");
  }

  double C_;
  double rho_max_;
  double rho_min_;
};

inline RevolutionProfile revolution_profile(double C, double rho_max) {
  return RevolutionProfile(C, rho_max);
}

// ---------------------------------------------------------------------------
// Profile curves in totally geodesic S^2 / H^2.

enum class ProfileBranch { S2, H2_elliptic, H2_parabolic };

inline std::string to_string(ProfileBranch b) {
  switch (b) {
    case ProfileBranch::S2: return "S2";
    case ProfileBranch::H2_elliptic: return "H2_elliptic";
    case ProfileBranch::H2_parabolic: return "H2_parabolic";
  }
  return "?";
}

struct ProfilePoint {
  double u = 0.0;
  double k = 0.0;
  double kp = 0.0;
  AmbientVector sigma;
  AmbientVector tangent;  // sigma'
  AmbientVector normal;   // in-plane normal: tangent' = k normal - c sigma
};

struct ProfileDiagnostics {
  double model = 0.0;        // max |<sigma,sigma> - target|
  double unit_speed = 0.0;   // max |<T,T> - 1|
  double constraint1 = 0.0;  // max |<sigma,C1> - target(k)|
  double constraint2 = 0.0;  // max |<sigma,C2> - expected|
  double drift = 0.0;        // max relative prime-constant drift
  bool flagged = false;
};

// State layout: k, k', sigma[4], T[4], n[4].
inline constexpr std::size_t kFrameDim = 14;

class ProfileCurve {
 public:
  SpaceForm model;
  ProfileBranch branch = ProfileBranch::S2;
  double C = 0.0;
  AmbientVector C1;
  AmbientVector C2;
  std::shared_ptr<const CurvatureSolution> curvature;
  DenseTrajectory<kFrameDim> dense;
  ProfileDiagnostics diagnostics;
  bool truncated = false;

  double u_min() const { return dense.lo(); }
  double u_max() const { return dense.hi(); }

  /// Coefficient A in <sigma, C1> = A k^{-3/4}.
  double constraint_coefficient() const {
    if (branch == ProfileBranch::H2_parabolic)
      return -2.0 * std::numbers::sqrt2 / (3.0 * std::sqrt(-C));
    return 4.0 / (3.0 * std::sqrt(C));
  }

  /// Value <sigma(u), C1> must take for curvature k.
  double constraint_target(double k) const {
    return constraint_coefficient() * std::pow(k, -0.75);
  }

  /// Expected <sigma, C2>: 0 on circle-type branches, equal to <sigma, C1>
  /// on the parabolic branch.
  double constraint2_target(double k) const {
    return branch == ProfileBranch::H2_parabolic ? constraint_target(k) : 0.0;
  }

  /// Scale of the orbit term in X(u,v). Circle-type branches: 1/kappa2.
  /// Parabolic branch: 1/(sqrt(2) kappa2).
  double orbit_scale(double k) const {
    const double r = 1.0 / kappa2(k, C);
    return branch == ProfileBranch::H2_parabolic ? r / std::numbers::sqrt2 : r;
  }

  ProfilePoint at(double u) const {
    if (u < u_min() - 1e-12 || u > u_max() + 1e-12)
      throw DomainError("ProfileCurve: u outside the integrated span");
    const auto y = dense.eval(std::clamp(u, u_min(), u_max()));
    ProfilePoint p;
    p.u = u;
    p.k = y[0];
    p.kp = y[1];
    p.sigma = AmbientVector(model.ambient, std::span<const double>(y.data() + 2, 4));
    p.tangent = AmbientVector(model.ambient, std::span<const double>(y.data() + 6, 4));
    p.normal = AmbientVector(model.ambient, std::span<const double>(y.data() + 10, 4));
    return p;
  }

  /// Geodesic curvature of sigma inside the 2-space, <T', n>, from the frame.
  double geodesic_curvature(double u) const { return at(u).k; }

  std::vector<ProfilePoint> sample_uniform(int n) const {
    if (n < 2) throw UsageError("sample_uniform: need at least 2 points");
    std::vector<ProfilePoint> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(at(u_min() + (u_max() - u_min()) * i / (n - 1)));
    return out;
  }
};

namespace detail {

inline OdeState<kFrameDim> pack_frame(double k, double kp, const AmbientVector& s,
                                      const AmbientVector& t, const AmbientVector& n) {
  OdeState<kFrameDim> y{};
  y[0] = k;
  y[1] = kp;
  for (int i = 0; i < 4; ++i) {
    y[2 + i] = s[i];
    y[6 + i] = t[i];
    y[10 + i] = n[i];
  }
  return y;
}

}  // namespace detail

/// Frame-integrate the profile curve for a given curvature solution.
inline ProfileCurve reconstruct_profile(std::shared_ptr<const CurvatureSolution> sol,
                                        ProfileBranch branch, double C) {
  if (!sol) throw UsageError("reconstruct_profile: null curvature solution");
  const int c = sol->c;
  const bool parabolic = branch == ProfileBranch::H2_parabolic;
  if (branch == ProfileBranch::S2 && c != 1)
    throw UsageError("reconstruct_profile: S2 branch needs a c = +1 curvature solution");
  if (branch != ProfileBranch::S2 && c != -1)
    throw UsageError("reconstruct_profile: H2 branches need a c = -1 curvature solution");
  if (parabolic ? !(C < 0.0) : !(C > 0.0))
    throw UsageError(parabolic ? "reconstruct_profile: parabolic branch requires C < 0"
                               : "reconstruct_profile: circle-type branch requires C > 0");
  if (std::abs(C - sol->C) > 1e-9 * std::max(1.0, std::abs(C)))
    throw UsageError("reconstruct_profile: C does not match the curvature solution");

  const double k0 = sol->k0, kp0 = sol->kp0;
  const double kpp0 = ode_rhs(k0, kp0, c);
  if (kp0 == 0.0 && kpp0 == 0.0)
    throw ConstructionError("reconstruct_profile: constant curvature solution (CMC case)");

  ProfileCurve prof;
  prof.model = SpaceForm::from_curvature(c);
  prof.branch = branch;
  prof.C = C;
  prof.curvature = sol;
  const Signature sig = prof.model.ambient;
  auto e = [&](int i) { return AmbientVector::basis(sig, i); };

  switch (branch) {
    case ProfileBranch::S2:
      prof.C1 = e(2);
      prof.C2 = e(3);
      break;
    case ProfileBranch::H2_elliptic:
      prof.C1 = e(1);
      prof.C2 = e(0);
      break;
    case ProfileBranch::H2_parabolic:
      prof.C1 = e(0) + e(3);
      prof.C2 = e(1) + e(3);
      break;
  }

  // Constraint function rho(u) = A k^{-3/4} and its first two derivatives.
  const double A = prof.constraint_coefficient();
  const double q = kp0 / k0;
  const double r0 = A * std::pow(k0, -0.75);
  const double r1 = -0.75 * r0 * q;
  const double r2 = r0 * (21.0 / 16.0 * q * q - 0.75 * kpp0 / k0);

  AmbientVector s0(sig), t0(sig), plane_normal(sig);
  double n_c1 = 0.0;  // required <n, C1>
  switch (branch) {
    case ProfileBranch::S2: {
      const double x2 = 1.0 - r0 * r0;
      if (!(x2 > 0.0))
        throw ConstructionError(
            "reconstruct_profile: infeasible start, need 1 - 16/(9C) k0^{-3/2} > 0");
      const double x0 = std::sqrt(x2);
      const double a = -r0 * r1 / x0;
      const double b2 = 1.0 - a * a - r1 * r1;
      if (b2 < 0.0)
        throw ConstructionError(
            "reconstruct_profile: infeasible start, unit speed needs "
            "1 - (d/du <sigma,C1>)^2 - a^2 >= 0");
      s0 = AmbientVector(sig, {x0, 0.0, r0, 0.0});
      t0 = AmbientVector(sig, {a, std::sqrt(b2), r1, 0.0});
      plane_normal = prof.C2;
      n_c1 = (r2 + r0) / k0;
      break;
    }
    case ProfileBranch::H2_elliptic: {
      const double y0 = std::sqrt(1.0 + r0 * r0);
      const double b = r0 * r1 / y0;
      const double a2 = 1.0 + b * b - r1 * r1;
      if (a2 < 0.0)
        throw ConstructionError(
            "reconstruct_profile: infeasible start, unit speed needs 1 + b^2 - r'^2 >= 0");
      s0 = AmbientVector(sig, {0.0, r0, 0.0, y0});
      t0 = AmbientVector(sig, {0.0, r1, std::sqrt(a2), b});
      plane_normal = prof.C2;
      n_c1 = (r2 - r0) / k0;
      break;
    }
    case ProfileBranch::H2_parabolic: {
      const double disc = 2.0 * r0 * r0 - 1.0;
      if (disc < 0.0)
        throw ConstructionError(
            "reconstruct_profile: infeasible start, need 8/(9|C|) k0^{-3/2} >= 1/2");
      const double y0 = -2.0 * r0 + std::sqrt(disc);
      const double den = y0 + 2.0 * r0;
      if (!(std::abs(den) > 1e-12))
        throw ConstructionError("reconstruct_profile: degenerate parabolic start");
      const double b = -2.0 * (y0 + r0) * r1 / den;
      const double a2 = 1.0 - 2.0 * (b + r1) * (b + r1) + b * b;
      if (a2 < 0.0)
        throw ConstructionError(
            "reconstruct_profile: infeasible start, unit speed has no real solution");
      s0 = AmbientVector(sig, {y0 + r0, y0 + r0, 0.0, y0});
      t0 = AmbientVector(sig, {b + r1, b + r1, std::sqrt(a2), b});
      plane_normal = prof.C1 - prof.C2;
      n_c1 = (r2 - r0) / k0;
      break;
    }
  }

  AmbientVector n0 = orthonormal_complement({s0, t0, plane_normal});
  if (inner(n0, prof.C1) * n_c1 < 0.0) n0 *= -1.0;
  if (std::abs(inner(n0, prof.C1) - n_c1) > 1e-8 * std::max(1.0, std::abs(n_c1)))
    throw ConstructionError(
        "reconstruct_profile: initial data violate the curvature compatibility "
        "<n, C1> = (rho'' " + std::string(c > 0 ? "+" : "-") + " rho)/k");

  const double cc = static_cast<double>(c);
  auto rhs = [c, cc](double, const OdeState<kFrameDim>& y) {
    OdeState<kFrameDim> d{};
    const double k = y[0];
    if (!(k > 0.0)) {
      d[0] = std::numeric_limits<double>::quiet_NaN();
      return d;
    }
    d[0] = y[1];
    d[1] = (1.75 * y[1] * y[1] + (4.0 * c / 3.0) * k * k - 4.0 * k * k * k * k) / k;
    for (int i = 0; i < 4; ++i) {
      d[2 + i] = y[6 + i];
      d[6 + i] = k * y[10 + i] - cc * y[2 + i];
      d[10 + i] = -k * y[6 + i];
    }
    return d;
  };
  auto outside = [C, c](double, const OdeState<kFrameDim>& y) {
    if (y[0] < 1e-8) return true;
    const double p = prime_polynomial(y[0], C, c);
    return p < -1e-8 * std::max(1.0, std::abs(C) * std::pow(y[0], 3.5));
  };

  OdeOptions opt;
  opt.rtol = sol->rel_tol;
  opt.atol = sol->abs_tol;
  const auto y0 = detail::pack_frame(k0, kp0, s0, t0, n0);
  const auto fwd = dop853_integrate<kFrameDim>(rhs, 0.0, y0, sol->u_max(), opt, outside);
  const auto bwd = dop853_integrate<kFrameDim>(rhs, 0.0, y0, sol->u_min(), opt, outside);
  prof.truncated = fwd.status != OdeStatus::completed || bwd.status != OdeStatus::completed;
  prof.dense = DenseTrajectory<kFrameDim>(bwd, fwd, 0.0, y0);

  // Diagnostics at the step points.
  const double target = *prof.model.constraint();
  auto check = [&](double u) {
    const ProfilePoint p = prof.at(u);
    auto& d = prof.diagnostics;
    d.model = std::max(d.model, std::abs(inner(p.sigma, p.sigma) - target));
    d.unit_speed = std::max(d.unit_speed, std::abs(inner(p.tangent, p.tangent) - 1.0));
    d.constraint1 = std::max(d.constraint1, std::abs(inner(p.sigma, prof.C1) - prof.constraint_target(p.k)));
    d.constraint2 = std::max(d.constraint2, std::abs(inner(p.sigma, prof.C2) - prof.constraint2_target(p.k)));
    d.drift = std::max(d.drift, std::abs(prime_constant(p.k, p.kp, c) - C) / std::abs(C));
  };
  for (const auto& s : prof.dense.segments()) check(s.lo());
  check(prof.u_max());
  prof.diagnostics.flagged = prof.diagnostics.model > 1e-8 || prof.diagnostics.unit_speed > 1e-8 ||
                             prof.diagnostics.constraint1 > 1e-6 ||
                             prof.diagnostics.constraint2 > 1e-6;
  return prof;
}

inline ProfileCurve reconstruct_profile(const CurvatureSolution& sol, ProfileBranch branch, double C) {
  return reconstruct_profile(std::make_shared<const CurvatureSolution>(sol), branch, C);
}

// ---------------------------------------------------------------------------
// Independent oracle for the S^2 branch: with C1 = e3, C2 = e4 the profile is
// sigma = (x, y, 4/(3 sqrt C) k^{-3/4}, 0) and on a monotone arc x solves the
// first-order equation dx/dk = 12 x / (k D) +/- 36 sqrt(9 C k^{3/2} (1 - x^2) - 16) / (D sqrt(E))
// with D = 9 C k^{3/2} - 16 and E = 9 C k^{3/2} - 144 k^2 - 16.

class DxDkOracle {
 public:
  double C = 0.0;
  int sign = 1;    // branch of the +/- term
  int y_sign = 1;  // branch of y = +/- sqrt(1 - x^2 - 16/(9C) k^{-3/2})
  double k_from = 0.0;
  double k_to = 0.0;
  DenseTrajectory<1> dense;

  double x(double k) const { return dense.eval(k)[0]; }

  double y(double k) const {
    const double xx = x(k);
    const double arg = 1.0 - xx * xx - 16.0 / (9.0 * C) * std::pow(k, -1.5);
    if (arg < -1e-12) throw ConstructionError("dxdk oracle: y^2 < 0");
    return y_sign * std::sqrt(std::max(0.0, arg));
  }

  static double slope(double k, double x, double C, int sign) {
    const double k32 = std::pow(k, 1.5);
    const double D = 9.0 * C * k32 - 16.0;
    const double E = 9.0 * C * k32 - 144.0 * k * k - 16.0;
    const double G = -9.0 * C * k32 * x * x + 9.0 * C * k32 - 16.0;
    if (G < 0.0 || E <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 12.0 * x / (k * D) + sign * 36.0 * std::sqrt(G) / (D * std::sqrt(E));
  }
};

inline DxDkOracle profile_oracle_dxdk(double x0, std::pair<double, double> k_range, double C,
                                      int sign, double rel_tol = 1e-12, double abs_tol = 1e-14) {
  if (!(C > 0.0)) throw UsageError("dxdk oracle: C must be positive (S^2 branch)");
  if (sign != 1 && sign != -1) throw UsageError("dxdk oracle: sign must be +1 or -1");
  const auto [ka, kb] = k_range;
  if (!(ka > 0.0 && kb > 0.0) || ka == kb) throw UsageError("dxdk oracle: bad k range");

  auto D = [C](double k) { return 9.0 * C * std::pow(k, 1.5) - 16.0; };
  if ((D(ka) > 0.0) != (D(kb) > 0.0) || D(ka) == 0.0 || D(kb) == 0.0)
    throw DomainError("dxdk oracle: 9 C k^{3/2} = 16 inside the range, split it");
  // A turning point of k (k' = 0) inside the range means P(k) <= 0 somewhere.
  const auto iv = admissible_interval(C, 1);
  const double klo = std::min(ka, kb), khi = std::max(ka, kb);
  if (!(klo > iv.lo && khi < iv.hi))
    throw DomainError("dxdk oracle: range reaches a turning point of k, split it");

  const double G0 = 9.0 * C * std::pow(ka, 1.5) * (1.0 - x0 * x0) - 16.0;
  if (G0 < 0.0) throw ConstructionError("dxdk oracle: infeasible x0, square-root argument negative");

  DxDkOracle o;
  o.C = C;
  o.sign = sign;
  o.k_from = ka;
  o.k_to = kb;
  auto rhs = [C, sign](double k, const OdeState<1>& y) -> OdeState<1> {
    return {DxDkOracle::slope(k, y[0], C, sign)};
  };
  OdeOptions opt;
  opt.rtol = rel_tol;
  opt.atol = abs_tol;
  const OdeState<1> y0{x0};
  const auto run = dop853_integrate<1>(rhs, ka, y0, kb, opt);
  if (run.status != OdeStatus::completed)
    throw NumericalError("dxdk oracle: integration did not reach the end of the range");
  OdeResult<1> empty;
  empty.t_end = ka;
  o.dense = ka < kb ? DenseTrajectory<1>(empty, run, ka, y0) : DenseTrajectory<1>(run, empty, ka, y0);
  return o;
}

/// Oracle for the arc [u_a, u_b] of an S2 profile. Both branches of the +/-
/// term are tried; the one whose slope at u_a matches the frame solution's
/// x'(u)/k'(u) is kept.
inline DxDkOracle match_dxdk_oracle(const ProfileCurve& prof, double u_a, double u_b) {
  if (prof.branch != ProfileBranch::S2) throw UsageError("dxdk oracle: S2 branch only");
  const ProfilePoint pa = prof.at(u_a);
  const ProfilePoint pb = prof.at(u_b);
  if (pa.kp == 0.0) throw DomainError("dxdk oracle: k' = 0 at the start of the arc");
  const double frame_slope = pa.tangent[0] / pa.kp;
  int best = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (int s : {1, -1}) {
    const double e = std::abs(DxDkOracle::slope(pa.k, pa.sigma[0], prof.C, s) - frame_slope);
    if (e < best_err) {
      best_err = e;
      best = s;
    }
  }
  DxDkOracle o = profile_oracle_dxdk(pa.sigma[0], {pa.k, pb.k}, prof.C, best);
  o.y_sign = pa.sigma[1] < 0.0 ? -1 : 1;
  return o;
}

}  // namespace bicons
