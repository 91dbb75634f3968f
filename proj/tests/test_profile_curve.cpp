#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <memory>

#include "bicons/profile_curve.hpp"

using namespace bicons;

namespace {

// Independent value of u(rho) - u(C^{-3/2}) by quadrature of u'(rho). The
// integrand is singular at a = C^{-3/2}; the complement argument gives x - a
// without cancellation there.
double u_by_quadrature(double C, double b) {
  const double a = std::pow(C, -1.5);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto du = [a, b](double x, double xc) {
    const double t = x < 0.5 * (a + b) ? -xc / a : (x - a) / a;
    return 1.0 / std::sqrt(std::expm1(2.0 / 3.0 * std::log1p(t)));
  };
  return ts.integrate(du, a, b, 1e-14);
}

std::shared_ptr<const CurvatureSolution> solve(int c, double k0, double kp0) {
  return std::make_shared<const CurvatureSolution>(solve_curvature(c, k0, kp0, {-1, 1}));
}

}  // namespace

TEST(RevolutionProfile, ClosedFormAtEight) {
  const auto rp = revolution_profile(1.0, 8.0);
  const double hand = 1.5 * (2.0 * std::sqrt(3.0) + std::log(2.0 * (2.0 + std::sqrt(3.0))));
  EXPECT_NEAR(rp.u_of_rho(8.0), hand, 1e-13);
  EXPECT_NEAR(rp.u_of_rho(8.0), 8.2113100389337749, 1e-13);
}

TEST(RevolutionProfile, AgreesWithQuadrature) {
  for (double C : {1.0, 1.5, 2.0, 5.0}) {
    const auto rp = revolution_profile(C, 8.0);
    const double num = u_by_quadrature(C, 8.0);
    EXPECT_NEAR(rp.u_of_rho(8.0) - rp.u_min(), num, 1e-9) << "C=" << C;
  }
}

TEST(RevolutionProfile, BoundaryLimit) {
  const auto rp = revolution_profile(1.0, 8.0);
  EXPECT_NEAR(rp.u_of_rho(1.0), 1.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(rp.u_of_rho(1.0 + 1e-12), 1.5 * std::log(2.0), 1e-5);
  const auto r2 = revolution_profile(2.0, 8.0);
  EXPECT_NEAR(r2.u_min(), 1.5 / std::pow(2.0, 1.5) * std::log(2.0 * std::sqrt(2.0)), 1e-14);
}

TEST(RevolutionProfile, InverseRoundTrip) {
  const auto rp = revolution_profile(1.0, 8.0);
  EXPECT_NEAR(rp.rho_of_u(rp.u_of_rho(5.0)), 5.0, 1e-10);
  for (double rho = 1.001; rho <= 8.0; rho += 0.37) EXPECT_NEAR(rp.rho_of_u(rp.u_of_rho(rho)), rho, 1e-10 * rho);
  EXPECT_DOUBLE_EQ(rp.rho_of_u(rp.u_min()), rp.rho_min());
}

TEST(RevolutionProfile, StrictlyIncreasingWithExpectedSlope) {
  const auto rp = revolution_profile(1.5, 6.0);
  double prev = rp.u_min();
  for (int i = 1; i <= 200; ++i) {
    const double rho = rp.rho_min() + (rp.rho_max() - rp.rho_min()) * i / 200.0;
    const double u = rp.u_of_rho(rho);
    EXPECT_GT(u, prev);
    prev = u;
    if (i < 200 && rho > 1.1 * rp.rho_min()) {
      const double h = 1e-5 * rho;
      const double fd = (rp.u_of_rho(rho + h) - rp.u_of_rho(rho - h)) / (2 * h);
      EXPECT_NEAR(fd, rp.du_drho(rho), 1e-7 * rp.du_drho(rho));
    }
  }
}

TEST(RevolutionProfile, InverseSolvesMeridianEquation) {
  // 3 rho rho'' = 1 + rho'^2 along u -> rho(u), derivatives by differences.
  const auto rp = revolution_profile(1.0, 8.0);
  const double h = 4e-2;
  auto d1 = [&](double u, double s) { return (rp.rho_of_u(u + s) - rp.rho_of_u(u - s)) / (2 * s); };
  auto d2 = [&](double u, double s) {
    return (rp.rho_of_u(u + s) - 2 * rp.rho_of_u(u) + rp.rho_of_u(u - s)) / (s * s);
  };
  double worst = 0.0;
  for (double u = rp.u_of_rho(1.5); u <= rp.u_max() - 2 * h; u += 0.05) {
    const double rho = rp.rho_of_u(u);
    const double r1 = (4 * d1(u, h / 2) - d1(u, h)) / 3;
    const double r2 = (4 * d2(u, h / 2) - d2(u, h)) / 3;
    worst = std::max(worst, std::abs(3 * rho * r2 - 1 - r1 * r1));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(RevolutionProfile, ReferenceCurvatures) {
  const auto rp = revolution_profile(1.0, 9.0);
  EXPECT_NEAR(rp.f_reference(8.0), 1.0 / 24.0, 1e-16);
  EXPECT_NEAR(rp.gauss_reference(8.0), -1.0 / 768.0, 1e-17);
  EXPECT_NEAR(rp.gauss_reference(8.0), -0.75 * std::pow(rp.f_reference(8.0), 2), 1e-17);
}

TEST(RevolutionProfile, DomainErrors) {
  EXPECT_THROW(revolution_profile(0.0, 8.0), DomainError);
  EXPECT_THROW(revolution_profile(1.0, 0.5), DomainError);
  const auto rp = revolution_profile(1.0, 8.0);
  EXPECT_THROW(rp.u_of_rho(0.9), DomainError);
  EXPECT_THROW(rp.u_of_rho(8.5), DomainError);
  EXPECT_THROW(rp.du_drho(1.0), DomainError);
  EXPECT_THROW(rp.rho_of_u(rp.u_max() + 1.0), DomainError);
}

TEST(ProfileCurve, SphereInitialConstraint) {
  const auto prof = reconstruct_profile(solve(1, 1, 1), ProfileBranch::S2, 169.0 / 9.0);
  const auto p0 = prof.at(0.0);
  EXPECT_NEAR(p0.sigma[2], 4.0 / 13.0, 1e-15);
  EXPECT_DOUBLE_EQ(p0.sigma[1], 0.0);
  EXPECT_GT(p0.sigma[0], 0.0);
  EXPECT_GT(p0.tangent[1], 0.0);
}

void expect_invariants(const ProfileCurve& prof) {
  const double target = *prof.model.constraint();
  const bool parabolic = prof.branch == ProfileBranch::H2_parabolic;
  double c1 = 0, c2 = 0, model = 0, speed = 0;
  for (const auto& p : prof.sample_uniform(801)) {
    c1 = std::max(c1, std::abs(inner(p.sigma, prof.C1) - prof.constraint_target(p.k)));
    c2 = std::max(c2, std::abs(inner(p.sigma, prof.C2) - prof.constraint2_target(p.k)));
    model = std::max(model, std::abs(inner(p.sigma, p.sigma) - target));
    speed = std::max(speed, std::abs(inner(p.tangent, p.tangent) - 1.0));
  }
  EXPECT_LT(c1, 1e-6);
  EXPECT_LT(c2, parabolic ? 1e-6 : 1e-8);
  EXPECT_LT(model, 1e-8);
  EXPECT_LT(speed, 1e-8);
  EXPECT_FALSE(prof.diagnostics.flagged);
}

TEST(ProfileCurve, SphereInvariants) {
  expect_invariants(reconstruct_profile(solve(1, 1, 1), ProfileBranch::S2, 169.0 / 9.0));
}

TEST(ProfileCurve, HyperbolicEllipticInvariants) {
  const auto prof = reconstruct_profile(solve(-1, 1, 1), ProfileBranch::H2_elliptic, 137.0 / 9.0);
  expect_invariants(prof);
  for (const auto& p : prof.sample_uniform(101)) EXPECT_GT(p.sigma[3], 0.0);
}

TEST(ProfileCurve, HyperbolicParabolicInvariants) {
  const auto prof = reconstruct_profile(solve(-1, 0.25, 0.2), ProfileBranch::H2_parabolic, -248.0 / 225.0);
  expect_invariants(prof);
  for (const auto& p : prof.sample_uniform(101)) EXPECT_GT(p.sigma[3], 0.0);
}

TEST(ProfileCurve, ParabolicInitialConstraintRegression) {
  const auto prof = reconstruct_profile(solve(-1, 0.25, 0.2), ProfileBranch::H2_parabolic, -248.0 / 225.0);
  const double direct = -2.0 * std::sqrt(2.0) / (3.0 * std::sqrt(248.0 / 225.0) * std::pow(0.25, 0.75));
  const double v = inner(prof.at(0.0).sigma, prof.C1);
  EXPECT_NEAR(v, direct, 1e-14);
  EXPECT_NEAR(v, -2.5400025400038099, 1e-12);
  EXPECT_NEAR(inner(prof.at(0.0).sigma, prof.C2), v, 1e-14);
}

TEST(ProfileCurve, GeodesicCurvatureMatchesSolution) {
  struct Case {
    int c;
    double k0, kp0;
    ProfileBranch b;
  };
  for (const Case cs : {Case{1, 1, 1, ProfileBranch::S2}, Case{-1, 1, 1, ProfileBranch::H2_elliptic},
                        Case{-1, 0.25, 0.2, ProfileBranch::H2_parabolic}}) {
    const auto sol = solve(cs.c, cs.k0, cs.kp0);
    const auto prof = reconstruct_profile(sol, cs.b, sol->C);
    const double h = 1e-3;
    double worst = 0;
    for (double u = -0.9; u <= 0.9; u += 0.05) {
      const auto sm = prof.at(u - h).sigma, s0 = prof.at(u).sigma, sp = prof.at(u + h).sigma;
      // Covariant acceleration inside the 2-space: sigma'' + c sigma.
      const AmbientVector acc = (sp - 2.0 * s0 + sm) / (h * h) + static_cast<double>(cs.c) * s0;
      worst = std::max(worst, std::abs(metric_norm(acc) - sol->k(u)));
    }
    EXPECT_LT(worst, 1e-5) << to_string(cs.b);
  }
}

TEST(ProfileCurve, Preconditions) {
  const auto s3 = solve(1, 1, 1);
  const auto h3 = solve(-1, 1, 1);
  EXPECT_THROW(reconstruct_profile(s3, ProfileBranch::H2_elliptic, s3->C), UsageError);
  EXPECT_THROW(reconstruct_profile(h3, ProfileBranch::S2, h3->C), UsageError);
  EXPECT_THROW(reconstruct_profile(h3, ProfileBranch::H2_parabolic, h3->C), UsageError);
  EXPECT_THROW(reconstruct_profile(s3, ProfileBranch::S2, 20.0), UsageError);
  EXPECT_THROW(reconstruct_profile(nullptr, ProfileBranch::S2, 1.0), UsageError);
  // Constant solution k = 1/sqrt(3) of the c = +1 equation: a double root
  // of P, so there is no admissible interval to integrate over.
  EXPECT_THROW(solve(1, 1.0 / std::sqrt(3.0), 0.0), DomainError);
}

TEST(DxDkOracle, AgreesWithFrameIntegration) {
  const auto sol = solve(1, 1, 1);
  const auto prof = reconstruct_profile(sol, ProfileBranch::S2, sol->C);
  const double ua = 0.02, ub = 0.28;  // k' > 0 up to the turning point near 0.297
  const auto o = match_dxdk_oracle(prof, ua, ub);
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double u = ua + (ub - ua) * i / 200.0;
    const auto p = prof.at(u);
    worst = std::max(worst, std::abs(p.sigma[0] - o.x(p.k)));
    worst = std::max(worst, std::abs(p.sigma[1] - o.y(p.k)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(DxDkOracle, SlopeNeverVanishes) {
  const auto sol = solve(1, 1, 1);
  const auto prof = reconstruct_profile(sol, ProfileBranch::S2, sol->C);
  const auto o = match_dxdk_oracle(prof, 0.02, 0.28);
  for (int i = 0; i <= 100; ++i) {
    const double k = o.k_from + (o.k_to - o.k_from) * i / 100.0;
    EXPECT_NE(DxDkOracle::slope(k, o.x(k), sol->C, o.sign), 0.0);
  }
}

TEST(DxDkOracle, RejectsBadRanges) {
  const double C = 169.0 / 9.0;
  const auto iv = admissible_interval(C, 1);
  // Crosses the upper turning point.
  EXPECT_THROW(profile_oracle_dxdk(0.9, {1.0, iv.hi + 0.01}, C, 1), DomainError);
  // 9 C k^{3/2} = 16 inside the range.
  EXPECT_THROW(profile_oracle_dxdk(0.9, {0.2, 0.5}, C, 1), DomainError);
  // Square-root argument negative at the start.
  EXPECT_THROW(profile_oracle_dxdk(0.999, {1.0, 1.1}, C, 1), ConstructionError);
  EXPECT_THROW(profile_oracle_dxdk(0.5, {1.0, 1.1}, C, 0), UsageError);
}
