// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and
// runtime budgets are pinned here, independent of the library defaults.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "bicons/commands.hpp"

using namespace bicons;
namespace fs = std::filesystem;

namespace {

namespace pin {
constexpr double prime_rel = 1e-12;
constexpr double drift_rel = 1e-8;
constexpr double closed_form = 1e-8;
constexpr double quadrature = 1e-9;
constexpr double constraint = 1e-6;
constexpr double constraint2 = 1e-8;
constexpr double model = 1e-8;
constexpr double identity = 1e-5;
constexpr double pde = 1e-4;
constexpr double bitension_floor = 1e-3;
constexpr double cmc_bitension = 1e-10;
constexpr double oracle = 1e-6;
constexpr double turning = 1e-6;

// Frozen grid minima of |normal bitension| (first computation: S3 0.40,
// H3 elliptic 1.34, H3 parabolic 0.385, R3 9.8e-4).
const std::map<std::string, double> bitension_frozen{
    {"S3", 0.3}, {"H3Elliptic", 1.0}, {"H3Parabolic", 0.3}, {"R3Revolution", 5e-4}};

constexpr double t_prime = 0.1;
constexpr double t_r3 = 1.0;
constexpr double t_quad = 0.1;
constexpr double t_s3 = 2.0;
constexpr double t_h3 = 2.0;
constexpr double t_identity = 5.0;
}  // namespace pin

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const char* fmt, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [!]";
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double t = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-34s %.3fs  %s\n", o.pass ? "PASS" : "FAIL", n, title, t, o.detail.c_str());
  std::fflush(stdout);
}

PipelineConfig pipeline_config(const std::string& model, double k0, double kp0) {
  PipelineConfig c;
  c.model = model;
  c.k0 = k0;
  c.kp0 = kp0;
  return c;
}

const std::map<std::string, PipelineConfig>& curved_cases() {
  static const std::map<std::string, PipelineConfig> m{{"S3", pipeline_config("s3", 1, 1)},
                                                        {"H3Elliptic", pipeline_config("h3", 1, 1)},
                                                        {"H3Parabolic", pipeline_config("h3", 0.25, 0.2)}};
  return m;
}

std::map<std::string, VerificationReport> reports;

double max_over_grid(const SurfacePatch& p, int n, const std::function<double(const AmbientVector&)>& fn) {
  double worst = 0.0;
  const GridSpec g{n, n, p.rect};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) worst = std::max(worst, fn(p.X(g.u(i), g.v(j))));
  return worst;
}

double profile_constraint_max(const ProfileCurve& prof, bool second) {
  double worst = 0.0;
  for (const auto& q : prof.sample_uniform(2001)) {
    const double r = second ? inner(q.sigma, prof.C2) - prof.constraint2_target(q.k)
                            : inner(q.sigma, prof.C1) - prof.constraint_target(q.k);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SurfacePatch small_sphere(double r) {
  const Signature E4 = Signature::euclidean(4);
  const double w = std::sqrt(1 - r * r);
  SurfacePatch p;
  p.tag = SurfaceCase::S3;
  p.model = SpaceForm::s3();
  p.rect = {0.5, 2.5, 0, 2 * std::numbers::pi};
  p.X = [=](double u, double v) {
    return AmbientVector(E4, {r * std::sin(u) * std::cos(v), r * std::sin(u) * std::sin(v), r * std::cos(u), w});
  };
  p.Xu = [=](double u, double v) {
    return AmbientVector(E4, {r * std::cos(u) * std::cos(v), r * std::cos(u) * std::sin(v), -r * std::sin(u), 0});
  };
  p.Xv = [=](double u, double v) {
    return AmbientVector(E4, {-r * std::sin(u) * std::sin(v), r * std::sin(u) * std::cos(v), 0, 0});
  };
  return p;
}

SurfacePatch plane() {
  const Signature E3 = Signature::euclidean(3);
  SurfacePatch p;
  p.model = SpaceForm::r3();
  p.rect = {-1, 1, -1, 1};
  p.X = [=](double u, double v) { return AmbientVector(E3, {u, v, 0}); };
  p.Xu = [=](double, double) { return AmbientVector(E3, {1, 0, 0}); };
  p.Xv = [=](double, double) { return AmbientVector(E3, {0, 1, 0}); };
  return p;
}

}  // namespace

int main() {
  criterion(1, "prime-constant regression", [] {
    Outcome o;
    struct Case {
      double k, kp;
      int c;
      double C;
    };
    for (const Case cs : {Case{1, 1, 1, 169.0 / 9.0}, Case{1, 1, -1, 137.0 / 9.0}, Case{0.25, 0.2, -1, -248.0 / 225.0}}) {
      const auto t0 = Clock::now();
      const double C = prime_constant(cs.k, cs.kp, cs.c);
      const double rel = std::abs(C - cs.C) / std::abs(cs.C);
      const auto sol = solve_curvature(cs.c, cs.k, cs.kp, {-1, 1}, defaults::rel_tol, defaults::abs_tol);
      const double t = seconds_since(t0);
      o.check(rel <= pin::prime_rel, "C rel %.1e", rel);
      o.check(sol.max_drift < pin::drift_rel && !sol.truncated, "drift %.1e", sol.max_drift);
      o.check(t < pin::t_prime, "%.3fs", t);
    }
    return o;
  });

  criterion(2, "R3 closed-form pipeline", [] {
    Outcome o;
    const auto t0 = Clock::now();
    PipelineConfig cfg = pipeline_config("r3", 1, 1);
    cfg.C = 1.0;
    cfg.rho_min = 1.5;
    cfg.rho_max = 8.0;
    const Pipeline p = build_pipeline(cfg);
    const auto rep = verify_pipeline(p);
    o.check(rep.grid.nu == 64 && rep.grid.nv == 64, "grid %gx%g", rep.grid.nu, rep.grid.nv);
    o.check(rep.at("biconservative").max < pin::closed_form, "bicons %.1e", rep.at("biconservative").max);
    o.check(rep.at("gauss").max < pin::closed_form, "K+3f^2/4 %.1e", rep.at("gauss").max);
    o.check(rep.at("f_reference").max < pin::closed_form, "f-ref %.1e", rep.at("f_reference").max);
    // 3 rho rho'' - 1 - rho'^2 along u -> rho(u), with differences of the inverse.
    const auto& rp = *p.revolution;
    // Large enough that roundoff in rho(u), amplified by 1/h^2, stays below 1e-9.
    const double h = 4e-2;
    double ode = 0.0;
    for (double u = rp.u_of_rho(1.5); u <= rp.u_max() - 2 * h; u += 0.01) {
      auto d1 = [&](double s) { return (rp.rho_of_u(u + s) - rp.rho_of_u(u - s)) / (2 * s); };
      auto d2 = [&](double s) { return (rp.rho_of_u(u + s) - 2 * rp.rho_of_u(u) + rp.rho_of_u(u - s)) / (s * s); };
      const double r1 = (4 * d1(h / 2) - d1(h)) / 3, r2 = (4 * d2(h / 2) - d2(h)) / 3;
      ode = std::max(ode, std::abs(3 * rp.rho_of_u(u) * r2 - 1 - r1 * r1));
    }
    o.check(ode < pin::closed_form, "meridian ODE %.1e", ode);
    const double t = seconds_since(t0);
    o.check(t < pin::t_r3, "%.3fs", t);
    reports.emplace("R3Revolution", rep);
    return o;
  });

  criterion(3, "u(rho) quadrature and C ordering", [] {
    Outcome o;
    const auto t0 = Clock::now();
    const auto rp = revolution_profile(1.0, 8.0);
    boost::math::quadrature::tanh_sinh<double> ts;
    // Singular at rho = 1; the complement argument gives rho - 1 exactly.
    auto du = [](double r, double rc) {
      const double t = r < 4.5 ? -rc : r - 1.0;
      return 1.0 / std::sqrt(std::expm1(2.0 / 3.0 * std::log1p(t)));
    };
    const double num = 1.5 * std::log(2.0) + ts.integrate(du, 1.0, 8.0, 1e-14);
    const double diff = std::abs(rp.u_of_rho(8.0) - num);
    o.check(diff < pin::quadrature, "|u(8) - quad| %.1e", diff);
    double prev = INFINITY;
    bool ordered = true;
    for (double C : {1.0, 1.5, 2.0}) {
      const double u8 = revolution_profile(C, 8.0).u_of_rho(8.0);
      ordered = ordered && u8 < prev;
      prev = u8;
    }
    o.check(ordered, "u(8) decreasing in C: %g", ordered ? 1.0 : 0.0);
    const double t = seconds_since(t0);
    o.check(t < pin::t_quad, "%.3fs", t);
    return o;
  });

  criterion(4, "S3 constraints", [] {
    Outcome o;
    const auto t0 = Clock::now();
    const Pipeline p = build_pipeline(curved_cases().at("S3"));
    const auto& prof = *p.profile;
    o.check(profile_constraint_max(prof, false) < pin::constraint, "<s,C1> %.1e", profile_constraint_max(prof, false));
    o.check(profile_constraint_max(prof, true) < pin::constraint2, "<s,C2> %.1e", profile_constraint_max(prof, true));
    double s2 = 0.0;
    for (const auto& q : prof.sample_uniform(2001)) s2 = std::max(s2, std::abs(inner(q.sigma, q.sigma) - 1.0));
    o.check(s2 < pin::model, "|s|^2-1 %.1e", s2);
    const double x2 = max_over_grid(*p.patch, 64, [](const AmbientVector& x) { return std::abs(inner(x, x) - 1.0); });
    o.check(x2 < pin::model, "|X|^2-1 %.1e", x2);
    const double t = seconds_since(t0);
    o.check(t < pin::t_s3, "%.3fs", t);
    return o;
  });

  criterion(5, "H3 elliptic and parabolic branches", [] {
    Outcome o;
    for (const char* name : {"H3Elliptic", "H3Parabolic"}) {
      const auto t0 = Clock::now();
      const Pipeline p = build_pipeline(curved_cases().at(name));
      const double xx = max_over_grid(*p.patch, 64, [](const AmbientVector& x) {
        return std::abs(inner(x, x) + 1.0) / std::max(1.0, x[3] * x[3]);
      });
      const double x4 = 1.0 / max_over_grid(*p.patch, 64, [](const AmbientVector& x) { return 1.0 / x[3]; });
      o.check(xx < pin::model, "<X,X>+1 %.1e", xx);
      o.check(x4 > 0.0, "min x4 %.3g", x4);
      const double c1 = profile_constraint_max(*p.profile, false), c2 = profile_constraint_max(*p.profile, true);
      o.check(c1 < pin::constraint && c2 < pin::constraint, "C1 %.1e, C2 %.1e", c1, c2);
      const double t = seconds_since(t0);
      o.check(t < pin::t_h3, "%.3fs", t);
    }
    return o;
  });

  criterion(6, "intrinsic identities on S3/H3", [] {
    Outcome o;
    for (const auto& [name, cfg] : curved_cases()) {
      const auto t0 = Clock::now();
      const auto rep = verify_pipeline(build_pipeline(cfg));
      const double t = seconds_since(t0);
      double worst = 0.0;
      for (const char* r : {"biconservative", "gauss", "norm_A2", "eigenvalues", "f_vs_2k", "x2f"})
        worst = std::max(worst, rep.at(r).max);
      o.check(worst < pin::identity, "identities %.1e", worst);
      o.check(rep.at("pde").max < pin::pde, "pde %.1e", rep.at("pde").max);
      o.check(t < pin::t_identity, "%.3fs", t);
      reports.emplace(name, rep);
    }
    return o;
  });

  criterion(7, "non-biharmonicity", [] {
    Outcome o;
    for (const char* name : {"S3", "H3Elliptic", "H3Parabolic"}) {
      const auto& rep = reports.at(name);
      const double m = rep.at("normal_bitension").min_abs;
      o.check(!rep.cmc_patch && m > pin::bitension_floor && m > pin::bitension_frozen.at(name), "min|tau| %.3g", m);
    }
    // R3 sits below the 1e-3 floor near rho = 8 but stays away from zero.
    const double r3 = reports.at("R3Revolution").at("normal_bitension").min_abs;
    o.check(r3 > pin::bitension_frozen.at("R3Revolution"), "R3 min|tau| %.2e", r3);
    VerifyOptions vo;
    vo.nu = vo.nv = 16;
    vo.tolerance_profile = "loose";
    for (const auto& fx : {small_sphere(1.0 / std::sqrt(2.0)), small_sphere(1.0), plane()}) {
      const auto rep = verify_patch(fx, vo);
      o.check(rep.cmc_patch && rep.at("normal_bitension").max < pin::cmc_bitension, "CMC |tau| %.1e",
              rep.at("normal_bitension").max);
    }
    return o;
  });

  criterion(8, "dx/dk oracle equivalence", [] {
    Outcome o;
    const auto sol = std::make_shared<const CurvatureSolution>(
        solve_curvature(1, 1, 1, {-1, 1}, defaults::rel_tol, defaults::abs_tol));
    const auto prof = reconstruct_profile(sol, ProfileBranch::S2, 169.0 / 9.0);
    const double ua = 0.02, ub = 0.28;
    const auto orc = match_dxdk_oracle(prof, ua, ub);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const auto q = prof.at(ua + (ub - ua) * i / 400.0);
      worst = std::max({worst, std::abs(q.sigma[0] - orc.x(q.k)), std::abs(q.sigma[1] - orc.y(q.k))});
    }
    o.check(worst < pin::oracle, "max |frame - oracle| %.1e", worst);
    return o;
  });

  criterion(9, "turning points at polynomial roots", [] {
    Outcome o;
    struct Case {
      int c;
      double k, kp;
    };
    for (const Case cs : {Case{1, 1, 1}, Case{-1, 1, 1}, Case{-1, 0.25, 0.2}}) {
      const auto sol = solve_curvature(cs.c, cs.k, cs.kp, {-1, 1}, defaults::rel_tol, defaults::abs_tol);
      double worst = 0.0;
      for (const auto& tp : sol.turning_points) {
        const double end = std::min(std::abs(tp.k - sol.interval.lo), std::abs(tp.k - sol.interval.hi));
        worst = std::max({worst, end, std::abs(prime_polynomial(tp.k, sol.C, cs.c))});
      }
      o.check(!sol.turning_points.empty() && worst < pin::turning, "events %g, max dev %.1e",
              static_cast<double>(sol.turning_points.size()), worst);
    }
    return o;
  });

  criterion(10, "deterministic outputs", [] {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "bicons_acceptance";
    fs::remove_all(root);
    std::ostringstream log;
    for (const char* run : {"a", "b"}) {
      const fs::path d = root / run;
      PipelineConfig c = pipeline_config("h3", 0.25, 0.2);
      c.nu = c.nv = 24;
      c.out = (d / "solve.csv").string();
      cmd_solve(c, log);
      c.out = (d / "profile.csv").string();
      cmd_profile(c, log);
      c.out = (d / "surface.obj").string();
      cmd_surface(c, log);
      PipelineConfig r = pipeline_config("r3", 1, 1);
      r.nu = r.nv = 24;
      r.report = (d / "r3.json").string();
      cmd_verify(r, log);
    }
    int same = 0, total = 0;
    for (const char* f : {"solve.csv", "profile.csv", "surface.obj", "surface.channels.csv", "surface.report.json",
                          "r3.json"}) {
      const std::string a = slurp(root / "a" / f), b = slurp(root / "b" / f);
      ++total;
      if (!a.empty() && a == b) ++same;
    }
    o.check(same == total, "%g/%g files identical", same, total);
    fs::remove_all(root);
    return o;
  });

  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
