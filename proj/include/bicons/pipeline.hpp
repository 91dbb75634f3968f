#pragma once

// Configuration and orchestration: initial data -> curvature -> profile ->
// patch. Every numeric default of the command-line tool lives in `defaults`.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bicons/curvature_ode.hpp"
#include "bicons/errors.hpp"
#include "bicons/profile_curve.hpp"
#include "bicons/surface.hpp"
#include "bicons/verify.hpp"

namespace bicons {

namespace defaults {
inline constexpr double k0 = 1.0;
inline constexpr double kp0 = 1.0;
inline constexpr double r3_C = 1.0;
inline constexpr double rho_max = 8.0;
inline constexpr double rho_min_factor = 1.5;  // rho_min = 1.5 C^{-3/2}
inline constexpr double span_lo = -1.0;
inline constexpr double span_hi = 1.0;
inline constexpr int grid = 64;
inline constexpr int samples = 401;
inline constexpr double rel_tol = 1e-13;
inline constexpr double abs_tol = 1e-15;
inline constexpr double drift_tol = 1e-8;  // relative drift of C
inline constexpr double outer_factor = 32.0;
}  // namespace defaults

struct PipelineConfig {
  std::string model = "s3";     // r3 | s3 | h3
  std::string branch = "auto";  // auto | elliptic | parabolic
  double k0 = defaults::k0;
  double kp0 = defaults::kp0;
  std::optional<double> C;  // r3: profile constant; s3/h3: fixes k'(0) >= 0 from k0
  double rho_max = defaults::rho_max;
  std::optional<double> rho_min;
  std::pair<double, double> span{defaults::span_lo, defaults::span_hi};
  int nu = defaults::grid;
  int nv = defaults::grid;
  int samples = defaults::samples;
  std::optional<std::pair<double, double>> v_range;
  double fd_step = 0.0;
  double outer_factor = defaults::outer_factor;
  std::string tol_profile;  // empty: per-case default
  std::string projection = "auto";
  double rel_tol = defaults::rel_tol;
  double abs_tol = defaults::abs_tol;
  double drift_tol = defaults::drift_tol;
  std::string out;
  std::string report;
  std::vector<double> values;  // sweep
  std::string sweep_param;     // C | k0; empty: C for r3, k0 otherwise

  int curvature() const { return model == "r3" ? 0 : (model == "s3" ? 1 : -1); }
};

inline void validate(const PipelineConfig& c) {
  if (c.model != "r3" && c.model != "s3" && c.model != "h3")
    throw UsageError("model must be r3, s3 or h3 (got '" + c.model + "')");
  if (c.branch != "auto" && c.branch != "elliptic" && c.branch != "parabolic")
    throw UsageError("branch must be auto, elliptic or parabolic (got '" + c.branch + "')");
  if (c.branch != "auto" && c.model != "h3")
    throw UsageError("branch '" + c.branch + "' is only meaningful for model h3");
  if (!(c.k0 > 0.0)) throw UsageError("k0 must be positive");
  if (!std::isfinite(c.kp0)) throw UsageError("dk0 must be finite");
  if (c.C && !std::isfinite(*c.C)) throw UsageError("C must be finite");
  if (c.model == "r3" && c.C && !(*c.C > 0.0)) throw UsageError("r3 needs C > 0");
  if (!(c.span.first <= 0.0 && c.span.second >= 0.0 && c.span.first < c.span.second))
    throw UsageError("span must be an interval containing 0");
  if (c.nu < 2 || c.nv < 2) throw UsageError("grid must be at least 2x2");
  if (c.samples < 2) throw UsageError("samples must be at least 2");
  if (c.v_range && !(c.v_range->first < c.v_range->second)) throw UsageError("v-range must be increasing");
  if (!(c.fd_step >= 0.0)) throw UsageError("fd-step must be non-negative");
  if (!(c.outer_factor > 0.0)) throw UsageError("outer factor must be positive");
  if (!(c.rel_tol > 0.0 && c.abs_tol > 0.0)) throw UsageError("tolerances must be positive");
  if (!(c.rho_max > 0.0)) throw UsageError("rho-max must be positive");
  if (!c.tol_profile.empty()) (void)tolerance_profile(c.tol_profile);
  if (!c.sweep_param.empty() && c.sweep_param != "C" && c.sweep_param != "k0")
    throw UsageError("sweep parameter must be C or k0");
}

/// Run `fn`, prefixing any library error with the stage name.
template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "[" + name + "] " + e.what());
  }
}

/// Initial slope for s3/h3 runs: dk0 as given, or sqrt(P(k0)) when C is set.
inline double initial_slope(const PipelineConfig& cfg) {
  if (!cfg.C || cfg.model == "r3") return cfg.kp0;
  const double p = prime_polynomial(cfg.k0, *cfg.C, cfg.curvature());
  if (p < 0.0)
    throw ConstructionError("no real k'(0): P(k0) = -(16c/9)k0^2 - 16k0^4 + C k0^{7/2} < 0");
  return std::sqrt(p);
}

inline ProfileBranch resolve_branch(const PipelineConfig& cfg, double C) {
  if (cfg.model == "s3") return ProfileBranch::S2;
  if (cfg.model != "h3") throw UsageError("profile branches exist only for s3 and h3");
  if (C == 0.0) throw ConstructionError("C = 0: W vanishes and neither H3 branch applies");
  const ProfileBranch natural = C > 0.0 ? ProfileBranch::H2_elliptic : ProfileBranch::H2_parabolic;
  if (cfg.branch == "elliptic" && natural != ProfileBranch::H2_elliptic)
    throw UsageError("branch elliptic needs C > 0 (W > 0), but C < 0");
  if (cfg.branch == "parabolic" && natural != ProfileBranch::H2_parabolic)
    throw UsageError("branch parabolic needs C < 0 (W < 0), but C > 0");
  return natural;
}

inline double r3_constant(const PipelineConfig& cfg) { return cfg.C.value_or(defaults::r3_C); }

inline std::pair<double, double> r3_rho_range(const PipelineConfig& cfg) {
  const double C = r3_constant(cfg);
  const double lo = cfg.rho_min.value_or(defaults::rho_min_factor * std::pow(C, -1.5));
  return {lo, cfg.rho_max};
}

struct Pipeline {
  PipelineConfig config;
  std::shared_ptr<const CurvatureSolution> curvature;
  std::shared_ptr<const ProfileCurve> profile;
  std::optional<RevolutionProfile> revolution;
  std::optional<SurfacePatch> patch;
};

inline std::shared_ptr<const CurvatureSolution> solve_stage(const PipelineConfig& cfg) {
  validate(cfg);
  const double kp0 = stage("initial data", [&] { return initial_slope(cfg); });
  return stage("solve", [&] {
    return std::make_shared<const CurvatureSolution>(
        solve_curvature(cfg.curvature(), cfg.k0, kp0, cfg.span, cfg.rel_tol, cfg.abs_tol));
  });
}

/// Curvature, profile and patch for one configuration.
inline Pipeline build_pipeline(const PipelineConfig& cfg) {
  validate(cfg);
  Pipeline p;
  p.config = cfg;
  if (cfg.model == "r3") {
    const double C = r3_constant(cfg);
    const auto [lo, hi] = r3_rho_range(cfg);
    p.revolution = stage("profile", [&] { return revolution_profile(C, hi); });
    const auto vr = cfg.v_range.value_or(std::pair{0.0, 2.0 * std::numbers::pi});
    p.patch = stage("surface", [&] { return build_r3_revolution(*p.revolution, {lo, hi, vr.first, vr.second}); });
    return p;
  }
  p.curvature = solve_stage(cfg);
  const ProfileBranch br = stage("branch", [&] { return resolve_branch(cfg, p.curvature->C); });
  p.profile = stage("profile", [&] {
    return std::make_shared<const ProfileCurve>(reconstruct_profile(p.curvature, br, p.curvature->C));
  });
  p.patch = stage("surface", [&] {
    return cfg.model == "s3" ? build_s3(p.profile, cfg.v_range) : build_h3(p.profile, cfg.v_range);
  });
  return p;
}

inline VerifyOptions verify_options(const PipelineConfig& cfg) {
  VerifyOptions o;
  o.nu = cfg.nu;
  o.nv = cfg.nv;
  o.fd.fd_step = cfg.fd_step;
  o.fd.outer_factor = cfg.outer_factor;
  o.tolerance_profile = cfg.tol_profile;
  return o;
}

inline VerificationReport verify_pipeline(const Pipeline& p) {
  if (!p.patch) throw UsageError("pipeline has no patch");
  return stage("verify", [&] { return verify_patch(*p.patch, verify_options(p.config)); });
}

}  // namespace bicons
