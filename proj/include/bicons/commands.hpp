#pragma once

// Subcommands of the command-line tool and their file formats.
//
// CSV files start with "# key=value" metadata lines followed by a header
// row; numbers are written with 17 significant digits. JSON reports use a
// fixed key order. Nothing in the output depends on the clock or on
// randomness, so identical configurations give identical bytes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bicons/mesh.hpp"
#include "bicons/pipeline.hpp"

namespace bicons {

using ordered_json = nlohmann::ordered_json;

enum ExitCode : int { exit_pass = 0, exit_verify_fail = 1, exit_usage = 2, exit_numerical = 3 };

inline int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::usage ? exit_usage : exit_numerical;
}

// ---------------------------------------------------------------------------
// Config file

namespace detail {

inline std::pair<double, double> json_pair(const ordered_json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw UsageError(std::string("config: '") + key + "' must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Apply the keys of a JSON object to `cfg`. Keys mirror the long flags
/// with '-' replaced by '_'.
inline void apply_config_json(PipelineConfig& cfg, const ordered_json& j) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "model") cfg.model = val.get<std::string>();
      else if (key == "branch") cfg.branch = val.get<std::string>();
      else if (key == "k0") cfg.k0 = val.get<double>();
      else if (key == "dk0") cfg.kp0 = val.get<double>();
      else if (key == "C") cfg.C = val.get<double>();
      else if (key == "rho_max") cfg.rho_max = val.get<double>();
      else if (key == "rho_min") cfg.rho_min = val.get<double>();
      else if (key == "span") cfg.span = detail::json_pair(val, "span");
      else if (key == "nu") cfg.nu = val.get<int>();
      else if (key == "nv") cfg.nv = val.get<int>();
      else if (key == "samples") cfg.samples = val.get<int>();
      else if (key == "v_range") cfg.v_range = detail::json_pair(val, "v_range");
      else if (key == "fd_step") cfg.fd_step = val.get<double>();
      else if (key == "outer_factor") cfg.outer_factor = val.get<double>();
      else if (key == "tol_profile") cfg.tol_profile = val.get<std::string>();
      else if (key == "projection") cfg.projection = val.get<std::string>();
      else if (key == "rel_tol") cfg.rel_tol = val.get<double>();
      else if (key == "abs_tol") cfg.abs_tol = val.get<double>();
      else if (key == "drift_tol") cfg.drift_tol = val.get<double>();
      else if (key == "out") cfg.out = val.get<std::string>();
      else if (key == "report") cfg.report = val.get<std::string>();
      else if (key == "values") cfg.values = val.get<std::vector<double>>();
      else if (key == "sweep_param") cfg.sweep_param = val.get<std::string>();
      else throw UsageError("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

inline void load_config_file(PipelineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  apply_config_json(cfg, j);
}

// ---------------------------------------------------------------------------
// Serialization

inline ordered_json config_json(const PipelineConfig& c) {
  ordered_json j;
  j["model"] = c.model;
  j["branch"] = c.branch;
  j["k0"] = c.k0;
  j["dk0"] = c.kp0;
  if (c.C) j["C"] = *c.C;
  j["span"] = {c.span.first, c.span.second};
  j["rel_tol"] = c.rel_tol;
  j["abs_tol"] = c.abs_tol;
  return j;
}

inline ordered_json report_json(const VerificationReport& r, const ordered_json& case_info = {}) {
  ordered_json j;
  j["schema"] = r.schema;
  ordered_json cs;
  cs["name"] = r.case_name;
  cs["model"] = r.model.name();
  if (case_info.is_object())
    for (const auto& [k, v] : case_info.items()) cs[k] = v;
  j["case"] = cs;
  j["grid"] = {{"nu", r.grid.nu},
               {"nv", r.grid.nv},
               {"u_range", {r.grid.rect.u0, r.grid.rect.u1}},
               {"v_range", {r.grid.rect.v0, r.grid.rect.v1}}};
  ordered_json tol;
  tol["profile"] = r.tolerances.name;
  for (const auto& [name, s] : r.residuals)
    if (s.limit) tol[name] = *s.limit;
  j["tolerances"] = tol;
  ordered_json res = ordered_json::object();
  for (const auto& [name, s] : r.residuals) {
    ordered_json e;
    e["max"] = s.max;
    e["mean"] = s.mean;
    e["min_abs"] = s.min_abs;
    e["argmax"] = {s.argmax[0], s.argmax[1]};
    e["count"] = s.count;
    e["checked"] = s.limit.has_value();
    e["pass"] = s.pass;
    res[name] = e;
  }
  j["residuals"] = res;
  j["cmc_patch"] = r.cmc_patch;
  j["pass"] = r.pass;
  j["fd_metadata"] = {{"inner_step", r.inner_step},
                      {"outer_step", r.outer_step},
                      {"outer_factor", r.fd.outer_factor},
                      {"richardson", r.fd.richardson},
                      {"richardson_steps", "h and h/2"},
                      {"second_derivatives", "central differences of analytic first partials"},
                      {"laplacian_sign", "geometer: Delta = -trace Hess"},
                      {"normal_sign", r.normal_sign}};
  return j;
}

namespace detail {

struct CsvWriter {
  std::ostream& os;

  void meta(const std::string& key, const std::string& value) { os << "# " << key << '=' << value << '\n'; }
  void meta(const std::string& key, double value) { meta(key, format_double(value)); }
  void header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
  }
  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << format_double(vals[i]);
    os << '\n';
  }
};

inline void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

inline std::string or_default(const std::string& s, const std::string& d) { return s.empty() ? d : s; }

inline std::string stem_path(const std::string& path) {
  std::filesystem::path p(path);
  return (p.parent_path() / p.stem()).string();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code and writes a one-line
// summary to `log`.

/// Curvature profile CSV: u, k, k', relative drift of C.
inline void write_solve_csv(std::ostream& os, const PipelineConfig& cfg, const CurvatureSolution& sol) {
  detail::CsvWriter w{os};
  w.meta("command", "solve");
  w.meta("model", cfg.model);
  w.meta("c", static_cast<double>(sol.c));
  w.meta("k0", sol.k0);
  w.meta("dk0", sol.kp0);
  w.meta("C", sol.C);
  if (cfg.model == "h3")
    w.meta("branch", sol.C > 0.0 ? "elliptic" : (sol.C < 0.0 ? "parabolic" : "degenerate"));
  w.meta("rel_tol", sol.rel_tol);
  w.meta("abs_tol", sol.abs_tol);
  w.meta("span", format_double(sol.requested_span.first) + "," + format_double(sol.requested_span.second));
  w.meta("solved_span", format_double(sol.u_min()) + "," + format_double(sol.u_max()));
  w.meta("admissible_k", format_double(sol.interval.lo) + "," + format_double(sol.interval.hi));
  w.meta("max_drift", sol.max_drift);
  for (const auto& t : sol.turning_points) w.meta("turning_point", format_double(t.u) + "," + format_double(t.k));
  for (const auto& e : sol.events) w.meta("event", format_double(e.u) + "," + e.reason);
  w.header({"u", "k", "dk", "C_drift"});
  for (const auto& s : sol.sample_uniform(cfg.samples))
    w.row({s.u, s.k, s.kp, sol.drift_at(s.u)});
}

inline int cmd_solve(const PipelineConfig& cfg, std::ostream& log) {
  const auto sol = solve_stage(cfg);
  std::ostringstream os;
  write_solve_csv(os, cfg, *sol);
  detail::write_text(detail::or_default(cfg.out, "solve.csv"), os.str());
  const bool ok = sol->max_drift <= cfg.drift_tol;
  log << "solve: C=" << format_double(sol->C) << " drift=" << format_double(sol->max_drift)
      << (sol->truncated ? " (truncated)" : "") << (ok ? " ok" : " DRIFT") << '\n';
  return ok ? exit_pass : exit_verify_fail;
}

inline void write_revolution_csv(std::ostream& os, const RevolutionProfile& rp, int samples) {
  detail::CsvWriter w{os};
  w.meta("command", "profile");
  w.meta("model", "r3");
  w.meta("C", rp.C());
  w.meta("rho_min", rp.rho_min());
  w.meta("rho_max", rp.rho_max());
  w.header({"rho", "u", "f", "K"});
  for (int i = 0; i < samples; ++i) {
    const double rho = rp.rho_min() + (rp.rho_max() - rp.rho_min()) * i / (samples - 1);
    const double r = std::max(rho, rp.rho_min());
    w.row({r, rp.u_of_rho(r), rp.f_reference(r), rp.gauss_reference(r)});
  }
}

inline void write_profile_csv(std::ostream& os, const PipelineConfig& cfg, const ProfileCurve& prof) {
  detail::CsvWriter w{os};
  const auto& d = prof.diagnostics;
  w.meta("command", "profile");
  w.meta("model", cfg.model);
  w.meta("branch", to_string(prof.branch));
  w.meta("C", prof.C);
  w.meta("k0", prof.curvature->k0);
  w.meta("dk0", prof.curvature->kp0);
  w.meta("max_model_residual", d.model);
  w.meta("max_speed_residual", d.unit_speed);
  w.meta("max_constraint1_residual", d.constraint1);
  w.meta("max_constraint2_residual", d.constraint2);
  w.meta("flagged", d.flagged ? "true" : "false");
  w.header({"u", "k", "sigma1", "sigma2", "sigma3", "sigma4", "constraint1", "constraint2"});
  for (const auto& p : prof.sample_uniform(cfg.samples))
    w.row({p.u, p.k, p.sigma[0], p.sigma[1], p.sigma[2], p.sigma[3],
           inner(p.sigma, prof.C1) - prof.constraint_target(p.k),
           inner(p.sigma, prof.C2) - prof.constraint2_target(p.k)});
}

inline int cmd_profile(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  std::ostringstream os;
  bool ok = true;
  if (cfg.model == "r3") {
    const auto rp = stage("profile", [&] { return revolution_profile(r3_constant(cfg), cfg.rho_max); });
    write_revolution_csv(os, rp, cfg.samples);
    log << "profile: r3 C=" << format_double(rp.C()) << " u(rho_max)=" << format_double(rp.u_max()) << '\n';
  } else {
    const Pipeline p = build_pipeline(cfg);
    write_profile_csv(os, cfg, *p.profile);
    ok = !p.profile->diagnostics.flagged;
    log << "profile: " << to_string(p.profile->branch) << " C=" << format_double(p.profile->C)
        << " constraint residual=" << format_double(p.profile->diagnostics.constraint1)
        << (ok ? " ok" : " FLAGGED") << '\n';
  }
  detail::write_text(detail::or_default(cfg.out, "profile.csv"), os.str());
  return ok ? exit_pass : exit_verify_fail;
}

inline ordered_json case_json(const Pipeline& p) {
  ordered_json j = config_json(p.config);
  if (p.profile) {
    j["C"] = p.profile->C;
    j["branch"] = to_string(p.profile->branch);
    j["dk0"] = p.profile->curvature->kp0;
  }
  if (p.revolution) {
    j["C"] = p.revolution->C();
    j["rho_range"] = {p.patch->rect.u0, p.patch->rect.u1};
  }
  return j;
}

inline int cmd_verify(const PipelineConfig& cfg, std::ostream& log) {
  const Pipeline p = build_pipeline(cfg);
  const VerificationReport rep = verify_pipeline(p);
  detail::write_text(detail::or_default(cfg.report, "report.json"), report_json(rep, case_json(p)).dump(2) + "\n");
  log << "verify: " << rep.case_name << (rep.pass ? " pass" : " FAIL") << '\n';
  return rep.pass ? exit_pass : exit_verify_fail;
}

inline int cmd_surface(const PipelineConfig& cfg, std::ostream& log) {
  const Pipeline p = build_pipeline(cfg);
  const VerificationReport rep = verify_pipeline(p);
  Projection proj;
  proj.kind = stage("mesh", [&] { return parse_projection(cfg.projection); });
  const Mesh mesh = stage("mesh", [&] { return sample_mesh(*p.patch, rep, proj); });

  const std::string out = detail::or_default(cfg.out, "surface.obj");
  const bool ply = std::filesystem::path(out).extension() == ".ply";
  std::ostringstream ms;
  if (ply) {
    write_ply(ms, mesh);
  } else {
    write_obj(ms, mesh);
    std::ostringstream cs;
    write_channels_csv(cs, mesh);
    detail::write_text(detail::stem_path(out) + ".channels.csv", cs.str());
  }
  detail::write_text(out, ms.str());
  const std::string report = detail::or_default(cfg.report, detail::stem_path(out) + ".report.json");
  detail::write_text(report, report_json(rep, case_json(p)).dump(2) + "\n");
  log << "surface: " << rep.case_name << ' ' << mesh.vertices.size() << " vertices"
      << (rep.pass ? " pass" : " FAIL") << '\n';
  return rep.pass ? exit_pass : exit_verify_fail;
}

/// One pipeline per sweep value; failures are recorded and the sweep
/// continues. The summary is written once all runs are done.
inline int cmd_sweep(const PipelineConfig& cfg, std::ostream& log) {
  validate(cfg);
  if (cfg.values.empty()) throw UsageError("sweep: empty value list");
  const std::string param = cfg.sweep_param.empty() ? (cfg.model == "r3" ? "C" : "k0") : cfg.sweep_param;
  const std::filesystem::path dir = detail::or_default(cfg.out, "sweep");
  const std::vector<std::string> tracked{"biconservative", "gauss", "norm_A2", "eigenvalues", "pde",
                                         "normal_bitension"};

  std::ostringstream summary;
  detail::CsvWriter w{summary};
  w.meta("command", "sweep");
  w.meta("model", cfg.model);
  w.meta("parameter", param);
  summary << "run," << param << ",C,status,pass";
  for (const auto& t : tracked) summary << ',' << t << "_max";
  summary << ",message\n";

  bool all = true;
  for (std::size_t i = 0; i < cfg.values.size(); ++i) {
    PipelineConfig run = cfg;
    if (param == "C") run.C = cfg.values[i];
    else run.k0 = cfg.values[i];
    const std::string base = (dir / ("run_" + std::to_string(i))).string();
    std::string status = "ok", message;
    double C = std::nan("");
    bool pass = false;
    std::vector<double> maxima(tracked.size(), std::nan(""));
    try {
      validate(run);
      const Pipeline p = build_pipeline(run);
      std::ostringstream os;
      if (p.revolution) {
        write_revolution_csv(os, *p.revolution, run.samples);
        C = p.revolution->C();
      } else {
        write_profile_csv(os, run, *p.profile);
        C = p.profile->C;
      }
      detail::write_text(base + ".csv", os.str());
      const VerificationReport rep = verify_pipeline(p);
      detail::write_text(base + ".report.json", report_json(rep, case_json(p)).dump(2) + "\n");
      pass = rep.pass;
      if (!pass) status = "verify-fail";
      for (std::size_t t = 0; t < tracked.size(); ++t)
        if (const auto* s = rep.find(tracked[t])) maxima[t] = s->max;
    } catch (const Error& e) {
      status = e.kind() == ErrorKind::usage ? "usage-error" : "error";
      message = e.what();
    }
    all = all && pass;
    for (char& ch : message)
      if (ch == ',' || ch == '\n') ch = ';';
    summary << i << ',' << format_double(cfg.values[i]) << ',' << format_double(C) << ',' << status << ','
            << (pass ? 1 : 0);
    for (double m : maxima) summary << ',' << format_double(m);
    summary << ',' << message << '\n';
    log << "sweep[" << i << "] " << param << '=' << format_double(cfg.values[i]) << ' ' << status << '\n';
  }
  detail::write_text((dir / "summary.csv").string(), summary.str());
  return all ? exit_pass : exit_verify_fail;
}

}  // namespace bicons
