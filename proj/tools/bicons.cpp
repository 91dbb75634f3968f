// bicons: build and verify biconservative surfaces in R^3, S^3 and H^3.
//
//   bicons solve   --model s3 --k0 1 --dk0 1 --out k.csv
//   bicons profile --model h3 --k0 0.25 --dk0 0.2
//   bicons surface --model s3 --out s3.obj --report s3.json
//   bicons verify  --model r3 --C 1
//   bicons sweep   --model r3 --values 1,1.5,2 --out sweep/
//
// Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
// 3 numerical or construction failure.

#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicons/commands.hpp"

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> model, branch, tol_profile, projection, out, report, sweep_param;
  std::optional<double> k0, dk0, C, rho_max, rho_min, fd_step, outer_factor, rel_tol, abs_tol, drift_tol;
  std::optional<int> nu, nv, samples;
  std::vector<double> span, v_range, values;
};

void add_flags(CLI::App* sub, Flags& f, bool sweep) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--model", f.model, "r3 | s3 | h3");
  sub->add_option("--branch", f.branch, "auto | elliptic | parabolic (h3 only)");
  sub->add_option("--k0", f.k0, "initial curvature k(0) > 0");
  sub->add_option("--dk0", f.dk0, "initial slope k'(0)");
  sub->add_option("--C", f.C, "r3: profile constant; s3/h3: prime constant, fixes k'(0) >= 0");
  sub->add_option("--rho-max", f.rho_max, "r3: largest radius");
  sub->add_option("--rho-min", f.rho_min, "r3: smallest radius of the surface patch");
  sub->add_option("--span", f.span, "u-interval lo,hi containing 0")->delimiter(',')->expected(2);
  sub->add_option("--nu", f.nu, "grid points in u");
  sub->add_option("--nv", f.nv, "grid points in v");
  sub->add_option("--samples", f.samples, "rows of solve/profile CSVs");
  sub->add_option("--v-range", f.v_range, "v-interval lo,hi")->delimiter(',')->expected(2);
  sub->add_option("--fd-step", f.fd_step, "inner finite-difference step (0: automatic)");
  sub->add_option("--outer-factor", f.outer_factor, "outer step / inner step");
  sub->add_option("--tol-profile", f.tol_profile, "closed-form | integrated | loose");
  sub->add_option("--projection", f.projection, "auto | identity | stereographic | poincare");
  sub->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
  sub->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
  sub->add_option("--drift-tol", f.drift_tol, "solve: allowed relative drift of C");
  sub->add_option("--out", f.out, "output file (directory for sweep)");
  sub->add_option("--report", f.report, "JSON report path");
  if (sweep) {
    sub->add_option("--values", f.values, "comma-separated sweep values")->delimiter(',');
    sub->add_option("--param", f.sweep_param, "C | k0");
  }
}

bicons::PipelineConfig merge(const Flags& f) {
  bicons::PipelineConfig c;
  if (f.config) bicons::load_config_file(c, *f.config);
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(c.model, f.model);
  set(c.branch, f.branch);
  set(c.tol_profile, f.tol_profile);
  set(c.projection, f.projection);
  set(c.out, f.out);
  set(c.report, f.report);
  set(c.sweep_param, f.sweep_param);
  set(c.k0, f.k0);
  set(c.kp0, f.dk0);
  if (f.C) c.C = f.C;
  set(c.rho_max, f.rho_max);
  if (f.rho_min) c.rho_min = f.rho_min;
  set(c.fd_step, f.fd_step);
  set(c.outer_factor, f.outer_factor);
  set(c.rel_tol, f.rel_tol);
  set(c.abs_tol, f.abs_tol);
  set(c.drift_tol, f.drift_tol);
  set(c.nu, f.nu);
  set(c.nv, f.nv);
  set(c.samples, f.samples);
  if (!f.span.empty()) c.span = {f.span[0], f.span[1]};
  if (!f.v_range.empty()) c.v_range = std::pair{f.v_range[0], f.v_range[1]};
  if (!f.values.empty()) c.values = f.values;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and verify biconservative surfaces in R^3, S^3 and H^3"};
  app.require_subcommand(1);

  using Command = std::function<int(const bicons::PipelineConfig&, std::ostream&)>;
  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const std::vector<Entry> entries{
      {"solve", "integrate the curvature equation; CSV of u, k, k', drift", bicons::cmd_solve},
      {"profile", "reconstruct the profile curve; CSV", bicons::cmd_profile},
      {"surface", "build, verify and mesh a surface; OBJ/PLY + JSON report", bicons::cmd_surface},
      {"verify", "build and verify a surface; JSON report", bicons::cmd_verify},
      {"sweep", "run one pipeline per value; per-run files + summary.csv", bicons::cmd_sweep},
  };

  Flags flags;
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_flags(sub, flags, std::string(e.name) == "sweep");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : bicons::exit_usage;
  }

  try {
    const bicons::PipelineConfig cfg = merge(flags);
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (subs[i]->parsed()) return entries[i].run(cfg, std::cerr);
  } catch (const bicons::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bicons::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bicons::exit_numerical;
  }
  return bicons::exit_usage;
}
