// Command-line front end: simulate, optimize, verify and sweep subcommands
// over sectioned key=value configs, CSV artifacts, exit codes 0/1/2/3.

#include <CLI11.hpp>

#include <cstdint>
#include <string>

#include "caginalp/commands.hpp"
#include "caginalp/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver and optimal-control toolkit for fractional "
               "Caginalp phase-field systems"};
  app.set_version_flag("--version", std::string(caginalp::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int tau_halvings = 0;
  bool quiet = false;
  std::string verify_suite = "";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir,
                    "output directory (default: fresh directory under $CAGINALP_OUT_ROOT)");
    sub->add_option("--seed", seed, "override the probe seed")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--tau-halvings", tau_halvings, "refinement levels for convergence studies");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the state system");
  add_common(simulate);
  CLI::App* optimize = app.add_subcommand("optimize", "projected-gradient optimal control");
  add_common(optimize);
  CLI::App* verify = app.add_subcommand("verify", "run verification probes");
  add_common(verify);
  verify->add_option("--suite", verify_suite,
                     "probe selector: all, fd_gradient, stability, regularization_my, "
                     "regularization_dq, energy, tiny");
  CLI::App* sweep = app.add_subcommand("sweep", "deep-quench continuation for the obstacle problem");
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  caginalp::CommandContext ctx;
  ctx.config_path = config_path;
  ctx.out_dir = out_dir;
  if (seed_given) ctx.seed_override = seed;
  ctx.tau_halvings = tau_halvings;
  ctx.quiet = quiet;

  if (simulate->parsed()) return caginalp::cmd_simulate(ctx);
  if (optimize->parsed()) return caginalp::cmd_optimize(ctx);
  if (verify->parsed()) return caginalp::cmd_verify(ctx, verify_suite);
  if (sweep->parsed()) return caginalp::cmd_sweep(ctx);
  return caginalp::kExitConfig;
}
