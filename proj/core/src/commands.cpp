#include "caginalp/commands.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "caginalp/config.hpp"
#include "caginalp/csv.hpp"
#include "caginalp/digest.hpp"
#include "caginalp/manifest.hpp"

namespace caginalp {

namespace {

using Clock = std::chrono::steady_clock;

void print_error_record(const std::string& kind, const std::string& message) {
  std::cerr << "error kind=" << kind << " message=\"" << message << "\"\n";
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared wrapper: load config, run the body, map exceptions to exit codes and
// a single-line error record, stamp the manifest.
template <typename Body>
int run_command(const CommandContext& ctx, const char* /*name*/, Body body) {
  const auto t0 = Clock::now();
  RunManifest manifest;
  std::filesystem::path out_dir;
  try {
    out_dir = resolve_out_dir(ctx.out_dir);
    std::filesystem::create_directories(out_dir);
    RunConfig config = RunConfig::load(ctx.config_path);
    manifest.config_digest = hex64(fnv1a64(config.raw_bytes()));
    manifest.inputs.push_back(ctx.config_path.string());
    const int code = body(config, out_dir, manifest);
    manifest.wall_seconds = seconds_since(t0);
    if (code != kExitOk && manifest.termination == "ok")
      manifest.termination = "verification_failed";
    write_manifest_atomic(out_dir / "manifest.txt", manifest);
    return code;
  } catch (const SolverError& e) {
    print_error_record(std::string("SolverError:") + e.kind_name(), e.what());
    manifest.termination = std::string("error:") + e.kind_name();
    manifest.wall_seconds = seconds_since(t0);
    if (!out_dir.empty()) {
      std::error_code ignore;
      std::filesystem::create_directories(out_dir, ignore);
      try {
        write_manifest_atomic(out_dir / "manifest.txt", manifest);
      } catch (...) {
      }
    }
    return kExitNumerical;
  } catch (const ValidationError& e) {
    print_error_record("ValidationError", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    print_error_record("InternalError", e.what());
    return kExitConfig;
  }
}

}  // namespace

std::filesystem::path resolve_out_dir(const std::filesystem::path& requested) {
  if (!requested.empty()) return requested;
  const char* root_env = std::getenv("CAGINALP_OUT_ROOT");
  const std::filesystem::path root = root_env ? root_env : "runs";
  const auto stamp = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
  return root / ("run_" + std::to_string(stamp) + "_" + std::to_string(::getpid()));
}

int cmd_simulate(const CommandContext& ctx) {
  return run_command(ctx, "simulate", [&](RunConfig& config, const std::filesystem::path& out,
                                          RunManifest& manifest) {
    SystemSetup setup = config.make_system();
    manifest.describe_system(setup);

    const int levels = std::max(0, ctx.tau_halvings);
    std::vector<StateTrajectory> runs;
    for (int level = 0; level <= levels; ++level) {
      SystemSetup level_setup = setup;
      level_setup.time.steps = setup.time.steps << level;
      SpaceTimeField u = config.make_control(setup);
      for (int h = 0; h < level; ++h) {
        SpaceTimeField fine(u.steps * 2, u.grid_size);
        for (int n = 1; n <= u.steps; ++n) {
          auto src = u.row(n);
          std::copy(src.begin(), src.end(), fine.row(2 * n - 1).begin());
          std::copy(src.begin(), src.end(), fine.row(2 * n).begin());
        }
        u = std::move(fine);
      }
      StateTrajectory traj = solve_state(level_setup, u);
      if (traj.tau_lipschitz_warning) {
        manifest.warnings.push_back("tau exceeds 1/Lip(F2'); explicit part may be inaccurate");
        if (!ctx.quiet)
          std::cerr << "warning: tau * Lip(F2') > 1 at refinement level " << level << "\n";
      }
      const std::string suffix = level == 0 ? "" : "_L" + std::to_string(level);
      write_trajectory_csv(out / ("trajectory" + suffix + ".csv"), traj);
      write_diagnostics_csv(out / ("diagnostics" + suffix + ".csv"), traj);
      manifest.outputs.push_back(("trajectory" + suffix + ".csv"));
      manifest.outputs.push_back(("diagnostics" + suffix + ".csv"));
      runs.push_back(std::move(traj));
    }

    if (levels > 0) {
      // Successive refinement distances at matching nodes (coarse grid).
      std::ofstream ref(out / "refinement.csv");
      ref << "level,tau,final_time_diff_l2\n";
      for (int level = 1; level <= levels; ++level) {
        const auto& coarse = runs[static_cast<size_t>(level) - 1];
        const auto& fine = runs[static_cast<size_t>(level)];
        double acc = 0.0;
        const auto& ct = coarse.theta.back().coeffs;
        const auto& ft = fine.theta.back().coeffs;
        for (size_t j = 0; j < ct.size(); ++j) acc += (ct[j] - ft[j]) * (ct[j] - ft[j]);
        const auto& cp = coarse.phi.back().coeffs;
        const auto& fp = fine.phi.back().coeffs;
        for (size_t j = 0; j < cp.size(); ++j) acc += (cp[j] - fp[j]) * (cp[j] - fp[j]);
        ref << level << ',' << format_double(runs[static_cast<size_t>(level)].time.dt()) << ','
            << format_double(std::sqrt(acc)) << '\n';
      }
      manifest.outputs.push_back("refinement.csv");
    }
    if (!ctx.quiet)
      std::cout << "simulate: " << runs.front().steps() << " steps, separation ["
                << format_double(runs.front().phi_min_overall) << ", "
                << format_double(runs.front().phi_max_overall) << "]\n";
    return kExitOk;
  });
}

int cmd_optimize(const CommandContext& ctx) {
  return run_command(ctx, "optimize", [&](RunConfig& config, const std::filesystem::path& out,
                                          RunManifest& manifest) {
    ControlProblem problem = config.make_problem();
    manifest.describe_system(problem.system);
    const OptimizerOptions options = config.make_optimizer_options();
    const SpaceTimeField u0 = config.make_initial_control(problem.system);

    OptimizationResult result = projected_gradient(problem, u0, options);
    manifest.termination = termination_name(result.reason);

    write_optimizer_csv(out / "optimizer.csv", result.history);
    write_control_csv(out / "control.csv", result.control, problem.system.time);
    write_control_csv(out / "gradient.csv", result.gradient, problem.system.time);
    write_trajectory_csv(out / "trajectory.csv", result.state);
    write_diagnostics_csv(out / "diagnostics.csv", result.state);
    write_pair_trajectory_csv(out / "adjoint.csv", problem.system.time, result.adjoint.q,
                              result.adjoint.p, "q", "p");
    for (const char* f : {"optimizer.csv", "control.csv", "gradient.csv", "trajectory.csv",
                          "diagnostics.csv", "adjoint.csv"})
      manifest.outputs.push_back(f);

    if (!ctx.quiet)
      std::cout << "optimize: " << result.history.size() << " iterations, cost "
                << format_double(result.cost) << ", stationarity "
                << format_double(result.stationarity) << ", " << termination_name(result.reason)
                << "\n";
    return kExitOk;
  });
}

int cmd_verify(const CommandContext& ctx, const std::string& suite_selector) {
  return run_command(ctx, "verify", [&](RunConfig& config, const std::filesystem::path& out,
                                        RunManifest& manifest) {
    ProbeSettings settings = config.make_probe_settings();
    if (ctx.seed_override) settings.seed = *ctx.seed_override;
    const std::string which = suite_selector.empty() ? settings.which : suite_selector;

    ControlProblem problem = config.make_problem();
    manifest.describe_system(problem.system);
    const auto should_run = [&](const char* name) { return which == "all" || which == name; };

    std::vector<ProbeReport> reports;
    if (should_run("fd_gradient")) {
      const SpaceTimeField u = config.make_initial_control(problem.system);
      reports.push_back(fd_gradient_check(problem, u, settings.directions,
                                          settings.eps_schedule, settings.tau_halvings,
                                          settings.seed, settings.thresholds));
    }
    if (should_run("stability"))
      reports.push_back(stability_probe(problem, settings.pairs, settings.seed,
                                        settings.thresholds));
    if (should_run("regularization") || should_run("regularization_my") ||
        should_run("regularization_dq")) {
      const bool obstacle = problem.system.potential.kind == PotentialKind::DoubleObstacle;
      SweepMode mode = obstacle ? SweepMode::DeepQuench : SweepMode::MoreauYosida;
      if (which == "regularization_my") mode = SweepMode::MoreauYosida;
      if (which == "regularization_dq") mode = SweepMode::DeepQuench;
      const double level0 = mode == SweepMode::DeepQuench ? std::min(1.0, settings.level0 * 10.0)
                                                          : settings.level0;
      const SpaceTimeField u = config.make_control(problem.system);
      reports.push_back(regularization_sweep(problem.system, u, mode, settings.levels, level0,
                                             settings.thresholds));
    }
    if (should_run("remainder")) {
      RemainderReport raw;
      const SpaceTimeField u = config.make_control(problem.system);
      const std::vector<double> scales{1e-1, 3.16227766016838e-2, 1e-2};
      reports.push_back(remainder_probe(problem.system, u, scales, settings.seed,
                                        settings.thresholds, &raw));
      write_remainder_csv(out / "remainder_slope.csv", raw);
      manifest.outputs.push_back("remainder_slope.csv");
    }
    if (should_run("energy"))
      reports.push_back(energy_dissipation_probe(problem.system, settings.samples, settings.seed,
                                                 settings.thresholds));
    if (should_run("tiny")) {
      ControlProblem tiny = config.make_problem(/*modes_override=*/1, /*blocks_override=*/2);
      OptimizerOptions tiny_options = config.make_optimizer_options();
      tiny_options.stationarity_tol = std::min(tiny_options.stationarity_tol, 1e-8);
      tiny_options.max_iters = std::max(tiny_options.max_iters, 400);
      reports.push_back(tiny_instance_oracle(tiny, tiny_options, settings.resolution,
                                             settings.thresholds));
    }
    if (reports.empty())
      throw ValidationError("unknown verify selector: " + which);

    bool all_pass = true;
    for (const auto& r : reports) {
      write_probe_csv(out / ("probe_" + r.probe + ".csv"), r);
      append_probe_summary(out / "results.csv", r);
      manifest.outputs.push_back("probe_" + r.probe + ".csv");
      all_pass = all_pass && r.pass();
      if (!ctx.quiet) {
        std::cout << (r.pass() ? "[PASS] " : "[FAIL] ") << r.probe;
        for (const auto& c : r.checks)
          std::cout << ' ' << c.name << '=' << (c.pass ? "ok" : "FAIL");
        std::cout << '\n';
      }
    }
    manifest.outputs.push_back("results.csv");
    manifest.termination = all_pass ? "ok" : "verification_failed";
    return all_pass ? kExitOk : kExitVerification;
  });
}

int cmd_sweep(const CommandContext& ctx) {
  return run_command(ctx, "sweep", [&](RunConfig& config, const std::filesystem::path& out,
                                       RunManifest& manifest) {
    ControlProblem problem = config.make_problem();
    manifest.describe_system(problem.system);
    const OptimizerOptions options = config.make_optimizer_options();
    const std::vector<double> schedule = config.alpha_schedule();
    const double anchor = config.anchor_weight();

    const std::filesystem::path table = out / "continuation.csv";
    if (std::filesystem::exists(table)) std::filesystem::remove(table);
    auto on_stage = +[](const QuenchStageRecord& rec, void* data) {
      append_continuation_row(*static_cast<const std::filesystem::path*>(data), rec);
    };
    QuenchResult result = solve_obstacle_deep_quench(
        problem, schedule, anchor, options, on_stage,
        const_cast<void*>(static_cast<const void*>(&table)));

    write_control_csv(out / "control.csv", result.final_result.control, problem.system.time);
    write_optimizer_csv(out / "optimizer.csv", result.final_result.history);
    write_trajectory_csv(out / "trajectory.csv", result.final_result.state);
    for (const char* f : {"continuation.csv", "control.csv", "optimizer.csv", "trajectory.csv"})
      manifest.outputs.push_back(f);
    manifest.termination = termination_name(result.final_result.reason);

    if (!ctx.quiet) {
      std::cout << "sweep: " << result.stages.size() << " stages, final cost "
                << format_double(result.stages.back().cost) << ", bounds ["
                << format_double(result.stages.back().a_R) << ", "
                << format_double(result.stages.back().b_R) << "]\n";
    }
    return kExitOk;
  });
}

}  // namespace caginalp
