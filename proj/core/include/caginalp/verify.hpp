#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "caginalp/control.hpp"

namespace caginalp {

struct ProbeCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// One probe outcome: measured quantities plus pass flags, each tied to the
/// threshold it was judged against. Deterministic for a fixed seed.
struct ProbeReport {
  std::string probe;
  std::uint64_t seed = 0;
  std::string inputs_digest;
  std::vector<std::pair<std::string, double>> measured;
  std::vector<ProbeCheck> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add_measure(const std::string& key, double v) { measured.emplace_back(key, v); }
};

/// Pass thresholds are data, not constants buried in probe logic.
struct ProbeThresholds {
  double fd_rel_tol = 1e-2;          // adjoint-vs-FD relative error
  double fd_slope_min = 0.9;         // tau-convergence of the mismatch
  double stability_drift = 0.2;      // allowed max-ratio change under tau halving
  double energy_slack_rel = 1e-10;   // dissipation slack relative to |E(0)|
  double sweep_bound_factor = 10.0;  // diagnostics cap relative to first level
  double remainder_slope_min = 1.8;
  double remainder_slope_max = 2.2;
};

/// Random smooth control built from a few low modes and smooth time profiles,
/// scaled to the requested sup-norm amplitude.
SpaceTimeField random_smooth_control(const SystemSetup& setup, std::mt19937_64& rng,
                                     double amplitude);

/// Split every time slab of the problem in two, k times; slab fields repeat
/// their values across the split.
ControlProblem refine_time(const ControlProblem& problem, int halvings);
SpaceTimeField refine_time(const SpaceTimeField& field, int halvings);

/// Adjoint gradient against central differences of the reduced cost, over a
/// schedule of FD steps and tau halvings.
ProbeReport fd_gradient_check(const ControlProblem& problem, const SpaceTimeField& u,
                              int directions, std::span<const double> eps_schedule,
                              int tau_halvings, std::uint64_t seed,
                              const ProbeThresholds& thresholds);

/// Max ratio of state-difference to control-difference norms over random
/// control pairs, compared across one tau halving.
ProbeReport stability_probe(const ControlProblem& problem, int pairs, std::uint64_t seed,
                            const ProbeThresholds& thresholds);

enum class SweepMode { MoreauYosida, DeepQuench };

/// Levels of Moreau-Yosida lambda halving (or deep-quench alpha halving):
/// successive trajectory differences must shrink and the uniform diagnostics
/// must stay bounded. A level's solver failure is recorded and the sweep
/// continues.
ProbeReport regularization_sweep(const SystemSetup& setup, const SpaceTimeField& u,
                                 SweepMode mode, int levels, double level0,
                                 const ProbeThresholds& thresholds);

/// Discrete Lyapunov check for the decoupled gradient flow (latent heat and
/// control forced to zero): the free energy must not increase at any step.
ProbeReport energy_dissipation_probe(const SystemSetup& setup, int samples, std::uint64_t seed,
                                     const ProbeThresholds& thresholds);

/// Exhaustive reduced-cost grid search on a <=2 scalar control
/// parameterization versus the projected-gradient optimizer.
ProbeReport tiny_instance_oracle(const ControlProblem& problem, const OptimizerOptions& options,
                                 int resolution, const ProbeThresholds& thresholds);

/// Taylor-remainder slope of the control-to-state map along a seeded smooth
/// direction; pass when the fitted slope sits in the configured window.
ProbeReport remainder_probe(const SystemSetup& setup, const SpaceTimeField& u,
                            std::span<const double> scales, std::uint64_t seed,
                            const ProbeThresholds& thresholds, RemainderReport* raw = nullptr);

}  // namespace caginalp
