#include "caginalp/control.hpp"

#include <algorithm>
#include <cmath>

namespace caginalp {

namespace {

// Block-average a slab field over equal runs of slabs; the L2(Q)-orthogonal
// projection onto piecewise-constant-in-time controls.
void project_time_blocks(SpaceTimeField& f, int blocks) {
  if (blocks <= 0) return;
  const int m = f.steps;
  const int g_total = f.grid_size;
  const int base = m / blocks;
  const int rem = m % blocks;
  int slab = 1;
  for (int b = 0; b < blocks; ++b) {
    const int len = base + (b < rem ? 1 : 0);
    if (len == 0) continue;
    for (int g = 0; g < g_total; ++g) {
      double acc = 0.0;
      for (int k = 0; k < len; ++k) acc += f.at(slab + k, g);
      acc /= static_cast<double>(len);
      for (int k = 0; k < len; ++k) f.at(slab + k, g) = acc;
    }
    slab += len;
  }
}

double field_l2_sq(const SpectralField& a, const SpectralField& b) {
  double acc = 0.0;
  for (size_t j = 0; j < a.coeffs.size(); ++j) {
    const double d = a.coeffs[j] - b.coeffs[j];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const char* termination_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::Stationary: return "stationary";
    case TerminationReason::MaxIterations: return "max_iterations";
    case TerminationReason::LineSearchExhausted: return "line_search_exhausted";
  }
  return "unknown";
}

void ControlProblem::validate() const {
  system.validate();
  cost.validate();
  box.validate();
  box.u_min.validate_shape(system.time.steps, system.grid_size());
  if (time_blocks < 0 || time_blocks > system.time.steps)
    throw ValidationError("time_blocks must lie in [0, steps]");
}

double evaluate_cost(const SystemSetup& setup, const StateTrajectory& trajectory,
                     const SpaceTimeField& u, const CostSpec& cost) {
  cost.validate();
  const int m_steps = setup.time.steps;
  const int g_total = setup.grid_size();
  const double tau = setup.time.dt();
  u.validate_shape(m_steps, g_total);
  if (static_cast<int>(trajectory.phi.size()) != m_steps + 1)
    throw ValidationError("evaluate_cost: trajectory does not match the time grid");
  const auto& w = setup.basis_a->quadrature_weights();

  double value = 0.0;
  if (cost.beta1 > 0.0)
    value += 0.5 * cost.beta1 * field_l2_sq(trajectory.phi.back(), *cost.phi_Omega);
  if (cost.beta3 > 0.0)
    value += 0.5 * cost.beta3 * field_l2_sq(trajectory.theta.back(), *cost.theta_Omega);

  std::vector<double> grid(static_cast<size_t>(g_total));
  if (cost.beta2 > 0.0) {
    double acc = 0.0;
    for (int n = 1; n <= m_steps; ++n) {
      setup.basis_b->synthesize(trajectory.phi[static_cast<size_t>(n)].coeffs, grid);
      for (int g = 0; g < g_total; ++g) {
        const double target = cost.phi_Q.steps > 0 ? cost.phi_Q.at(n, g) : 0.0;
        const double d = grid[static_cast<size_t>(g)] - target;
        acc += w[static_cast<size_t>(g)] * d * d;
      }
    }
    value += 0.5 * cost.beta2 * tau * acc;
  }
  if (cost.beta4 > 0.0) {
    double acc = 0.0;
    for (int n = 1; n <= m_steps; ++n) {
      setup.basis_a->synthesize(trajectory.theta[static_cast<size_t>(n)].coeffs, grid);
      for (int g = 0; g < g_total; ++g) {
        const double target = cost.theta_Q.steps > 0 ? cost.theta_Q.at(n, g) : 0.0;
        const double d = grid[static_cast<size_t>(g)] - target;
        acc += w[static_cast<size_t>(g)] * d * d;
      }
    }
    value += 0.5 * cost.beta4 * tau * acc;
  }
  if (cost.beta5 > 0.0) value += 0.5 * cost.beta5 * l2q_inner(u, u, w, tau);
  return value;
}

OptimizationResult projected_gradient(const ControlProblem& problem, SpaceTimeField u0,
                                      const OptimizerOptions& options) {
  problem.validate();
  const auto& setup = problem.system;
  const double tau = setup.time.dt();
  const auto& w = setup.basis_a->quadrature_weights();
  if (problem.cost.beta5 == 0.0 && !options.allow_zero_beta5)
    throw ValidationError(
        "beta5 = 0 lacks gradient coercivity; set allow_zero_beta5 to proceed anyway");
  if (options.anchor_weight > 0.0 && options.anchor == nullptr)
    throw ValidationError("anchor_weight > 0 requires an anchor control");
  u0.validate_shape(setup.time.steps, setup.grid_size());

  auto restricted_project = [&](const SpaceTimeField& f) {
    SpaceTimeField out = f;
    project_time_blocks(out, problem.time_blocks);
    return project_admissible(out, problem.box);
  };

  OptimizationResult res;
  res.control = restricted_project(u0);
  int solves = 0;

  auto reduced_cost = [&](const SpaceTimeField& u, StateTrajectory* out_state) {
    StateTrajectory traj = solve_state(setup, u);
    ++solves;
    double j = evaluate_cost(setup, traj, u, problem.cost);
    if (options.anchor_weight > 0.0) {
      SpaceTimeField d = u - *options.anchor;
      const double dn = l2q_norm(d, w, tau);
      j += 0.5 * options.anchor_weight * dn * dn;
    }
    if (out_state) *out_state = std::move(traj);
    return j;
  };

  res.cost = reduced_cost(res.control, &res.state);
  double step = options.initial_step;

  for (int it = 0; it < options.max_iters; ++it) {
    res.adjoint = solve_adjoint(setup, res.state, problem.cost);
    res.gradient = reduced_gradient(setup, res.control, res.adjoint, problem.cost.beta5);
    if (options.anchor_weight > 0.0) {
      add_scaled(res.gradient, options.anchor_weight, res.control);
      add_scaled(res.gradient, -options.anchor_weight, *options.anchor);
    }

    // Stationarity: distance to the projected full-gradient step.
    SpaceTimeField probe = res.control - res.gradient;
    probe = restricted_project(probe);
    res.stationarity = l2q_norm(res.control - probe, w, tau);
    res.history.push_back({it, res.cost, res.stationarity, 0.0, solves});
    if (res.stationarity <= options.stationarity_tol) {
      res.reason = TerminationReason::Stationary;
      res.forward_solves = solves;
      return res;
    }

    // Armijo backtracking on the true reduced cost.
    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 60; ++bt) {
      SpaceTimeField trial = res.control;
      add_scaled(trial, -s, res.gradient);
      trial = restricted_project(trial);
      const double decrease_ref = l2q_inner(res.gradient, res.control - trial, w, tau);
      StateTrajectory trial_state;
      const double trial_cost = reduced_cost(trial, &trial_state);
      if (trial_cost <= res.cost - options.armijo_c * decrease_ref && decrease_ref > 0.0) {
        res.control = std::move(trial);
        res.state = std::move(trial_state);
        res.cost = trial_cost;
        res.history.back().step = s;
        res.history.back().forward_solves = solves;
        accepted = true;
        // Gentle step recovery keeps the search from collapsing permanently.
        step = std::min(options.initial_step, 2.0 * s);
        break;
      }
      s *= options.backtrack;
      if (s < 1e-14) break;
    }
    if (!accepted) {
      res.reason = TerminationReason::LineSearchExhausted;
      res.forward_solves = solves;
      return res;
    }
  }
  // Final stationarity refresh for the returned iterate.
  res.adjoint = solve_adjoint(setup, res.state, problem.cost);
  res.gradient = reduced_gradient(setup, res.control, res.adjoint, problem.cost.beta5);
  if (options.anchor_weight > 0.0) {
    add_scaled(res.gradient, options.anchor_weight, res.control);
    add_scaled(res.gradient, -options.anchor_weight, *options.anchor);
  }
  SpaceTimeField probe = restricted_project(res.control - res.gradient);
  res.stationarity = l2q_norm(res.control - probe, w, tau);
  res.reason = res.stationarity <= options.stationarity_tol ? TerminationReason::Stationary
                                                            : TerminationReason::MaxIterations;
  res.forward_solves = solves;
  return res;
}

double stationarity_residual(const SystemSetup& setup, const SpaceTimeField& u,
                             const AdjointTrajectory& adjoint, double beta5,
                             const BoxConstraints& box) {
  if (!(beta5 > 0.0))
    throw ValidationError("stationarity_residual requires beta5 > 0 (projection formula degenerates)");
  const int m_steps = setup.time.steps;
  const int g_total = setup.grid_size();
  u.validate_shape(m_steps, g_total);
  SpaceTimeField clamp(m_steps, g_total);
  std::vector<double> q_grid(static_cast<size_t>(g_total));
  for (int n = 1; n <= m_steps; ++n) {
    setup.basis_a->synthesize(adjoint.q[static_cast<size_t>(n) - 1].coeffs, q_grid);
    for (int g = 0; g < g_total; ++g)
      clamp.at(n, g) = std::max(box.u_min.at(n, g),
                                std::min(-q_grid[static_cast<size_t>(g)] / beta5,
                                         box.u_max.at(n, g)));
  }
  return l2q_norm(u - clamp, setup.basis_a->quadrature_weights(), setup.time.dt());
}

QuenchResult solve_obstacle_deep_quench(const ControlProblem& problem,
                                        std::span<const double> alpha_schedule,
                                        double anchor_weight, const OptimizerOptions& options,
                                        QuenchStageCallback on_stage, void* on_stage_data) {
  if (problem.system.potential.kind != PotentialKind::DoubleObstacle)
    throw ValidationError("deep-quench continuation requires the double obstacle potential");
  if (alpha_schedule.empty())
    throw ValidationError("alpha schedule must not be empty");
  for (size_t i = 0; i < alpha_schedule.size(); ++i) {
    if (!(alpha_schedule[i] > 0.0 && alpha_schedule[i] <= 1.0))
      throw ValidationError("alpha schedule entries must lie in (0, 1]");
    if (i > 0 && !(alpha_schedule[i] < alpha_schedule[i - 1]))
      throw ValidationError("alpha schedule must be strictly decreasing");
  }

  const auto& w = problem.system.basis_a->quadrature_weights();
  const double tau = problem.system.time.dt();

  QuenchResult out;
  SpaceTimeField u_prev =
      SpaceTimeField::zero(problem.system.time.steps, problem.system.grid_size());
  bool have_prev = false;

  for (double alpha : alpha_schedule) {
    ControlProblem stage = problem;
    stage.system.potential.smoothing = SmoothingMode::DeepQuench;
    stage.system.potential.quench_alpha = alpha;

    OptimizerOptions stage_options = options;
    stage_options.anchor_weight = have_prev ? anchor_weight : 0.0;
    stage_options.anchor = have_prev ? &u_prev : nullptr;

    const SpaceTimeField u0 = have_prev
        ? u_prev
        : project_admissible(SpaceTimeField::zero(stage.system.time.steps,
                                                  stage.system.grid_size()),
                             stage.box);
    OptimizationResult stage_result = projected_gradient(stage, u0, stage_options);

    QuenchStageRecord rec;
    rec.alpha = alpha;
    rec.cost = evaluate_cost(stage.system, stage_result.state, stage_result.control, stage.cost);
    const SeparationReport sep = measure_separation(stage_result.state, stage.system.potential);
    rec.a_R = sep.a_R;
    rec.b_R = sep.b_R;
    rec.increment_l2q = have_prev ? l2q_norm(stage_result.control - u_prev, w, tau) : 0.0;
    rec.h_alpha_integral = stage_result.state.f1_time_integral;
    const SpaceTimeField lam = extract_multiplier(stage.system, stage_result.state,
                                                  stage_result.adjoint, alpha);
    rec.multiplier_dual = multiplier_dual_proxy(stage.system, lam);
    rec.stationarity = stage_result.stationarity;
    rec.termination = termination_name(stage_result.reason);
    out.stages.push_back(rec);
    if (on_stage) on_stage(rec, on_stage_data);

    u_prev = stage_result.control;
    have_prev = true;
    out.final_result = std::move(stage_result);
  }
  return out;
}

}  // namespace caginalp
