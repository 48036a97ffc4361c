#pragma once

#include <span>
#include <string>
#include <vector>

#include "caginalp/sensitivity.hpp"

namespace caginalp {

/// Full optimal-control problem: dynamics, cost and box constraints.
/// time_blocks > 0 restricts controls to fields that are constant on that
/// many equal runs of time slabs; the projected-gradient iteration then works
/// in the restricted subspace (gradients are block-averaged, which is the
/// L2(Q)-orthogonal projection onto it).
struct ControlProblem {
  SystemSetup system;
  CostSpec cost;
  BoxConstraints box;
  int time_blocks = 0;

  void validate() const;
};

/// Discrete cost value; spatial integrals by collocation quadrature, time
/// integrals by the per-slab rule the time stepping induces.
double evaluate_cost(const SystemSetup& setup, const StateTrajectory& trajectory,
                     const SpaceTimeField& u, const CostSpec& cost);

struct OptimizerOptions {
  int max_iters = 100;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  double stationarity_tol = 1e-6;
  bool allow_zero_beta5 = false;
  double anchor_weight = 0.0;              // quadratic anchor (adapted cost)
  const SpaceTimeField* anchor = nullptr;  // borrowed; may be null when weight is 0
};

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double stationarity = 0.0;
  double step = 0.0;
  int forward_solves = 0;  // cumulative
};

enum class TerminationReason { Stationary, MaxIterations, LineSearchExhausted };

const char* termination_name(TerminationReason r);

struct OptimizationResult {
  SpaceTimeField control;
  double cost = 0.0;
  double stationarity = 0.0;
  std::vector<IterationRecord> history;
  TerminationReason reason = TerminationReason::MaxIterations;
  StateTrajectory state;
  AdjointTrajectory adjoint;
  SpaceTimeField gradient;
  int forward_solves = 0;
};

/// Projected gradient with Armijo backtracking on the true reduced cost
/// (one forward solve per trial). Terminates when
/// |u - P(u - g)|_{L2(Q)} <= stationarity_tol.
OptimizationResult projected_gradient(const ControlProblem& problem, SpaceTimeField u0,
                                      const OptimizerOptions& options);

/// |u - clamp(-q / beta5)|_{L2(Q)}; requires beta5 > 0.
double stationarity_residual(const SystemSetup& setup, const SpaceTimeField& u,
                             const AdjointTrajectory& adjoint, double beta5,
                             const BoxConstraints& box);

struct QuenchStageRecord {
  double alpha = 0.0;
  double cost = 0.0;
  double a_R = 0.0;
  double b_R = 0.0;
  double increment_l2q = 0.0;        // |u_alpha - u_prev|_{L2(Q)}; 0 at first stage
  double h_alpha_integral = 0.0;     // int_Q h_alpha(phi_alpha)
  double multiplier_dual = 0.0;      // dual-norm proxy of Lambda_alpha
  double stationarity = 0.0;
  std::string termination;
};

struct QuenchResult {
  OptimizationResult final_result;
  std::vector<QuenchStageRecord> stages;
};

using QuenchStageCallback = void (*)(const QuenchStageRecord&, void*);

/// Deep-quench continuation for the double obstacle problem: one optimization
/// per alpha in the strictly decreasing schedule, each stage anchored to the
/// previous optimum through the adapted quadratic term (first stage free).
/// A stage failure propagates after the callback has seen every completed
/// stage, so partial records survive.
QuenchResult solve_obstacle_deep_quench(const ControlProblem& problem,
                                        std::span<const double> alpha_schedule,
                                        double anchor_weight, const OptimizerOptions& options,
                                        QuenchStageCallback on_stage = nullptr,
                                        void* on_stage_data = nullptr);

}  // namespace caginalp
