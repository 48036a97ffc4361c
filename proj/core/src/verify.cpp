#include "caginalp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "caginalp/digest.hpp"

namespace caginalp {

namespace {

double slope_fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xs.size(); ++i)
    if (xs[i] > 0.0 && ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  if (lx.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

std::string digest_of(std::uint64_t seed, const std::string& tag) {
  std::ostringstream os;
  os << tag << ':' << seed;
  return hex64(fnv1a64(os.str()));
}

double linf_state_diff(const StateTrajectory& a, const StateTrajectory& b) {
  double sup_t = 0.0, sup_p = 0.0;
  for (size_t n = 0; n < a.theta.size(); ++n) {
    double acc_t = 0.0, acc_p = 0.0;
    for (size_t j = 0; j < a.theta[n].coeffs.size(); ++j) {
      const double d = a.theta[n].coeffs[j] - b.theta[n].coeffs[j];
      acc_t += d * d;
    }
    for (size_t j = 0; j < a.phi[n].coeffs.size(); ++j) {
      const double d = a.phi[n].coeffs[j] - b.phi[n].coeffs[j];
      acc_p += d * d;
    }
    sup_t = std::max(sup_t, std::sqrt(acc_t));
    sup_p = std::max(sup_p, std::sqrt(acc_p));
  }
  return sup_t + sup_p;
}

// L2(Q) distance of two trajectories restricted to slab right endpoints.
double l2q_state_diff(const StateTrajectory& a, const StateTrajectory& b, double tau) {
  double acc = 0.0;
  for (size_t n = 1; n < a.theta.size(); ++n) {
    for (size_t j = 0; j < a.theta[n].coeffs.size(); ++j) {
      const double d = a.theta[n].coeffs[j] - b.theta[n].coeffs[j];
      acc += tau * d * d;
    }
    for (size_t j = 0; j < a.phi[n].coeffs.size(); ++j) {
      const double d = a.phi[n].coeffs[j] - b.phi[n].coeffs[j];
      acc += tau * d * d;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

SpaceTimeField random_smooth_control(const SystemSetup& setup, std::mt19937_64& rng,
                                     double amplitude) {
  const int m_steps = setup.time.steps;
  const int g_total = setup.grid_size();
  const int k_modes = std::min(3, setup.basis_a->mode_count());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  SpaceTimeField f(m_steps, g_total);
  const double t_final = setup.time.final_time;
  for (int k = 0; k < k_modes; ++k) {
    const double c0 = unit(rng), c1 = unit(rng), c2 = unit(rng);
    for (int n = 1; n <= m_steps; ++n) {
      const double t = setup.time.dt() * static_cast<double>(n);
      const double profile = c0 + c1 * std::sin(std::numbers::pi * t / t_final) +
                             c2 * std::cos(std::numbers::pi * t / t_final);
      auto row = f.row(n);
      for (int g = 0; g < g_total; ++g)
        row[static_cast<size_t>(g)] += profile * setup.basis_a->basis_value(k, g);
    }
  }
  const double sup = linf_norm(f);
  if (sup > 0.0) {
    const double s = amplitude / sup;
    for (auto& v : f.values) v *= s;
  }
  return f;
}

SpaceTimeField refine_time(const SpaceTimeField& field, int halvings) {
  SpaceTimeField out = field;
  for (int h = 0; h < halvings; ++h) {
    SpaceTimeField fine(out.steps * 2, out.grid_size);
    for (int n = 1; n <= out.steps; ++n) {
      auto src = out.row(n);
      std::copy(src.begin(), src.end(), fine.row(2 * n - 1).begin());
      std::copy(src.begin(), src.end(), fine.row(2 * n).begin());
    }
    out = std::move(fine);
  }
  return out;
}

ControlProblem refine_time(const ControlProblem& problem, int halvings) {
  ControlProblem out = problem;
  out.system.time.steps = problem.system.time.steps << halvings;
  out.cost.phi_Q = problem.cost.phi_Q.steps > 0 ? refine_time(problem.cost.phi_Q, halvings)
                                                : problem.cost.phi_Q;
  out.cost.theta_Q = problem.cost.theta_Q.steps > 0 ? refine_time(problem.cost.theta_Q, halvings)
                                                    : problem.cost.theta_Q;
  out.box.u_min = refine_time(problem.box.u_min, halvings);
  out.box.u_max = refine_time(problem.box.u_max, halvings);
  return out;
}

ProbeReport fd_gradient_check(const ControlProblem& problem, const SpaceTimeField& u,
                              int directions, std::span<const double> eps_schedule,
                              int tau_halvings, std::uint64_t seed,
                              const ProbeThresholds& thresholds) {
  if (directions < 1) throw ValidationError("fd_gradient_check needs at least one direction");
  if (eps_schedule.empty()) throw ValidationError("fd_gradient_check needs an eps schedule");

  ProbeReport report;
  report.probe = "fd_gradient";
  report.seed = seed;
  report.inputs_digest = digest_of(seed, "fd_gradient");

  std::vector<double> taus, mismatches;
  for (int level = 0; level <= tau_halvings; ++level) {
    const ControlProblem prob = refine_time(problem, level);
    const SpaceTimeField u_level = refine_time(u, level);
    const auto& w = prob.system.basis_a->quadrature_weights();
    const double tau = prob.system.time.dt();

    const StateTrajectory state = solve_state(prob.system, u_level);
    const AdjointTrajectory adjoint = solve_adjoint(prob.system, state, prob.cost);
    const SpaceTimeField grad =
        reduced_gradient(prob.system, u_level, adjoint, prob.cost.beta5);

    std::mt19937_64 rng(seed);
    double worst_best_rel = 0.0;  // max over directions of (best rel error over eps)
    for (int d = 0; d < directions; ++d) {
      SpaceTimeField h = random_smooth_control(prob.system, rng, 1.0);
      const double gh = l2q_inner(grad, h, w, tau);
      double best_rel = PotentialSpec::kInf;
      for (double eps : eps_schedule) {
        SpaceTimeField up = u_level, um = u_level;
        add_scaled(up, eps, h);
        add_scaled(um, -eps, h);
        const double jp = evaluate_cost(prob.system, solve_state(prob.system, up), up, prob.cost);
        const double jm = evaluate_cost(prob.system, solve_state(prob.system, um), um, prob.cost);
        const double fd = (jp - jm) / (2.0 * eps);
        const double rel = std::abs(fd - gh) / std::max(1e-14, std::abs(fd));
        best_rel = std::min(best_rel, rel);
        if (level == 0) {
          report.add_measure("dir" + std::to_string(d) + "_eps" + std::to_string(eps) + "_rel",
                             rel);
        }
      }
      worst_best_rel = std::max(worst_best_rel, best_rel);
    }
    taus.push_back(tau);
    mismatches.push_back(worst_best_rel);
    report.add_measure("tau" + std::to_string(level) + "_mismatch", worst_best_rel);
  }

  const double slope = slope_fit_loglog(taus, mismatches);
  report.add_measure("mismatch_tau_slope", slope);
  report.checks.push_back({"fd_rel_error", mismatches.front(), thresholds.fd_rel_tol,
                           mismatches.front() <= thresholds.fd_rel_tol});
  if (tau_halvings >= 2) {
    report.checks.push_back(
        {"mismatch_slope", slope, thresholds.fd_slope_min, slope >= thresholds.fd_slope_min});
  }
  return report;
}

ProbeReport stability_probe(const ControlProblem& problem, int pairs, std::uint64_t seed,
                            const ProbeThresholds& thresholds) {
  if (pairs < 1) throw ValidationError("stability_probe needs at least one pair");
  ProbeReport report;
  report.probe = "stability";
  report.seed = seed;
  report.inputs_digest = digest_of(seed, "stability");

  const double amplitude = 0.8 * problem.box.radius_R;
  double max_ratio_levels[2] = {0.0, 0.0};
  for (int level = 0; level < 2; ++level) {
    const ControlProblem prob = refine_time(problem, level);
    const auto& w = prob.system.basis_a->quadrature_weights();
    const double tau = prob.system.time.dt();
    std::mt19937_64 rng(seed);
    double max_ratio = 0.0;
    for (int i = 0; i < pairs; ++i) {
      const SpaceTimeField u1 = random_smooth_control(prob.system, rng, amplitude);
      SpaceTimeField u2 = random_smooth_control(prob.system, rng, amplitude);
      double dist = l2q_norm(u1 - u2, w, tau);
      if (dist < 1e-12) {  // pairs are distinct by construction; nudge if not
        u2.values[0] += 0.1 * amplitude;
        dist = l2q_norm(u1 - u2, w, tau);
      }
      const StateTrajectory s1 = solve_state(prob.system, u1);
      const StateTrajectory s2 = solve_state(prob.system, u2);
      max_ratio = std::max(max_ratio, linf_state_diff(s1, s2) / dist);
    }
    max_ratio_levels[level] = max_ratio;
    report.add_measure(level == 0 ? "max_ratio_coarse" : "max_ratio_fine", max_ratio);
  }
  const double drift =
      std::abs(max_ratio_levels[1] - max_ratio_levels[0]) / std::max(1e-14, max_ratio_levels[0]);
  report.add_measure("ratio_drift", drift);
  report.checks.push_back(
      {"ratio_stable", drift, thresholds.stability_drift, drift <= thresholds.stability_drift});
  return report;
}

ProbeReport regularization_sweep(const SystemSetup& setup, const SpaceTimeField& u,
                                 SweepMode mode, int levels, double level0,
                                 const ProbeThresholds& thresholds) {
  if (levels < 2) throw ValidationError("regularization_sweep needs at least two levels");
  ProbeReport report;
  report.probe = mode == SweepMode::MoreauYosida ? "regularization_my" : "regularization_dq";
  report.seed = 0;
  report.inputs_digest = digest_of(static_cast<std::uint64_t>(levels), report.probe);
  if (mode == SweepMode::DeepQuench && setup.potential.kind != PotentialKind::DoubleObstacle)
    throw ValidationError("deep-quench sweep requires the double obstacle potential");

  const double tau = setup.time.dt();
  std::vector<StateTrajectory> solved;
  std::vector<double> level_values;
  std::vector<double> diag_sup;       // sup_n theta V^rho norm per level
  std::vector<double> h_integrals;    // deep-quench: int_Q h_alpha
  double value = level0;
  for (int k = 0; k < levels; ++k, value *= 0.5) {
    try {
      SystemSetup level_setup = setup;
      if (mode == SweepMode::MoreauYosida) {
        level_setup.potential.smoothing = SmoothingMode::MoreauYosida;
        level_setup.potential.yosida_lambda = value;
      } else {
        level_setup.potential.smoothing = SmoothingMode::DeepQuench;
        level_setup.potential.quench_alpha = value;
      }
      StateTrajectory traj = solve_state(level_setup, u);
      double sup = 0.0;
      for (const auto& d : traj.diag) sup = std::max(sup, d.theta_vrho);
      diag_sup.push_back(sup);
      h_integrals.push_back(traj.f1_time_integral);
      solved.push_back(std::move(traj));
      level_values.push_back(value);
      report.add_measure("level" + std::to_string(k) + "_value", value);
    } catch (const SolverError& e) {
      report.add_measure("level" + std::to_string(k) + "_failed", 1.0);
      (void)e;
    }
  }

  std::vector<double> diffs;
  for (size_t k = 1; k < solved.size(); ++k) {
    const double d = l2q_state_diff(solved[k], solved[k - 1], tau);
    diffs.push_back(d);
    report.add_measure("diff" + std::to_string(k), d);
  }
  bool decreasing = diffs.size() >= 2;
  for (size_t k = 1; k < diffs.size(); ++k)
    if (diffs[k] > diffs[k - 1]) decreasing = false;
  report.checks.push_back({"differences_decreasing", decreasing ? 1.0 : 0.0, 1.0, decreasing});

  if (!diag_sup.empty()) {
    const double cap = thresholds.sweep_bound_factor * std::max(1e-12, diag_sup.front());
    const double worst = *std::max_element(diag_sup.begin(), diag_sup.end());
    report.add_measure("diag_sup_max", worst);
    report.checks.push_back({"diagnostics_bounded", worst, cap, worst <= cap});
  }
  if (mode == SweepMode::DeepQuench && !h_integrals.empty()) {
    // int_Q h_alpha <= 2 ln 2 |Omega| T since 0 <= h_alpha <= alpha 2 ln 2 on [-1,1].
    const double analytic_cap = 2.0 * std::log(2.0) *
                                setup.basis_b->domain().measure() * setup.time.final_time *
                                (1.0 + 1e-9);
    const double worst = *std::max_element(h_integrals.begin(), h_integrals.end());
    report.add_measure("h_alpha_integral_max", worst);
    report.checks.push_back({"h_alpha_bounded", worst, analytic_cap, worst <= analytic_cap});
  }
  report.checks.push_back({"all_levels_solved",
                           static_cast<double>(solved.size()), static_cast<double>(levels),
                           static_cast<int>(solved.size()) == levels});
  return report;
}

ProbeReport energy_dissipation_probe(const SystemSetup& setup, int samples, std::uint64_t seed,
                                     const ProbeThresholds& thresholds) {
  if (samples < 1) throw ValidationError("energy_dissipation_probe needs at least one sample");
  ProbeReport report;
  report.probe = "energy_dissipation";
  report.seed = seed;
  report.inputs_digest = digest_of(seed, "energy");

  SystemSetup flow = setup;
  flow.latent = LatentHeatSpec{LatentHeatForm::Constant, 0.0, 0.0, 0.0, 0.0};
  const int g_total = flow.grid_size();
  const int n_b = flow.basis_b->mode_count();
  const SpaceTimeField zero_u = SpaceTimeField::zero(flow.time.steps, g_total);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst_rise = 0.0;
  for (int s = 0; s < samples; ++s) {
    // Random smooth initial phi, sup-norm about 0.8 and strictly interior.
    SpectralField phi0(flow.basis_b);
    const int k_modes = std::min(4, n_b);
    for (int k = 0; k < k_modes; ++k) phi0.coeffs[static_cast<size_t>(k)] = unit(rng);
    auto grid = to_grid(phi0);
    double sup = 0.0;
    for (double v : grid) sup = std::max(sup, std::abs(v));
    if (sup > 0.0)
      for (auto& c : phi0.coeffs) c *= 0.8 / sup;
    flow.init.phi0 = phi0;
    flow.init.theta0 = SpectralField::zero(flow.basis_a);
    flow.init.r0_minus = -0.85;
    flow.init.r0_plus = 0.85;

    const StateTrajectory traj = solve_state(flow, zero_u);
    const double scale = std::max(1.0, std::abs(traj.diag[0].energy));
    for (size_t n = 1; n < traj.diag.size(); ++n) {
      const double rise = (traj.diag[n].energy - traj.diag[n - 1].energy) / scale;
      worst_rise = std::max(worst_rise, rise);
    }
  }
  report.add_measure("worst_energy_rise_rel", worst_rise);
  report.checks.push_back({"energy_nonincreasing", worst_rise, thresholds.energy_slack_rel,
                           worst_rise <= thresholds.energy_slack_rel});
  return report;
}

ProbeReport remainder_probe(const SystemSetup& setup, const SpaceTimeField& u,
                            std::span<const double> scales, std::uint64_t seed,
                            const ProbeThresholds& thresholds, RemainderReport* raw) {
  ProbeReport report;
  report.probe = "remainder";
  report.seed = seed;
  report.inputs_digest = digest_of(seed, "remainder");
  std::mt19937_64 rng(seed);
  const SpaceTimeField h = random_smooth_control(setup, rng, 1.0);
  const RemainderReport rem = frechet_remainder_probe(setup, u, h, scales);
  for (size_t i = 0; i < rem.scales.size(); ++i) {
    report.add_measure("scale" + std::to_string(i), rem.scales[i]);
    report.add_measure("remainder" + std::to_string(i), rem.remainders[i]);
  }
  report.add_measure("slope", rem.slope);
  report.checks.push_back({"conclusive", rem.conclusive ? 1.0 : 0.0, 1.0, rem.conclusive});
  report.checks.push_back({"slope_min", rem.slope, thresholds.remainder_slope_min,
                           rem.slope >= thresholds.remainder_slope_min});
  report.checks.push_back({"slope_max", rem.slope, thresholds.remainder_slope_max,
                           rem.slope <= thresholds.remainder_slope_max});
  if (raw) *raw = rem;
  return report;
}

ProbeReport tiny_instance_oracle(const ControlProblem& problem, const OptimizerOptions& options,
                                 int resolution, const ProbeThresholds& thresholds) {
  (void)thresholds;
  if (resolution < 3) throw ValidationError("tiny_instance_oracle needs resolution >= 3");
  if (problem.time_blocks < 1 || problem.time_blocks > 2)
    throw ValidationError("tiny_instance_oracle requires a 1- or 2-block control");
  if (problem.system.basis_a->mode_count() > 2 || problem.system.basis_b->mode_count() > 2)
    throw ValidationError("tiny_instance_oracle requires at most 2 modes per operator");
  // Spatially and temporally constant box so a block value is one scalar.
  const double lo = problem.box.u_min.values.front();
  const double hi = problem.box.u_max.values.front();
  for (double v : problem.box.u_min.values)
    if (v != lo) throw ValidationError("tiny_instance_oracle requires constant box bounds");
  for (double v : problem.box.u_max.values)
    if (v != hi) throw ValidationError("tiny_instance_oracle requires constant box bounds");

  ProbeReport report;
  report.probe = "tiny_instance";
  report.seed = 0;
  report.inputs_digest = digest_of(static_cast<std::uint64_t>(resolution), "tiny");

  const int blocks = problem.time_blocks;
  const int m_steps = problem.system.time.steps;
  const int g_total = problem.system.grid_size();
  const double spacing = (hi - lo) / static_cast<double>(resolution - 1);

  auto control_from_blocks = [&](double b0, double b1) {
    SpaceTimeField u(m_steps, g_total);
    const int split = blocks == 2 ? m_steps / 2 : m_steps;
    for (int n = 1; n <= m_steps; ++n) {
      const double v = n <= split ? b0 : b1;
      auto row = u.row(n);
      std::fill(row.begin(), row.end(), v);
    }
    return u;
  };

  double best_cost = PotentialSpec::kInf;
  double best_b0 = lo, best_b1 = lo;
  std::vector<double> grid_cost(static_cast<size_t>(resolution) *
                                static_cast<size_t>(blocks == 2 ? resolution : 1));
  for (int i = 0; i < resolution; ++i) {
    const double b0 = lo + spacing * static_cast<double>(i);
    const int j_count = blocks == 2 ? resolution : 1;
    for (int j = 0; j < j_count; ++j) {
      const double b1 = blocks == 2 ? lo + spacing * static_cast<double>(j) : b0;
      const SpaceTimeField u = control_from_blocks(b0, b1);
      const double cost =
          evaluate_cost(problem.system, solve_state(problem.system, u), u, problem.cost);
      grid_cost[static_cast<size_t>(i) * static_cast<size_t>(j_count) + static_cast<size_t>(j)] =
          cost;
      if (cost < best_cost) {
        best_cost = cost;
        best_b0 = b0;
        best_b1 = b1;
      }
    }
  }

  const OptimizationResult opt =
      projected_gradient(problem, SpaceTimeField::zero(m_steps, g_total), options);

  // Recover the optimizer's block values (block-constant by construction).
  const int split = blocks == 2 ? m_steps / 2 : m_steps;
  const double pg_b0 = opt.control.at(1, 0);
  const double pg_b1 = blocks == 2 ? opt.control.at(split + 1, 0) : pg_b0;

  report.add_measure("oracle_b0", best_b0);
  report.add_measure("oracle_b1", best_b1);
  report.add_measure("oracle_cost", best_cost);
  report.add_measure("pg_b0", pg_b0);
  report.add_measure("pg_b1", pg_b1);
  report.add_measure("pg_cost", opt.cost);
  report.add_measure("pg_stationarity", opt.stationarity);

  const double argmin_err = std::max(std::abs(pg_b0 - best_b0), std::abs(pg_b1 - best_b1));
  report.checks.push_back({"argmin_within_one_spacing", argmin_err, spacing,
                           argmin_err <= spacing + 1e-15});

  // Quadratic resolution bound of the grid, estimated from second differences
  // around the argmin.
  const int j_count = blocks == 2 ? resolution : 1;
  auto cost_at = [&](int i, int j) {
    i = std::clamp(i, 0, resolution - 1);
    j = std::clamp(j, 0, j_count - 1);
    return grid_cost[static_cast<size_t>(i) * static_cast<size_t>(j_count) +
                     static_cast<size_t>(j)];
  };
  int bi = static_cast<int>(std::lround((best_b0 - lo) / spacing));
  int bj = blocks == 2 ? static_cast<int>(std::lround((best_b1 - lo) / spacing)) : 0;
  double curvature = 0.0;
  curvature = std::max(curvature,
                       std::abs(cost_at(bi + 1, bj) - 2.0 * cost_at(bi, bj) + cost_at(bi - 1, bj)));
  if (blocks == 2)
    curvature = std::max(curvature, std::abs(cost_at(bi, bj + 1) - 2.0 * cost_at(bi, bj) +
                                             cost_at(bi, bj - 1)));
  const double value_bound = std::max(2.0 * curvature, 1e-10 * std::max(1.0, std::abs(best_cost)));
  const double value_err = std::abs(opt.cost - best_cost);
  report.add_measure("value_error", value_err);
  report.checks.push_back({"value_within_grid_resolution", value_err, value_bound,
                           value_err <= value_bound});
  report.checks.push_back({"pg_not_worse_than_grid", opt.cost,
                           best_cost + 1e-10 * std::max(1.0, std::abs(best_cost)),
                           opt.cost <= best_cost + 1e-10 * std::max(1.0, std::abs(best_cost))});
  return report;
}

}  // namespace caginalp
