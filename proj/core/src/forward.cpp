#include "caginalp/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace caginalp {

namespace {

// Root of w + tau F1'(w) = target; strictly monotone in w. Newton with a
// maintained bracket, bisection fallback. For singular families the bracket
// is the open unit interval, so iterates never touch the endpoints.
double solve_reaction(const PotentialSpec& spec, double tau, double target) {
  double lo, hi;
  if (spec.needs_domain_guard()) {
    // F1' lives on (-1, 1) and blows up at the endpoints: a root always
    // exists strictly inside.
    lo = std::nextafter(-1.0, 0.0);
    hi = std::nextafter(1.0, 0.0);
  } else {
    // Globally defined monotone reaction: expand a bracket around the target.
    double m = std::abs(target) + 1.0;
    lo = -m;
    hi = m;
    for (int k = 0; k < 120; ++k) {
      if (lo + tau * eval_F1_prime(spec, lo) <= target) break;
      lo *= 2.0;
    }
    for (int k = 0; k < 120; ++k) {
      if (hi + tau * eval_F1_prime(spec, hi) >= target) break;
      hi *= 2.0;
    }
  }

  auto g = [&](double w) { return w + tau * eval_F1_prime(spec, w) - target; };
  if (spec.needs_domain_guard()) {
    // No sign change inside the representable open interval means the
    // implicit solution sits at the potential boundary itself.
    if (g(hi) < 0.0 || g(lo) > 0.0)
      throw SolverError(SolverError::Kind::DomainEscape,
                        "implicit phi value reaches the potential boundary (target=" +
                            std::to_string(target) + ")");
  }
  double w = std::min(std::max(target, lo), hi);
  const double tol = 1e-13 * std::max(1.0, std::abs(target));
  for (int it = 0; it < 200; ++it) {
    const double gw = g(w);
    if (std::abs(gw) <= tol) return w;
    if (gw > 0.0) hi = w; else lo = w;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max({std::abs(lo), std::abs(hi), 1.0}))
      return 0.5 * (lo + hi);
    double w_next = w - gw / (1.0 + tau * eval_F1_second(spec, w));
    if (!(w_next > lo && w_next < hi)) w_next = 0.5 * (lo + hi);
    w = w_next;
  }
  if (std::abs(g(w)) <= 1e-9 * std::max(1.0, std::abs(target))) return w;
  throw SolverError(SolverError::Kind::InnerDivergence,
                    "pointwise reaction Newton failed at target=" + std::to_string(target));
}

struct GuardBounds {
  bool active = false;
  double lo = 0.0;
  double hi = 0.0;
};

GuardBounds make_guard(const PotentialSpec& spec, double margin) {
  GuardBounds g;
  if (!spec.needs_domain_guard()) return g;
  const double half_width = 0.5 * (spec.domain_upper() - spec.domain_lower());
  g.active = true;
  g.lo = spec.domain_lower() + margin * half_width;
  g.hi = spec.domain_upper() - margin * half_width;
  return g;
}

}  // namespace

void SolverParams::validate() const {
  if (!(fp_tol > 0.0)) throw ValidationError("inner tolerance must be positive");
  if (max_inner < 1) throw ValidationError("max_inner must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");
  if (!(guard_margin > 0.0 && guard_margin < 1.0))
    throw ValidationError("guard margin must lie in (0, 1)");
}

void SystemSetup::validate() const {
  if (!basis_a || !basis_b) throw ValidationError("system setup is missing a basis");
  if (!basis_a->same_grid(*basis_b))
    throw ValidationError("operator bases must share the domain (and collocation grid)");
  frac.validate();
  potential.validate();
  latent.validate();
  time.validate();
  solver.validate();
  init.theta0.validate();
  init.phi0.validate();
  if (init.theta0.basis.get() != basis_a.get())
    throw ValidationError("theta0 must live in the A basis");
  if (init.phi0.basis.get() != basis_b.get())
    throw ValidationError("phi0 must live in the B basis");

  // Initial separation: r_- < r0- <= phi0 <= r0+ < r_+ on the grid.
  const double r_minus = potential.domain_lower();
  const double r_plus = potential.domain_upper();
  if (!(r_minus < init.r0_minus && init.r0_minus <= init.r0_plus && init.r0_plus < r_plus))
    throw ValidationError("declared initial bounds must satisfy r_- < r0- <= r0+ < r_+");
  const auto grid = to_grid(init.phi0);
  for (double v : grid) {
    if (v < init.r0_minus - 1e-12 || v > init.r0_plus + 1e-12)
      throw ValidationError("phi0 grid values violate the declared initial bounds");
  }
}

SpectralField StateTrajectory::dphi_quotient(int n) const {
  SpectralField out(phi[static_cast<size_t>(n)].basis);
  const double inv_tau = 1.0 / time.dt();
  for (size_t j = 0; j < out.coeffs.size(); ++j)
    out.coeffs[j] = (phi[static_cast<size_t>(n)].coeffs[j] -
                     phi[static_cast<size_t>(n) - 1].coeffs[j]) * inv_tau;
  return out;
}

StateTrajectory solve_state(const SystemSetup& setup, const SpaceTimeField& control) {
  setup.validate();
  if (setup.potential.derivative_undefined())
    throw ValidationError(
        "double obstacle potential with exact smoothing has no pointwise F1'; "
        "select Moreau-Yosida or deep-quench smoothing");
  const int n_a = setup.basis_a->mode_count();
  const int n_b = setup.basis_b->mode_count();
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  const double tau = setup.time.dt();
  control.validate_shape(m_steps, g_total);
  if (!control.finite())
    throw SolverError(SolverError::Kind::NonFinite, "control field has non-finite entries");

  const auto& pot = setup.potential;
  const auto& ell = setup.latent;
  const auto& wq = setup.basis_a->quadrature_weights();
  const GuardBounds guard = make_guard(pot, setup.solver.guard_margin);

  StateTrajectory traj;
  traj.time = setup.time;
  traj.theta.reserve(static_cast<size_t>(m_steps) + 1);
  traj.phi.reserve(static_cast<size_t>(m_steps) + 1);
  traj.diag.resize(static_cast<size_t>(m_steps) + 1);
  traj.theta.push_back(setup.init.theta0);
  traj.phi.push_back(setup.init.phi0);
  traj.tau_lipschitz_warning = tau * f2_lipschitz_constant(pot) > 1.0;

  // Diagonal resolvent factors for the two implicit diffusion solves.
  std::vector<double> inv_a(static_cast<size_t>(n_a));
  std::vector<double> inv_b(static_cast<size_t>(n_b));
  for (int j = 0; j < n_a; ++j)
    inv_a[static_cast<size_t>(j)] =
        1.0 / (1.0 + tau * std::pow(setup.basis_a->eigenvalue(j), 2.0 * setup.frac.rho));
  for (int j = 0; j < n_b; ++j)
    inv_b[static_cast<size_t>(j)] =
        1.0 / (1.0 + tau * std::pow(setup.basis_b->eigenvalue(j), 2.0 * setup.frac.sigma));

  std::vector<double> theta_grid(static_cast<size_t>(g_total));
  std::vector<double> phi_grid(static_cast<size_t>(g_total));
  std::vector<double> work_grid(static_cast<size_t>(g_total));
  std::vector<double> reaction(static_cast<size_t>(g_total));
  std::vector<double> newton_grid(static_cast<size_t>(g_total));
  std::vector<double> rhs_b(static_cast<size_t>(n_b));
  std::vector<double> cand(static_cast<size_t>(n_b));
  std::vector<double> prev_cand(static_cast<size_t>(n_b));

  setup.basis_a->synthesize(traj.theta.back().coeffs, theta_grid);
  setup.basis_b->synthesize(traj.phi.back().coeffs, phi_grid);

  auto record_diag = [&](int n, int inner_iters) {
    StepDiagnostics d;
    const auto& th = traj.theta[static_cast<size_t>(n)];
    const auto& ph = traj.phi[static_cast<size_t>(n)];
    d.theta_l2 = th.l2_norm();
    d.theta_vrho = norm_vs(th, setup.frac.rho);
    if (n > 0) d.dphi_dt_l2 = traj.dphi_quotient(n).l2_norm();
    auto pg = to_grid(ph);
    d.phi_min = *std::min_element(pg.begin(), pg.end());
    d.phi_max = *std::max_element(pg.begin(), pg.end());
    d.energy = free_energy(ph, setup.frac.sigma, pot);
    d.inner_iters = inner_iters;
    traj.diag[static_cast<size_t>(n)] = d;
    if (n > 0) {
      double f1_slice = 0.0;
      for (int g = 0; g < g_total; ++g) {
        // F1 under the active smoothing: recover it as F - F2 pointwise.
        const double r = pg[static_cast<size_t>(g)];
        double f2;
        switch (pot.kind) {
          case PotentialKind::Regular: f2 = 0.25 * (1.0 - 2.0 * r * r); break;
          case PotentialKind::Logarithmic: f2 = -pot.c1 * r * r; break;
          default: f2 = pot.c2 * (1.0 - r * r); break;
        }
        f1_slice += wq[static_cast<size_t>(g)] * (eval_F(pot, r) - f2);
      }
      traj.f1_time_integral += tau * f1_slice;
    }
  };
  record_diag(0, 0);

  for (int n = 0; n < m_steps; ++n) {
    // ---- phi step ----------------------------------------------------
    // rhs = phi^n - tau F2'(phi^n) + tau ell(phi^n) theta^n  (coefficients)
    for (int g = 0; g < g_total; ++g) {
      const double p = phi_grid[static_cast<size_t>(g)];
      work_grid[static_cast<size_t>(g)] =
          -eval_F2_prime(pot, p) + eval_ell(ell, p, 0) * theta_grid[static_cast<size_t>(g)];
    }
    setup.basis_b->analyze(work_grid, rhs_b);
    for (int j = 0; j < n_b; ++j)
      rhs_b[static_cast<size_t>(j)] =
          traj.phi.back().coeffs[static_cast<size_t>(j)] + tau * rhs_b[static_cast<size_t>(j)];

    // Inner iteration: diagonal solve composed with pointwise Newton on the
    // monotone reaction, damped update of the reaction field.
    for (int g = 0; g < g_total; ++g)
      reaction[static_cast<size_t>(g)] = eval_F1_prime(pot, phi_grid[static_cast<size_t>(g)]);
    std::vector<double> reaction_coeff(static_cast<size_t>(n_b));
    prev_cand = traj.phi.back().coeffs;
    int inner = 0;
    bool converged = false;
    for (; inner < setup.solver.max_inner; ++inner) {
      setup.basis_b->analyze(reaction, reaction_coeff);
      for (int j = 0; j < n_b; ++j)
        cand[static_cast<size_t>(j)] = inv_b[static_cast<size_t>(j)] *
            (rhs_b[static_cast<size_t>(j)] - tau * reaction_coeff[static_cast<size_t>(j)]);
      setup.basis_b->synthesize(cand, work_grid);
      for (int g = 0; g < g_total; ++g) {
        const double target = work_grid[static_cast<size_t>(g)] + tau * reaction[static_cast<size_t>(g)];
        newton_grid[static_cast<size_t>(g)] = solve_reaction(pot, tau, target);
      }
      const double omega = setup.solver.damping;
      for (int g = 0; g < g_total; ++g) {
        const double z_new = eval_F1_prime(pot, newton_grid[static_cast<size_t>(g)]);
        reaction[static_cast<size_t>(g)] =
            (1.0 - omega) * reaction[static_cast<size_t>(g)] + omega * z_new;
      }

      double change = 0.0, scale = 0.0;
      for (int j = 0; j < n_b; ++j) {
        const double d = cand[static_cast<size_t>(j)] - prev_cand[static_cast<size_t>(j)];
        change += d * d;
        scale += cand[static_cast<size_t>(j)] * cand[static_cast<size_t>(j)];
      }
      prev_cand = cand;
      if (std::sqrt(change) <= setup.solver.fp_tol * std::max(1.0, std::sqrt(scale))) {
        converged = true;
        ++inner;
        break;
      }
    }
    if (!converged) {
      if (guard.active) {
        for (int g = 0; g < g_total; ++g) {
          const double w = newton_grid[static_cast<size_t>(g)];
          if (w < guard.lo || w > guard.hi)
            throw SolverError(SolverError::Kind::DomainEscape,
                              "phi reached " + std::to_string(w) + " at step " +
                                  std::to_string(n + 1) + ", beyond the separation guard");
        }
      }
      throw SolverError(SolverError::Kind::InnerDivergence,
                        "phi-step inner iteration exceeded max_inner at step " +
                            std::to_string(n + 1));
    }

    SpectralField phi_next(setup.basis_b, cand);
    if (!phi_next.finite())
      throw SolverError(SolverError::Kind::NonFinite,
                        "phi became non-finite at step " + std::to_string(n + 1));
    setup.basis_b->synthesize(phi_next.coeffs, work_grid);
    if (guard.active) {
      for (int g = 0; g < g_total; ++g) {
        const double v = work_grid[static_cast<size_t>(g)];
        if (v < guard.lo || v > guard.hi)
          throw SolverError(SolverError::Kind::DomainEscape,
                            "phi reached " + std::to_string(v) + " at step " +
                                std::to_string(n + 1) + ", beyond the separation guard");
      }
    }

    // ---- theta step ---------------------------------------------------
    // rhs = theta^n - ell(phi^{n+1}) (phi^{n+1} - phi^n) + tau u^{n+1}
    auto u_row = control.row(n + 1);
    for (int g = 0; g < g_total; ++g) {
      const double dphi = work_grid[static_cast<size_t>(g)] - phi_grid[static_cast<size_t>(g)];
      reaction[static_cast<size_t>(g)] =
          -eval_ell(ell, work_grid[static_cast<size_t>(g)], 0) * dphi +
          tau * u_row[static_cast<size_t>(g)];
    }
    std::vector<double> rhs_a(static_cast<size_t>(n_a));
    setup.basis_a->analyze(reaction, rhs_a);
    SpectralField theta_next(setup.basis_a);
    for (int j = 0; j < n_a; ++j)
      theta_next.coeffs[static_cast<size_t>(j)] = inv_a[static_cast<size_t>(j)] *
          (traj.theta.back().coeffs[static_cast<size_t>(j)] + rhs_a[static_cast<size_t>(j)]);
    if (!theta_next.finite())
      throw SolverError(SolverError::Kind::NonFinite,
                        "theta became non-finite at step " + std::to_string(n + 1));

    traj.phi.push_back(std::move(phi_next));
    traj.theta.push_back(std::move(theta_next));
    phi_grid = work_grid;
    setup.basis_a->synthesize(traj.theta.back().coeffs, theta_grid);
    record_diag(n + 1, inner);
  }

  traj.phi_min_overall = traj.diag[0].phi_min;
  traj.phi_max_overall = traj.diag[0].phi_max;
  for (const auto& d : traj.diag) {
    traj.phi_min_overall = std::min(traj.phi_min_overall, d.phi_min);
    traj.phi_max_overall = std::max(traj.phi_max_overall, d.phi_max);
  }
  traj.separation_satisfied = traj.phi_min_overall > pot.domain_lower() &&
                              traj.phi_max_overall < pot.domain_upper();

  // Measured sup of |F'''| on the realized range (dense sampling). For the
  // families with a singular third derivative this reports the endpoint
  // values; it is a diagnostic, not an assertion.
  if (!pot.derivative_undefined()) {
    double sup = 0.0;
    const int samples = 201;
    for (int i = 0; i < samples; ++i) {
      const double r = traj.phi_min_overall +
                       (traj.phi_max_overall - traj.phi_min_overall) *
                           static_cast<double>(i) / static_cast<double>(samples - 1);
      if (pot.needs_domain_guard() && !(r > -1.0 && r < 1.0)) continue;
      sup = std::max(sup, std::abs(eval_F_third(pot, r)));
    }
    traj.f_third_sup = sup;
  }
  return traj;
}

StateTrajectory solve_state_moreau_yosida(const SystemSetup& setup,
                                          const SpaceTimeField& control, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("Moreau-Yosida lambda must be positive");
  SystemSetup smoothed = setup;
  smoothed.potential.smoothing = SmoothingMode::MoreauYosida;
  smoothed.potential.yosida_lambda = lambda;
  return solve_state(smoothed, control);
}

SeparationReport measure_separation(const StateTrajectory& trajectory,
                                    const PotentialSpec& potential) {
  SeparationReport r;
  r.a_R = trajectory.phi_min_overall;
  r.b_R = trajectory.phi_max_overall;
  r.satisfied = r.a_R > potential.domain_lower() && r.b_R < potential.domain_upper();
  return r;
}

double free_energy(const SpectralField& phi, double sigma, const PotentialSpec& potential) {
  phi.validate();
  potential.validate();
  double seminorm_sq = 0.0;
  for (size_t j = 0; j < phi.coeffs.size(); ++j) {
    const double lam = phi.basis->eigenvalue(static_cast<int>(j));
    const double pw = lam > 0.0 ? std::pow(lam, sigma) : 0.0;
    seminorm_sq += pw * pw * phi.coeffs[j] * phi.coeffs[j];
  }
  const auto grid = to_grid(phi);
  const auto& w = phi.basis->quadrature_weights();
  double bulk = 0.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    const double f = eval_F(potential, grid[g]);
    if (f >= PotentialSpec::kInf)
      throw ValidationError("free_energy: phi leaves the potential domain");
    bulk += w[g] * f;
  }
  return 0.5 * seminorm_sq + bulk;
}

}  // namespace caginalp
