#include "caginalp/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace caginalp {

namespace {

// Preconditioned CG for (I + tau D + tau S^T W diag(f'') S) x = rhs in
// coefficient space, D the diagonal fractional symbol. The reaction diagonal
// may be negative (double wells), but the operator stays positive definite
// as long as 1 + tau min(f'') > 0, which is checked up front.
class HelmholtzReactionSolver {
public:
  HelmholtzReactionSolver(const EigenBasis& basis, double tau, double two_sigma)
      : basis_(basis), tau_(tau) {
    const int n = basis.mode_count();
    symbol_.resize(static_cast<size_t>(n));
    precond_.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      const double lam = basis.eigenvalue(j);
      symbol_[static_cast<size_t>(j)] = lam > 0.0 ? std::pow(lam, two_sigma) : 0.0;
      precond_[static_cast<size_t>(j)] = 1.0 / (1.0 + tau * symbol_[static_cast<size_t>(j)]);
    }
    grid_.resize(static_cast<size_t>(basis.grid_size()));
    tmp_.resize(static_cast<size_t>(n));
  }

  void set_reaction(std::vector<double> reaction_grid) {
    reaction_ = std::move(reaction_grid);
    const double mn = *std::min_element(reaction_.begin(), reaction_.end());
    if (!(1.0 + tau_ * mn > 0.0))
      throw SolverError(SolverError::Kind::InnerDivergence,
                        "implicit reaction operator lost positive definiteness; reduce tau");
  }

  void apply(std::span<const double> x, std::span<double> y) {
    basis_.synthesize(x, grid_);
    for (size_t g = 0; g < grid_.size(); ++g) grid_[g] *= reaction_[g];
    basis_.analyze(grid_, tmp_);
    for (size_t j = 0; j < x.size(); ++j)
      y[j] = (1.0 + tau_ * symbol_[j]) * x[j] + tau_ * tmp_[j];
  }

  std::vector<double> solve(std::span<const double> rhs, double tol, int max_iter) {
    const size_t n = rhs.size();
    std::vector<double> x(n, 0.0), r(rhs.begin(), rhs.end()), z(n), p(n), ap(n);
    double rhs_norm = 0.0;
    for (double v : rhs) rhs_norm += v * v;
    rhs_norm = std::sqrt(rhs_norm);
    const double target = tol * std::max(1.0, rhs_norm);

    for (size_t j = 0; j < n; ++j) z[j] = precond_[j] * r[j];
    p = z;
    double rz = 0.0;
    for (size_t j = 0; j < n; ++j) rz += r[j] * z[j];

    for (int it = 0; it < max_iter; ++it) {
      double rn = 0.0;
      for (double v : r) rn += v * v;
      if (std::sqrt(rn) <= target) return x;
      apply(p, ap);
      double pap = 0.0;
      for (size_t j = 0; j < n; ++j) pap += p[j] * ap[j];
      if (!(pap > 0.0))
        throw SolverError(SolverError::Kind::InnerDivergence,
                          "CG breakdown in implicit reaction solve");
      const double alpha = rz / pap;
      for (size_t j = 0; j < n; ++j) {
        x[j] += alpha * p[j];
        r[j] -= alpha * ap[j];
      }
      for (size_t j = 0; j < n; ++j) z[j] = precond_[j] * r[j];
      double rz_new = 0.0;
      for (size_t j = 0; j < n; ++j) rz_new += r[j] * z[j];
      const double beta = rz_new / rz;
      rz = rz_new;
      for (size_t j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
    }
    throw SolverError(SolverError::Kind::InnerDivergence,
                      "CG failed to converge in implicit reaction solve");
  }

private:
  const EigenBasis& basis_;
  double tau_;
  std::vector<double> symbol_;
  std::vector<double> precond_;
  std::vector<double> reaction_;
  std::vector<double> grid_;
  std::vector<double> tmp_;
};

void require_complete_separated(const SystemSetup& setup, const StateTrajectory& state) {
  if (static_cast<int>(state.phi.size()) != state.time.steps + 1 ||
      static_cast<int>(state.theta.size()) != state.time.steps + 1)
    throw ValidationError("state trajectory is incomplete");
  if (!state.separation_satisfied)
    throw ValidationError(
        "state trajectory does not satisfy the separation property; derivatives of the "
        "potential are unbounded along it");
  (void)setup;
}

double slope_fit(std::span<const double> xs, std::span<const double> ys, int* usable = nullptr) {
  // Least squares on log-log data; points with non-positive ordinate are
  // dropped (they sit at the floor).
  std::vector<double> lx, ly;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] > 0.0 && xs[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  if (usable) *usable = static_cast<int>(lx.size());
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

}  // namespace

void CostSpec::validate() const {
  if (beta1 < 0.0 || beta2 < 0.0 || beta3 < 0.0 || beta4 < 0.0 || beta5 < 0.0)
    throw ValidationError("cost weights must be nonnegative");
  if (beta1 > 0.0 && !phi_Omega)
    throw ValidationError("beta1 > 0 requires a phi_Omega target field");
  if (beta3 > 0.0 && !theta_Omega)
    throw ValidationError("beta3 > 0 requires a theta_Omega target field in the A basis");
}

void BoxConstraints::validate() const {
  if (!u_min.same_shape(u_max))
    throw ValidationError("box bounds must share the control grid");
  double env = 0.0;
  for (size_t i = 0; i < u_min.values.size(); ++i) {
    if (u_min.values[i] > u_max.values[i])
      throw ValidationError("box constraints require u_min <= u_max pointwise");
    env = std::max(env, std::max(std::abs(u_min.values[i]), std::abs(u_max.values[i])));
  }
  if (!(radius_R > 0.0) || env >= radius_R)
    throw ValidationError("envelope radius R must exceed the box bounds in modulus");
}

SpaceTimeField project_admissible(const SpaceTimeField& u, const BoxConstraints& box) {
  u.validate_shape(box.u_min.steps, box.u_min.grid_size);
  SpaceTimeField out = u;
  for (size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::max(box.u_min.values[i], std::min(out.values[i], box.u_max.values[i]));
  return out;
}

TangentTrajectory solve_linearized(const SystemSetup& setup, const StateTrajectory& state,
                                   const SpaceTimeField& direction) {
  setup.validate();
  require_complete_separated(setup, state);
  const int n_a = setup.basis_a->mode_count();
  const int n_b = setup.basis_b->mode_count();
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  const double tau = setup.time.dt();
  direction.validate_shape(m_steps, g_total);

  TangentTrajectory tan;
  tan.time = setup.time;
  tan.eta.assign(1, SpectralField::zero(setup.basis_a));
  tan.xi.assign(1, SpectralField::zero(setup.basis_b));
  tan.eta.reserve(static_cast<size_t>(m_steps) + 1);
  tan.xi.reserve(static_cast<size_t>(m_steps) + 1);

  std::vector<double> inv_a(static_cast<size_t>(n_a));
  for (int j = 0; j < n_a; ++j)
    inv_a[static_cast<size_t>(j)] =
        1.0 / (1.0 + tau * std::pow(setup.basis_a->eigenvalue(j), 2.0 * setup.frac.rho));

  HelmholtzReactionSolver xi_solver(*setup.basis_b, tau, 2.0 * setup.frac.sigma);

  std::vector<double> phi_grid(static_cast<size_t>(g_total));
  std::vector<double> phi_next_grid(static_cast<size_t>(g_total));
  std::vector<double> theta_grid(static_cast<size_t>(g_total));
  std::vector<double> eta_grid(static_cast<size_t>(g_total));
  std::vector<double> xi_grid(static_cast<size_t>(g_total));
  std::vector<double> xi_next_grid(static_cast<size_t>(g_total));
  std::vector<double> work(static_cast<size_t>(g_total));
  std::vector<double> fpp(static_cast<size_t>(g_total));
  std::vector<double> rhs_b(static_cast<size_t>(n_b));
  std::vector<double> rhs_a(static_cast<size_t>(n_a));

  const double cg_tol = setup.solver.fp_tol;
  const int cg_max = std::max(200, 8 * n_b);

  for (int n = 0; n < m_steps; ++n) {
    const auto& phi_n = state.phi[static_cast<size_t>(n)];
    const auto& phi_np1 = state.phi[static_cast<size_t>(n) + 1];
    const auto& theta_n = state.theta[static_cast<size_t>(n)];
    setup.basis_b->synthesize(phi_n.coeffs, phi_grid);
    setup.basis_b->synthesize(phi_np1.coeffs, phi_next_grid);
    setup.basis_a->synthesize(theta_n.coeffs, theta_grid);
    setup.basis_a->synthesize(tan.eta.back().coeffs, eta_grid);
    setup.basis_b->synthesize(tan.xi.back().coeffs, xi_grid);

    // xi step, the exact linearization of the forward phi step: the convex
    // part's F1'' is implicit at the new node, the (constant-curvature) F2''
    // term explicit at the old one, mirroring the forward splitting.
    //   (I + tau B^{2 sigma} + tau F1''(phi^{n+1})) xi^{n+1}
    //     = xi^n + tau [ -F2''(phi^n) xi^n
    //                    + ell'(phi^n) theta^n xi^n + ell(phi^n) eta^n ].
    for (int g = 0; g < g_total; ++g) {
      const size_t gs = static_cast<size_t>(g);
      const double f2pp = eval_F_second(setup.potential, phi_grid[gs]) -
                          eval_F1_second(setup.potential, phi_grid[gs]);
      work[gs] = -f2pp * xi_grid[gs] +
                 eval_ell(setup.latent, phi_grid[gs], 1) * theta_grid[gs] * xi_grid[gs] +
                 eval_ell(setup.latent, phi_grid[gs], 0) * eta_grid[gs];
    }
    setup.basis_b->analyze(work, rhs_b);
    for (int j = 0; j < n_b; ++j)
      rhs_b[static_cast<size_t>(j)] =
          tan.xi.back().coeffs[static_cast<size_t>(j)] + tau * rhs_b[static_cast<size_t>(j)];
    for (int g = 0; g < g_total; ++g)
      fpp[static_cast<size_t>(g)] =
          eval_F1_second(setup.potential, phi_next_grid[static_cast<size_t>(g)]);
    xi_solver.set_reaction(fpp);
    SpectralField xi_next(setup.basis_b, xi_solver.solve(rhs_b, cg_tol, cg_max));
    setup.basis_b->synthesize(xi_next.coeffs, xi_next_grid);

    // eta step: (I + tau A^{2 rho}) eta^{n+1} = eta^n + tau h^{n+1}
    //   - tau ell'(phi^{n+1}) dphi^{n+1} xi^{n+1} - ell(phi^{n+1})(xi^{n+1} - xi^n).
    auto h_row = direction.row(n + 1);
    for (int g = 0; g < g_total; ++g) {
      const size_t gs = static_cast<size_t>(g);
      const double dphi_dt = (phi_next_grid[gs] - phi_grid[gs]) / tau;
      work[gs] = tau * h_row[gs] -
                 tau * eval_ell(setup.latent, phi_next_grid[gs], 1) * dphi_dt * xi_next_grid[gs] -
                 eval_ell(setup.latent, phi_next_grid[gs], 0) * (xi_next_grid[gs] - xi_grid[gs]);
    }
    setup.basis_a->analyze(work, rhs_a);
    SpectralField eta_next(setup.basis_a);
    for (int j = 0; j < n_a; ++j)
      eta_next.coeffs[static_cast<size_t>(j)] = inv_a[static_cast<size_t>(j)] *
          (tan.eta.back().coeffs[static_cast<size_t>(j)] + rhs_a[static_cast<size_t>(j)]);

    if (!xi_next.finite() || !eta_next.finite())
      throw SolverError(SolverError::Kind::NonFinite,
                        "tangent became non-finite at step " + std::to_string(n + 1));
    tan.xi.push_back(std::move(xi_next));
    tan.eta.push_back(std::move(eta_next));
  }
  return tan;
}

AdjointTrajectory solve_adjoint(const SystemSetup& setup, const StateTrajectory& state,
                                const CostSpec& cost) {
  setup.validate();
  cost.validate();
  require_complete_separated(setup, state);
  const int n_a = setup.basis_a->mode_count();
  const int n_b = setup.basis_b->mode_count();
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  const double tau = setup.time.dt();
  if (cost.phi_Q.steps > 0) cost.phi_Q.validate_shape(m_steps, g_total);
  if (cost.theta_Q.steps > 0) cost.theta_Q.validate_shape(m_steps, g_total);

  AdjointTrajectory adj;
  adj.time = setup.time;
  adj.p.assign(static_cast<size_t>(m_steps) + 1, SpectralField::zero(setup.basis_b));
  adj.q.assign(static_cast<size_t>(m_steps) + 1, SpectralField::zero(setup.basis_a));

  std::vector<double> work(static_cast<size_t>(g_total));
  std::vector<double> phi_grid(static_cast<size_t>(g_total));
  std::vector<double> theta_grid(static_cast<size_t>(g_total));
  std::vector<double> p_grid(static_cast<size_t>(g_total));
  std::vector<double> dtq_grid(static_cast<size_t>(g_total));
  std::vector<double> fpp(static_cast<size_t>(g_total));
  std::vector<double> rhs_a(static_cast<size_t>(n_a));
  std::vector<double> rhs_b(static_cast<size_t>(n_b));

  // Terminal values.
  {
    SpectralField q_T(setup.basis_a);
    if (cost.beta3 > 0.0) {
      for (int j = 0; j < n_a; ++j)
        q_T.coeffs[static_cast<size_t>(j)] = cost.beta3 *
            (state.theta.back().coeffs[static_cast<size_t>(j)] -
             cost.theta_Omega->coeffs[static_cast<size_t>(j)]);
    }
    SpectralField p_T(setup.basis_b);
    if (cost.beta1 > 0.0) {
      for (int j = 0; j < n_b; ++j)
        p_T.coeffs[static_cast<size_t>(j)] = cost.beta1 *
            (state.phi.back().coeffs[static_cast<size_t>(j)] -
             cost.phi_Omega->coeffs[static_cast<size_t>(j)]);
    }
    if (cost.beta3 > 0.0) {
      // - beta3 ell(phi(T)) (theta(T) - theta_Omega), assembled on the grid.
      setup.basis_b->synthesize(state.phi.back().coeffs, phi_grid);
      setup.basis_a->synthesize(q_T.coeffs, work);  // beta3 (theta(T) - theta_Omega)
      for (int g = 0; g < g_total; ++g)
        work[static_cast<size_t>(g)] =
            -eval_ell(setup.latent, phi_grid[static_cast<size_t>(g)], 0) * work[static_cast<size_t>(g)];
      setup.basis_b->analyze(work, rhs_b);
      for (int j = 0; j < n_b; ++j) p_T.coeffs[static_cast<size_t>(j)] += rhs_b[static_cast<size_t>(j)];
    }
    adj.q[static_cast<size_t>(m_steps)] = std::move(q_T);
    adj.p[static_cast<size_t>(m_steps)] = std::move(p_T);
  }

  std::vector<double> inv_a(static_cast<size_t>(n_a));
  for (int j = 0; j < n_a; ++j)
    inv_a[static_cast<size_t>(j)] =
        1.0 / (1.0 + tau * std::pow(setup.basis_a->eigenvalue(j), 2.0 * setup.frac.rho));
  HelmholtzReactionSolver p_solver(*setup.basis_b, tau, 2.0 * setup.frac.sigma);
  const double cg_tol = setup.solver.fp_tol;
  const int cg_max = std::max(200, 8 * n_b);

  for (int n = m_steps - 1; n >= 0; --n) {
    const size_t ns = static_cast<size_t>(n);
    const auto& phi_n = state.phi[ns];
    const auto& theta_n = state.theta[ns];
    setup.basis_b->synthesize(phi_n.coeffs, phi_grid);
    setup.basis_a->synthesize(theta_n.coeffs, theta_grid);
    setup.basis_b->synthesize(adj.p[ns + 1].coeffs, p_grid);

    // q step: (I + tau A^{2 rho}) q^n = q^{n+1} + tau [ ell(phi^n) p^{n+1} + g4 ],
    // g4 sampled on the slab (n, n+1].
    setup.basis_a->synthesize(state.theta[ns + 1].coeffs, work);
    for (int g = 0; g < g_total; ++g) {
      const size_t gs = static_cast<size_t>(g);
      double g4 = 0.0;
      if (cost.beta4 > 0.0) {
        const double target = cost.theta_Q.steps > 0 ? cost.theta_Q.at(n + 1, g) : 0.0;
        g4 = cost.beta4 * (work[gs] - target);
      }
      work[gs] = eval_ell(setup.latent, phi_grid[gs], 0) * p_grid[gs] + g4;
    }
    setup.basis_a->analyze(work, rhs_a);
    SpectralField q_n(setup.basis_a);
    for (int j = 0; j < n_a; ++j)
      q_n.coeffs[static_cast<size_t>(j)] = inv_a[static_cast<size_t>(j)] *
          (adj.q[ns + 1].coeffs[static_cast<size_t>(j)] + tau * rhs_a[static_cast<size_t>(j)]);

    // Discrete time derivative of q, substituted into the p step.
    for (int j = 0; j < n_a; ++j)
      rhs_a[static_cast<size_t>(j)] =
          (adj.q[ns + 1].coeffs[static_cast<size_t>(j)] - q_n.coeffs[static_cast<size_t>(j)]) / tau;
    setup.basis_a->synthesize(rhs_a, dtq_grid);

    // p step, mirroring the tangent's splitting: F1'' implicit at phi^n,
    // the F2'' term explicit on p^{n+1}.
    //   (I + tau B^{2 sigma} + tau F1''(phi^n)) p^n
    //     = p^{n+1} + tau [ ell(phi^n) dq^n + ell'(phi^n) theta^n p^{n+1}
    //                       - F2''(phi^n) p^{n+1} + g2 ].
    setup.basis_b->synthesize(state.phi[ns + 1].coeffs, work);
    for (int g = 0; g < g_total; ++g) {
      const size_t gs = static_cast<size_t>(g);
      double g2 = 0.0;
      if (cost.beta2 > 0.0) {
        const double target = cost.phi_Q.steps > 0 ? cost.phi_Q.at(n + 1, g) : 0.0;
        g2 = cost.beta2 * (work[gs] - target);
      }
      const double f2pp = eval_F_second(setup.potential, phi_grid[gs]) -
                          eval_F1_second(setup.potential, phi_grid[gs]);
      work[gs] = eval_ell(setup.latent, phi_grid[gs], 0) * dtq_grid[gs] +
                 eval_ell(setup.latent, phi_grid[gs], 1) * theta_grid[gs] * p_grid[gs] -
                 f2pp * p_grid[gs] + g2;
    }
    setup.basis_b->analyze(work, rhs_b);
    for (int j = 0; j < n_b; ++j)
      rhs_b[static_cast<size_t>(j)] =
          adj.p[ns + 1].coeffs[static_cast<size_t>(j)] + tau * rhs_b[static_cast<size_t>(j)];
    for (int g = 0; g < g_total; ++g)
      fpp[static_cast<size_t>(g)] =
          eval_F1_second(setup.potential, phi_grid[static_cast<size_t>(g)]);
    p_solver.set_reaction(fpp);
    SpectralField p_n(setup.basis_b, p_solver.solve(rhs_b, cg_tol, cg_max));

    if (!q_n.finite() || !p_n.finite())
      throw SolverError(SolverError::Kind::NonFinite,
                        "adjoint became non-finite at step " + std::to_string(n));
    adj.q[ns] = std::move(q_n);
    adj.p[ns] = std::move(p_n);
  }
  return adj;
}

SpaceTimeField reduced_gradient(const SystemSetup& setup, const SpaceTimeField& u,
                                const AdjointTrajectory& adjoint, double beta5) {
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  u.validate_shape(m_steps, g_total);
  SpaceTimeField grad(m_steps, g_total);
  std::vector<double> q_grid(static_cast<size_t>(g_total));
  for (int n = 1; n <= m_steps; ++n) {
    setup.basis_a->synthesize(adjoint.q[static_cast<size_t>(n) - 1].coeffs, q_grid);
    auto u_row = u.row(n);
    auto g_row = grad.row(n);
    for (int g = 0; g < g_total; ++g)
      g_row[static_cast<size_t>(g)] = q_grid[static_cast<size_t>(g)] +
                                      beta5 * u_row[static_cast<size_t>(g)];
  }
  return grad;
}

RemainderReport frechet_remainder_probe(const SystemSetup& setup, const SpaceTimeField& u,
                                        const SpaceTimeField& direction,
                                        std::span<const double> scales) {
  const StateTrajectory base = solve_state(setup, u);
  const TangentTrajectory tangent = solve_linearized(setup, base, direction);
  const int m_steps = setup.time.steps;

  RemainderReport report;
  report.scales.assign(scales.begin(), scales.end());
  for (double s : scales) {
    SpaceTimeField shifted = u;
    add_scaled(shifted, s, direction);
    const StateTrajectory pert = solve_state(setup, shifted);
    double sup_theta = 0.0, sup_phi = 0.0;
    for (int n = 0; n <= m_steps; ++n) {
      const size_t ns = static_cast<size_t>(n);
      double acc_t = 0.0, acc_p = 0.0;
      for (size_t j = 0; j < base.theta[ns].coeffs.size(); ++j) {
        const double d = pert.theta[ns].coeffs[j] - base.theta[ns].coeffs[j] -
                         s * tangent.eta[ns].coeffs[j];
        acc_t += d * d;
      }
      for (size_t j = 0; j < base.phi[ns].coeffs.size(); ++j) {
        const double d = pert.phi[ns].coeffs[j] - base.phi[ns].coeffs[j] -
                         s * tangent.xi[ns].coeffs[j];
        acc_p += d * d;
      }
      sup_theta = std::max(sup_theta, std::sqrt(acc_t));
      sup_phi = std::max(sup_phi, std::sqrt(acc_p));
    }
    report.remainders.push_back(sup_theta + sup_phi);
  }
  int usable = 0;
  report.slope = slope_fit(report.scales, report.remainders, &usable);
  report.conclusive = usable >= 3;
  return report;
}

SpaceTimeField extract_multiplier(const SystemSetup& setup, const StateTrajectory& state,
                                  const AdjointTrajectory& adjoint, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ValidationError("multiplier extraction requires alpha in (0, 1]");
  if (!state.separation_satisfied)
    throw ValidationError("multiplier extraction requires strict separation of the state");
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  SpaceTimeField lam(m_steps, g_total);
  std::vector<double> phi_grid(static_cast<size_t>(g_total));
  std::vector<double> p_grid(static_cast<size_t>(g_total));
  for (int n = 1; n <= m_steps; ++n) {
    setup.basis_b->synthesize(state.phi[static_cast<size_t>(n)].coeffs, phi_grid);
    setup.basis_b->synthesize(adjoint.p[static_cast<size_t>(n)].coeffs, p_grid);
    auto row = lam.row(n);
    for (int g = 0; g < g_total; ++g) {
      const size_t gs = static_cast<size_t>(g);
      row[gs] = alpha * deep_quench_h_second(phi_grid[gs]) * p_grid[gs];
    }
  }
  return lam;
}

double multiplier_dual_proxy(const SystemSetup& setup, const SpaceTimeField& multiplier) {
  const int g_total = setup.grid_size();
  const int m_steps = setup.time.steps;
  multiplier.validate_shape(m_steps, g_total);
  const double tau = setup.time.dt();
  const double t_final = setup.time.final_time;
  const auto& w = setup.basis_b->quadrature_weights();
  const int n_modes = std::min(4, setup.basis_b->mode_count());

  double best = 0.0;
  // Test family e_k(x) psi(t) with psi vanishing at t = 0; dual pairing
  // normalized by a spectral proxy of the H^1(0,T;H^1*) cap L^2(0,T;H^1) norm.
  for (int profile = 0; profile < 2; ++profile) {
    for (int k = 0; k < n_modes; ++k) {
      const double lam_k = setup.basis_b->eigenvalue(k);
      double pairing = 0.0, z_sq = 0.0;
      for (int n = 1; n <= m_steps; ++n) {
        const double t = tau * static_cast<double>(n);
        const double psi = profile == 0 ? t / t_final : std::sin(std::numbers::pi * t / t_final);
        const double dpsi = profile == 0
                                ? 1.0 / t_final
                                : (std::numbers::pi / t_final) * std::cos(std::numbers::pi * t / t_final);
        auto row = multiplier.row(n);
        double slice = 0.0;
        for (int g = 0; g < g_total; ++g)
          slice += w[static_cast<size_t>(g)] * row[static_cast<size_t>(g)] *
                   setup.basis_b->basis_value(k, g);
        pairing += tau * slice * psi;
        z_sq += tau * ((1.0 + lam_k) * psi * psi + dpsi * dpsi / (1.0 + lam_k));
      }
      if (z_sq > 0.0) best = std::max(best, std::abs(pairing) / std::sqrt(z_sq));
    }
  }
  return best;
}

}  // namespace caginalp
