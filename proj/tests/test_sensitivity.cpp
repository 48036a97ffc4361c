#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "caginalp/sensitivity.hpp"
#include "oracles.hpp"

using namespace caginalp;

namespace {
constexpr double kPi = std::numbers::pi;

SystemSetup make_setup(int modes, int grid, double t_final, int steps,
                       BoundaryCondition bc = BoundaryCondition::Neumann) {
  DomainSpec dom;
  dom.dimension = 1;
  dom.lengths = {kPi, 0.0};
  dom.grid_points_per_axis = grid;
  SystemSetup s;
  s.basis_a = EigenBasis::build(dom, bc, modes);
  s.basis_b = EigenBasis::build(dom, bc, modes);
  s.frac = {0.5, 0.5};
  s.latent = {LatentHeatForm::Constant, 0.0, 0.0, 0.0, 0.0};
  s.time = {t_final, steps};
  s.init.theta0 = SpectralField::zero(s.basis_a);
  s.init.phi0 = SpectralField::zero(s.basis_b);
  s.init.r0_minus = -0.95;
  s.init.r0_plus = 0.95;
  return s;
}

SystemSetup generic_nonlinear(int steps) {
  auto s = make_setup(4, 16, 0.4, steps);
  s.latent = {LatentHeatForm::Tanh, 0.0, 0.3, 0.4, 1.0};
  std::vector<double> grid(static_cast<size_t>(s.basis_b->grid_size()));
  for (int g = 0; g < s.basis_b->grid_size(); ++g)
    grid[static_cast<size_t>(g)] = 0.25 + 0.15 * std::cos(s.basis_b->node_coordinate(g, 0));
  s.init.phi0 = from_grid(grid, s.basis_b);
  SpectralField theta0(s.basis_a);
  theta0.coeffs[0] = 0.2;
  if (s.basis_a->mode_count() > 1) theta0.coeffs[1] = -0.1;
  s.init.theta0 = theta0;
  return s;
}

SpaceTimeField smooth_control(const SystemSetup& s, double amp, int variant) {
  SpaceTimeField u(s.time.steps, s.grid_size());
  const double tau = s.time.dt();
  for (int n = 1; n <= s.time.steps; ++n) {
    const double t = tau * n;
    for (int g = 0; g < s.grid_size(); ++g) {
      const double x = s.basis_a->node_coordinate(g, 0);
      u.at(n, g) = amp * (std::sin(t * (1.0 + variant)) + 0.5 * std::cos(x + variant));
    }
  }
  return u;
}

}  // namespace

TEST_CASE("zero direction gives a zero tangent") {
  auto setup = generic_nonlinear(30);
  const auto state = solve_state(setup, smooth_control(setup, 0.3, 0));
  const auto tan = solve_linearized(setup, state, SpaceTimeField::zero(30, setup.grid_size()));
  for (const auto& f : tan.eta)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-14);
  for (const auto& f : tan.xi)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("decoupled single-mode tangent integrates the direction") {
  // ell = 0 and the zero state: eta^n = n tau for h = 1, xi = 0.
  auto setup = make_setup(1, 8, 1.0, 50);
  const auto state = solve_state(setup, SpaceTimeField::zero(50, setup.grid_size()));
  std::vector<double> ones(static_cast<size_t>(setup.grid_size()), 1.0);
  SpaceTimeField h(50, setup.grid_size());
  for (int n = 1; n <= 50; ++n) {
    auto row = h.row(n);
    std::copy(ones.begin(), ones.end(), row.begin());
  }
  const auto tan = solve_linearized(setup, state, h);
  const double tau = setup.time.dt();
  for (int n = 0; n <= 50; ++n) {
    const double eta_val = to_grid(tan.eta[static_cast<size_t>(n)])[0];
    CHECK(eta_val == doctest::Approx(tau * n).epsilon(1e-12));
    CHECK(tan.xi[static_cast<size_t>(n)].l2_norm() < 1e-14);
  }
}

TEST_CASE("tangent is linear in the direction") {
  auto setup = generic_nonlinear(20);
  const auto state = solve_state(setup, smooth_control(setup, 0.3, 0));
  const auto h1 = smooth_control(setup, 0.2, 1);
  const auto h2 = smooth_control(setup, 0.15, 2);
  const double c = 1.7;
  const auto t1 = solve_linearized(setup, state, h1);
  const auto t2 = solve_linearized(setup, state, h2);
  SpaceTimeField combo = h1;
  add_scaled(combo, c, h2);
  const auto tc = solve_linearized(setup, state, combo);
  for (size_t n = 0; n < tc.eta.size(); ++n) {
    for (size_t j = 0; j < tc.eta[n].coeffs.size(); ++j) {
      const double expect = t1.eta[n].coeffs[j] + c * t2.eta[n].coeffs[j];
      CHECK(std::abs(tc.eta[n].coeffs[j] - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
    }
    for (size_t j = 0; j < tc.xi[n].coeffs.size(); ++j) {
      const double expect = t1.xi[n].coeffs[j] + c * t2.xi[n].coeffs[j];
      CHECK(std::abs(tc.xi[n].coeffs[j] - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("central-difference tangent converges until the tau floor") {
  auto setup = generic_nonlinear(200);
  const auto u = smooth_control(setup, 0.3, 0);
  const auto state = solve_state(setup, u);
  const auto h = smooth_control(setup, 1.0, 1);
  const auto tan = solve_linearized(setup, state, h);
  const double tau = setup.time.dt();

  std::vector<double> eps_list{0.2, 0.1, 0.05};
  std::vector<double> errors;
  for (double eps : eps_list) {
    SpaceTimeField up = u, um = u;
    add_scaled(up, eps, h);
    add_scaled(um, -eps, h);
    const auto sp = solve_state(setup, up);
    const auto sm = solve_state(setup, um);
    double acc = 0.0;
    for (size_t n = 1; n < sp.phi.size(); ++n) {
      for (size_t j = 0; j < sp.phi[n].coeffs.size(); ++j) {
        const double fd = (sp.phi[n].coeffs[j] - sm.phi[n].coeffs[j]) / (2.0 * eps);
        const double d = fd - tan.xi[n].coeffs[j];
        acc += tau * d * d;
      }
      for (size_t j = 0; j < sp.theta[n].coeffs.size(); ++j) {
        const double fd = (sp.theta[n].coeffs[j] - sm.theta[n].coeffs[j]) / (2.0 * eps);
        const double d = fd - tan.eta[n].coeffs[j];
        acc += tau * d * d;
      }
    }
    errors.push_back(std::sqrt(acc));
  }
  CHECK(errors[1] < errors[0]);
  const double slope = oracles::slope_fit(eps_list, errors);
  CHECK(slope >= 1.8);  // O(eps^2) until the tau floor
}

TEST_CASE("adjoint vanishes for zero cost data") {
  auto setup = generic_nonlinear(25);
  const auto state = solve_state(setup, smooth_control(setup, 0.3, 0));
  CostSpec cost;  // all beta = 0
  const auto adj = solve_adjoint(setup, state, cost);
  for (const auto& f : adj.p)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-14);
  for (const auto& f : adj.q)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-14);
}

TEST_CASE("adjoint vanishes when the state matches the targets exactly") {
  // Zero trajectory, zero targets, all weights positive.
  auto setup = make_setup(3, 12, 0.3, 15);
  const auto state = solve_state(setup, SpaceTimeField::zero(15, setup.grid_size()));
  CostSpec cost;
  cost.beta1 = cost.beta2 = cost.beta3 = cost.beta4 = 1.0;
  cost.beta5 = 0.5;
  cost.phi_Omega = SpectralField::zero(setup.basis_b);
  cost.theta_Omega = SpectralField::zero(setup.basis_a);
  cost.phi_Q = SpaceTimeField::zero(15, setup.grid_size());
  cost.theta_Q = SpaceTimeField::zero(15, setup.grid_size());
  const auto adj = solve_adjoint(setup, state, cost);
  for (const auto& f : adj.p)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-13);
  for (const auto& f : adj.q)
    for (double c : f.coeffs) CHECK(std::abs(c) < 1e-13);
}

TEST_CASE("beta3 requires a theta_Omega field") {
  auto setup = make_setup(3, 12, 0.3, 10);
  const auto state = solve_state(setup, SpaceTimeField::zero(10, setup.grid_size()));
  CostSpec cost;
  cost.beta3 = 1.0;
  CHECK_THROWS_AS(solve_adjoint(setup, state, cost), ValidationError);
}

TEST_CASE("adjoint duality identity approaches the tangent pairing as tau shrinks") {
  std::vector<double> taus, gaps;
  for (int level = 0; level < 3; ++level) {
    const int steps = 50 << level;
    auto setup = generic_nonlinear(steps);
    const auto u = smooth_control(setup, 0.3, 0);
    const auto state = solve_state(setup, u);
    const double tau = setup.time.dt();
    const auto& w = setup.basis_a->quadrature_weights();

    CostSpec cost;
    cost.beta1 = 0.8;
    cost.beta2 = 0.6;
    cost.beta3 = 0.5;
    cost.beta4 = 0.7;
    cost.phi_Omega = SpectralField::zero(setup.basis_b);
    cost.theta_Omega = SpectralField::zero(setup.basis_a);
    const auto adj = solve_adjoint(setup, state, cost);
    const auto h = smooth_control(setup, 0.5, 2);
    const auto tan = solve_linearized(setup, state, h);

    // <q, h>_Q with the gradient's slab pairing.
    const auto grad = reduced_gradient(setup, SpaceTimeField::zero(steps, setup.grid_size()),
                                       adj, 0.0);
    const double lhs = l2q_inner(grad, h, w, tau);

    // Targets are zero, so the final-time factors are the states themselves.
    double rhs = cost.beta1 * inner_product(state.phi.back(), tan.xi.back());
    rhs += cost.beta3 * inner_product(state.theta.back(), tan.eta.back());
    for (int n = 1; n <= steps; ++n) {
      rhs += cost.beta2 * tau *
             inner_product(state.phi[static_cast<size_t>(n)], tan.xi[static_cast<size_t>(n)]);
      rhs += cost.beta4 * tau *
             inner_product(state.theta[static_cast<size_t>(n)], tan.eta[static_cast<size_t>(n)]);
    }
    taus.push_back(tau);
    gaps.push_back(std::abs(lhs - rhs) / std::max(1e-14, std::abs(rhs)));
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  CHECK(oracles::slope_fit(taus, gaps) >= 0.8);
}

TEST_CASE("reduced gradient composes q and the Tikhonov term") {
  auto setup = make_setup(3, 12, 0.3, 10);
  const auto state = solve_state(setup, SpaceTimeField::zero(10, setup.grid_size()));
  CostSpec cost;  // zero adjoint
  const auto adj = solve_adjoint(setup, state, cost);
  const auto u = smooth_control(setup, 0.4, 1);
  const auto g1 = reduced_gradient(setup, u, adj, 1.0);
  for (size_t i = 0; i < u.values.size(); ++i) CHECK(g1.values[i] == doctest::Approx(u.values[i]));
  const auto g0 = reduced_gradient(setup, u, adj, 0.0);
  for (double v : g0.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("taylor remainder probe: zero direction and quadratic slope") {
  auto setup = generic_nonlinear(160);
  const auto u = smooth_control(setup, 0.25, 0);
  SUBCASE("zero direction has zero remainder") {
    const auto rep = frechet_remainder_probe(setup, u, SpaceTimeField::zero(160, setup.grid_size()),
                                             std::vector<double>{0.1, 0.01});
    for (double r : rep.remainders) CHECK(r < 1e-13);
    CHECK_FALSE(rep.conclusive);
  }
  SUBCASE("generic direction shows the quadratic remainder") {
    const auto h = smooth_control(setup, 1.0, 3);
    const std::vector<double> scales{0.1, 0.0316227766016838, 0.01};
    const auto rep = frechet_remainder_probe(setup, u, h, scales);
    CHECK(rep.conclusive);
    CHECK(rep.slope >= 1.8);
    CHECK(rep.slope <= 2.2);
  }
}

TEST_CASE("multiplier extraction is the pointwise product") {
  auto setup = make_setup(3, 12, 0.3, 12);
  setup.potential.kind = PotentialKind::DoubleObstacle;
  setup.potential.smoothing = SmoothingMode::DeepQuench;
  setup.potential.quench_alpha = 0.5;
  const auto state = solve_state(setup, SpaceTimeField::zero(12, setup.grid_size()));

  SUBCASE("zero adjoint gives a zero multiplier") {
    CostSpec cost;
    const auto adj = solve_adjoint(setup, state, cost);
    const auto lam = extract_multiplier(setup, state, adj, 0.5);
    for (double v : lam.values) CHECK(std::abs(v) < 1e-14);
    CHECK(multiplier_dual_proxy(setup, lam) < 1e-14);
  }
  SUBCASE("zero state gives Lambda = 2 alpha p") {
    CostSpec cost;
    cost.beta2 = 1.0;
    cost.phi_Q = SpaceTimeField::constant(12, setup.grid_size(), 0.4);
    const auto adj = solve_adjoint(setup, state, cost);
    const double alpha = 0.5;
    const auto lam = extract_multiplier(setup, state, adj, alpha);
    std::vector<double> p_grid(static_cast<size_t>(setup.grid_size()));
    for (int n = 1; n <= 12; ++n) {
      setup.basis_b->synthesize(adj.p[static_cast<size_t>(n)].coeffs, p_grid);
      for (int g = 0; g < setup.grid_size(); ++g)
        CHECK(lam.at(n, g) ==
              doctest::Approx(2.0 * alpha * p_grid[static_cast<size_t>(g)]).epsilon(1e-12));
    }
  }
  SUBCASE("alpha outside (0, 1] is rejected") {
    CostSpec cost;
    const auto adj = solve_adjoint(setup, state, cost);
    CHECK_THROWS_AS(extract_multiplier(setup, state, adj, 0.0), ValidationError);
  }
}
