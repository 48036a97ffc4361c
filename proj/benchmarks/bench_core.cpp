#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "caginalp/control.hpp"

using namespace caginalp;

namespace {

SystemSetup bench_setup(int modes, int grid, int steps) {
  DomainSpec dom;
  dom.dimension = 1;
  dom.lengths = {std::numbers::pi, 0.0};
  dom.grid_points_per_axis = grid;
  SystemSetup s;
  s.basis_a = EigenBasis::build(dom, BoundaryCondition::Neumann, modes);
  s.basis_b = EigenBasis::build(dom, BoundaryCondition::Neumann, modes);
  s.frac = {0.5, 0.5};
  s.latent = {LatentHeatForm::Constant, 0.6, 0.0, 0.0, 0.0};
  s.time = {0.5, steps};
  s.init.theta0 = SpectralField::zero(s.basis_a);
  SpectralField phi0(s.basis_b);
  phi0.coeffs[0] = 0.3;
  phi0.coeffs[1] = 0.1;
  s.init.phi0 = phi0;
  s.init.r0_minus = -0.9;
  s.init.r0_plus = 0.9;
  return s;
}

void BM_Transforms(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto setup = bench_setup(modes, 2 * modes, 10);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  SpectralField f(setup.basis_b);
  for (auto& c : f.coeffs) c = unit(rng);
  std::vector<double> grid(static_cast<size_t>(setup.basis_b->grid_size()));
  std::vector<double> back(f.coeffs.size());
  for (auto _ : state) {
    setup.basis_b->synthesize(f.coeffs, grid);
    setup.basis_b->analyze(grid, back);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Transforms)->Arg(16)->Arg(64);

void BM_ForwardSolve(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const auto setup = bench_setup(8, 24, steps);
  const auto u = SpaceTimeField::constant(steps, setup.grid_size(), 0.3);
  for (auto _ : state) {
    auto traj = solve_state(setup, u);
    benchmark::DoNotOptimize(traj.phi.back().coeffs.data());
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_ForwardSolve)->Arg(50)->Arg(200);

void BM_AdjointSolve(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const auto setup = bench_setup(8, 24, steps);
  const auto u = SpaceTimeField::constant(steps, setup.grid_size(), 0.3);
  const auto traj = solve_state(setup, u);
  CostSpec cost;
  cost.beta4 = 1.0;
  cost.theta_Q = SpaceTimeField::constant(steps, setup.grid_size(), 0.2);
  for (auto _ : state) {
    auto adj = solve_adjoint(setup, traj, cost);
    benchmark::DoNotOptimize(adj.q.front().coeffs.data());
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_AdjointSolve)->Arg(50)->Arg(200);

void BM_ProjectedGradientIteration(benchmark::State& state) {
  const auto setup = bench_setup(6, 20, 40);
  ControlProblem problem;
  problem.system = setup;
  problem.cost.beta4 = 1.0;
  problem.cost.beta5 = 0.5;
  problem.cost.theta_Q = SpaceTimeField::constant(40, setup.grid_size(), 0.2);
  problem.box.u_min = SpaceTimeField::constant(40, setup.grid_size(), -2.0);
  problem.box.u_max = SpaceTimeField::constant(40, setup.grid_size(), 2.0);
  problem.box.radius_R = 3.0;
  OptimizerOptions options;
  options.max_iters = 3;
  for (auto _ : state) {
    auto res = projected_gradient(problem, SpaceTimeField::zero(40, setup.grid_size()), options);
    benchmark::DoNotOptimize(res.cost);
  }
}
BENCHMARK(BM_ProjectedGradientIteration);

}  // namespace

BENCHMARK_MAIN();
