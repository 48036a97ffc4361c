#pragma once

#include <vector>

#include "caginalp/cost.hpp"
#include "caginalp/forward.hpp"

namespace caginalp {

/// Solution (eta, xi) of the linearized system in a direction h; starts from
/// zero data.
struct TangentTrajectory {
  TimeGrid time;
  std::vector<SpectralField> eta;  // A basis, nodes 0..M
  std::vector<SpectralField> xi;   // B basis
};

/// Backward adjoint pair (p, q); q in the A basis, p in the B basis.
struct AdjointTrajectory {
  TimeGrid time;
  std::vector<SpectralField> p;  // nodes 0..M
  std::vector<SpectralField> q;
};

/// Forward sweep of the linearization around a computed state. Mirrors the
/// state scheme: the xi equation carries the full F'' implicitly at the new
/// node and is solved by preconditioned CG; the eta equation is a diagonal
/// solve with the stored difference quotient of phi standing in for its time
/// derivative.
TangentTrajectory solve_linearized(const SystemSetup& setup, const StateTrajectory& state,
                                   const SpaceTimeField& direction);

/// Backward sweep of the adjoint system. Terminal values
///   q(T) = beta3 (theta(T) - theta_Omega),
///   p(T) = beta1 (phi(T) - phi_Omega) - beta3 ell(phi(T)) (theta(T) - theta_Omega);
/// each backward step solves the q equation first and substitutes its
/// discrete time derivative into the p equation. Running sources are sampled
/// per slab.
AdjointTrajectory solve_adjoint(const SystemSetup& setup, const StateTrajectory& state,
                                const CostSpec& cost);

/// Reduced gradient q + beta5 u on the control's space-time grid; slab n
/// pairs with the adjoint value at the slab's left node.
SpaceTimeField reduced_gradient(const SystemSetup& setup, const SpaceTimeField& u,
                                const AdjointTrajectory& adjoint, double beta5);

struct RemainderReport {
  std::vector<double> scales;
  std::vector<double> remainders;  // |S(u + s h) - S(u) - s DS(u) h| per scale
  double slope = 0.0;              // log-log least-squares fit
  bool conclusive = false;         // needs >= 3 usable points
};

/// Taylor-remainder probe of the control-to-state map along direction h,
/// measured in the product of L^inf(0,T;H) norms.
RemainderReport frechet_remainder_probe(const SystemSetup& setup, const SpaceTimeField& u,
                                        const SpaceTimeField& direction,
                                        std::span<const double> scales);

/// Deep-quench multiplier alpha h''(phi) p sampled pointwise on slabs 1..M.
SpaceTimeField extract_multiplier(const SystemSetup& setup, const StateTrajectory& state,
                                  const AdjointTrajectory& adjoint, double alpha);

/// Dual-norm proxy of a slab field: sup over a built-in family of smooth,
/// Z-normalized test fields of the Q-inner product.
double multiplier_dual_proxy(const SystemSetup& setup, const SpaceTimeField& multiplier);

}  // namespace caginalp
