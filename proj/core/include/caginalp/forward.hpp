#pragma once

#include <vector>

#include "caginalp/fields.hpp"
#include "caginalp/potentials.hpp"
#include "caginalp/spectral.hpp"

namespace caginalp {

/// Initial pair (theta0, phi0) with the declared interior bounds for phi0.
struct InitialData {
  SpectralField theta0;  // A-basis
  SpectralField phi0;    // B-basis
  double r0_minus = -1.0;
  double r0_plus = 1.0;
};

struct SolverParams {
  double fp_tol = 1e-12;       // inner fixed-point tolerance (relative)
  int max_inner = 400;         // inner iteration cap
  double damping = 1.0;        // reaction-update damping in (0, 1]
  double guard_margin = 1e-6;  // DomainEscape margin as fraction of half-width

  void validate() const;
};

struct StepDiagnostics {
  double theta_l2 = 0.0;
  double theta_vrho = 0.0;
  double dphi_dt_l2 = 0.0;  // difference quotient; 0 at step 0
  double phi_min = 0.0;
  double phi_max = 0.0;
  double energy = 0.0;
  int inner_iters = 0;
};

/// Complete (theta, phi) trajectory with per-step diagnostics.
struct StateTrajectory {
  TimeGrid time;
  std::vector<SpectralField> theta;  // nodes 0..M
  std::vector<SpectralField> phi;
  std::vector<StepDiagnostics> diag;

  double f1_time_integral = 0.0;  // tau * sum_n quadrature of F1(phi^n), n = 1..M
  double phi_min_overall = 0.0;
  double phi_max_overall = 0.0;
  bool separation_satisfied = true;
  double f_third_sup = 0.0;  // measured sup |F'''| on the realized phi range
  bool tau_lipschitz_warning = false;  // tau * Lip(F2') > 1

  int steps() const { return time.steps; }

  /// Stored backward difference quotient (phi^n - phi^{n-1}) / tau, n >= 1.
  SpectralField dphi_quotient(int n) const;
};

/// Everything a state solve needs apart from the control.
struct SystemSetup {
  BasisPtr basis_a;  // operator A (theta)
  BasisPtr basis_b;  // operator B (phi)
  FractionalParams frac;
  PotentialSpec potential;
  LatentHeatSpec latent;
  TimeGrid time;
  InitialData init;
  SolverParams solver;

  void validate() const;
  int grid_size() const { return basis_a->grid_size(); }
};

/// Time integration of the coupled state system for the given control,
/// sampled on slabs 1..M of the space-time grid.
///
/// Staggered semi-implicit step n -> n+1:
///   phi:   (I + tau B^{2 sigma}) phi^{n+1} + tau F1'(phi^{n+1})
///              = phi^n - tau F2'(phi^n) + tau ell(phi^n) theta^n
///   theta: (I + tau A^{2 rho}) theta^{n+1}
///              = theta^n - ell(phi^{n+1})(phi^{n+1} - phi^n) + tau u^{n+1}
///
/// The phi equation is solved by an inner iteration that alternates the
/// diagonal spectral solve with a pointwise safeguarded Newton on the
/// monotone reaction term; the convex part implicit and the concave
/// perturbation explicit make the decoupled flow energy-stable for any tau.
StateTrajectory solve_state(const SystemSetup& setup, const SpaceTimeField& control);

/// Same scheme with F1' replaced by its Yosida regularization at the given
/// level; the domain guard is off since the regularization is global.
StateTrajectory solve_state_moreau_yosida(const SystemSetup& setup,
                                          const SpaceTimeField& control, double lambda);

struct SeparationReport {
  double a_R = 0.0;  // tight minimum of phi over all steps and nodes
  double b_R = 0.0;  // tight maximum
  bool satisfied = false;
};

SeparationReport measure_separation(const StateTrajectory& trajectory,
                                    const PotentialSpec& potential);

/// Lyapunov functional E(phi) = 1/2 |B^sigma phi|^2 + integral of F(phi),
/// by collocation quadrature.
double free_energy(const SpectralField& phi, double sigma, const PotentialSpec& potential);

}  // namespace caginalp
