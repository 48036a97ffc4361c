#pragma once

#include <optional>

#include "caginalp/fields.hpp"
#include "caginalp/spectral.hpp"

namespace caginalp {

/// Tracking-type cost weights and targets:
///   beta1/2 |phi(T) - phi_Omega|^2 + beta2/2 int_Q |phi - phi_Q|^2
/// + beta3/2 |theta(T) - theta_Omega|^2 + beta4/2 int_Q |theta - theta_Q|^2
/// + beta5/2 int_Q |u|^2.
///
/// Final-time targets are spectral fields; running targets are space-time
/// sample fields on the same slabs as controls. theta_Omega must be supplied
/// in the A basis whenever beta3 > 0.
struct CostSpec {
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta4 = 0.0, beta5 = 0.0;
  std::optional<SpectralField> phi_Omega;    // B basis
  std::optional<SpectralField> theta_Omega;  // A basis
  SpaceTimeField phi_Q;    // zero-sized means identically zero
  SpaceTimeField theta_Q;

  void validate() const;
};

/// Pointwise box u_min <= u <= u_max inside the L^inf envelope of radius R.
struct BoxConstraints {
  SpaceTimeField u_min;
  SpaceTimeField u_max;
  double radius_R = 1.0;

  void validate() const;
};

SpaceTimeField project_admissible(const SpaceTimeField& u, const BoxConstraints& box);

}  // namespace caginalp
