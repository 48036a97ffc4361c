#pragma once

#include "caginalp/errors.hpp"

namespace caginalp {

enum class PotentialKind { Regular, Logarithmic, DoubleObstacle };
enum class SmoothingMode { Exact, MoreauYosida, DeepQuench };

const char* potential_kind_name(PotentialKind kind);
const char* smoothing_mode_name(SmoothingMode mode);

/// Double-well potential family F = F1 + F2 with a convex part F1 and a
/// concave quadratic perturbation F2, plus the smoothing applied to F1.
///
///   Regular:        F1 = r^4/4,                        F2 = (1 - 2 r^2)/4
///   Logarithmic:    F1 = (1+r)ln(1+r) + (1-r)ln(1-r),  F2 = -c1 r^2
///   DoubleObstacle: F1 = indicator of [-1, 1],         F2 = c2 (1 - r^2)
///
/// MoreauYosida replaces F1' by its Yosida regularization at level lambda
/// (and F1 by the Moreau envelope). DeepQuench (obstacle only) replaces F1
/// by alpha * h with h the logarithmic barrier of [-1, 1].
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Regular;
  double c1 = 2.0;            // Logarithmic, requires c1 > 1
  double c2 = 1.0;            // DoubleObstacle, requires c2 > 0
  SmoothingMode smoothing = SmoothingMode::Exact;
  double yosida_lambda = 0.1; // MoreauYosida, > 0
  double quench_alpha = 1.0;  // DeepQuench, in (0, 1]

  void validate() const;

  /// Effective domain endpoints of F (unsmoothed convex part).
  double domain_lower() const { return kind == PotentialKind::Regular ? -kInf : -1.0; }
  double domain_upper() const { return kind == PotentialKind::Regular ? kInf : 1.0; }

  /// True when the smoothed F1' is only defined on the open interval (-1, 1),
  /// so solvers must keep grid values strictly interior.
  bool needs_domain_guard() const;

  /// True for the combination a pointwise-F1' solver must reject.
  bool derivative_undefined() const {
    return kind == PotentialKind::DoubleObstacle && smoothing == SmoothingMode::Exact;
  }

  static constexpr double kInf = 1e300;
};

double eval_F(const PotentialSpec& spec, double r);
double eval_F1_prime(const PotentialSpec& spec, double r);
double eval_F2_prime(const PotentialSpec& spec, double r);
double eval_F_second(const PotentialSpec& spec, double r);
double eval_F_third(const PotentialSpec& spec, double r);

/// Second derivative of the smoothed convex part alone (the monotone
/// reaction's slope); nonnegative everywhere it is defined.
double eval_F1_second(const PotentialSpec& spec, double r);

/// Yosida regularization (r - J_lambda(r)) / lambda of the convex part's
/// derivative, with J_lambda the resolvent of F1'. Closed form for the
/// obstacle indicator; solved by safeguarded Newton to 1e-12 residual for the
/// logarithmic and regular families.
double yosida_prime(const PotentialSpec& spec, double r, double lambda);

/// Resolvent J_lambda(r) = (I + lambda F1')^{-1}(r) of the convex part.
double yosida_resolvent(const PotentialSpec& spec, double r, double lambda);

/// Lipschitz constant of F2' (exact for all built-in families).
double f2_lipschitz_constant(const PotentialSpec& spec);

/// Logarithmic function of the deep-quench family; h(+-1) = 2 ln 2 and
/// h(r) = +inf outside [-1, 1].
double deep_quench_h(double r);
double deep_quench_h_prime(double r);   // ln((1+r)/(1-r)), |r| < 1
double deep_quench_h_second(double r);  // 2/(1-r^2), |r| < 1

enum class LatentHeatForm { Constant, Tanh };

/// Latent-heat coefficient with bounded derivatives up to second order.
struct LatentHeatSpec {
  LatentHeatForm form = LatentHeatForm::Constant;
  double ell0 = 1.0;       // Constant
  double offset = 0.0;     // Tanh: offset + amplitude * tanh(slope * r)
  double amplitude = 1.0;
  double slope = 1.0;

  void validate() const;
  bool is_zero() const { return form == LatentHeatForm::Constant && ell0 == 0.0; }
};

/// ell, ell' or ell'' at r depending on derivative_order in {0, 1, 2}.
double eval_ell(const LatentHeatSpec& spec, double r, int derivative_order);

}  // namespace caginalp
