#include "caginalp/potentials.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace caginalp {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double log_f1(double r) {
  if (r > 1.0 || r < -1.0) return PotentialSpec::kInf;
  if (r == 1.0 || r == -1.0) return 2.0 * kLn2;
  // r ln r -> 0 at the endpoints; guard the exact interior zeros of 1 +- r.
  const double a = 1.0 + r, b = 1.0 - r;
  return (a > 0.0 ? a * std::log(a) : 0.0) + (b > 0.0 ? b * std::log(b) : 0.0);
}

double log_f1_prime(double r) {
  if (!(r > -1.0 && r < 1.0))
    throw ValidationError("logarithmic F1' requires r in (-1, 1)");
  return std::log((1.0 + r) / (1.0 - r));
}

double log_f1_second(double r) { return 2.0 / (1.0 - r * r); }
double log_f1_third(double r) {
  const double d = 1.0 - r * r;
  return 4.0 * r / (d * d);
}

// Exact (unsmoothed) convex-part derivatives; obstacle excluded by callers.
double f1_prime_exact(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::Regular: return r * r * r;
    case PotentialKind::Logarithmic: return log_f1_prime(r);
    case PotentialKind::DoubleObstacle:
      throw ValidationError("double obstacle F1' is undefined; use Moreau-Yosida or deep-quench smoothing");
  }
  return 0.0;
}

double f1_second_exact(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::Regular: return 3.0 * r * r;
    case PotentialKind::Logarithmic:
      if (!(r > -1.0 && r < 1.0)) throw ValidationError("logarithmic F1'' requires r in (-1, 1)");
      return log_f1_second(r);
    case PotentialKind::DoubleObstacle:
      throw ValidationError("double obstacle F1'' is undefined; use Moreau-Yosida or deep-quench smoothing");
  }
  return 0.0;
}

double f1_third_exact(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::Regular: return 6.0 * r;
    case PotentialKind::Logarithmic:
      if (!(r > -1.0 && r < 1.0)) throw ValidationError("logarithmic F1''' requires r in (-1, 1)");
      return log_f1_third(r);
    case PotentialKind::DoubleObstacle:
      throw ValidationError("double obstacle F1''' is undefined; use Moreau-Yosida or deep-quench smoothing");
  }
  return 0.0;
}

double f1_value_exact(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::Regular: return 0.25 * r * r * r * r;
    case PotentialKind::Logarithmic: return log_f1(r);
    case PotentialKind::DoubleObstacle:
      return (r >= -1.0 && r <= 1.0) ? 0.0 : PotentialSpec::kInf;
  }
  return 0.0;
}

// Resolvent equation y + lambda F1'(y) = r, strictly monotone in y; Newton
// with a maintained bracket falls back to bisection whenever a step leaves it.
double resolvent_newton(const PotentialSpec& spec, double r, double lambda) {
  double lo, hi;
  if (spec.kind == PotentialKind::Logarithmic) {
    lo = std::nextafter(-1.0, 0.0);
    hi = std::nextafter(1.0, 0.0);
  } else {  // Regular: y + lambda y^3 = r
    const double m = std::abs(r) + 1.0;
    lo = -m;
    hi = m;
  }
  auto g = [&](double y) { return y + lambda * f1_prime_exact(spec, y) - r; };
  auto gp = [&](double y) { return 1.0 + lambda * f1_second_exact(spec, y); };

  double y = std::min(std::max(r, lo), hi);
  const double tol = 1e-12 * std::max(1.0, std::abs(r));
  for (int it = 0; it < 200; ++it) {
    const double gy = g(y);
    if (std::abs(gy) <= tol) return y;
    if (gy > 0.0) hi = y; else lo = y;
    // A collapsed bracket pins the root to machine resolution even when the
    // residual scale is unreachable (stiff roots hugging the endpoints).
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max({std::abs(lo), std::abs(hi), 1.0}))
      return 0.5 * (lo + hi);
    double step = gy / gp(y);
    double y_next = y - step;
    if (!(y_next > lo && y_next < hi)) y_next = 0.5 * (lo + hi);
    y = y_next;
  }
  if (std::abs(g(y)) <= 1e-9 * std::max(1.0, std::abs(r))) return y;
  throw SolverError(SolverError::Kind::InnerDivergence,
                    "Yosida resolvent Newton failed to reach tolerance at r=" + std::to_string(r));
}

}  // namespace

const char* potential_kind_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Regular: return "regular";
    case PotentialKind::Logarithmic: return "logarithmic";
    case PotentialKind::DoubleObstacle: return "double_obstacle";
  }
  return "unknown";
}

const char* smoothing_mode_name(SmoothingMode mode) {
  switch (mode) {
    case SmoothingMode::Exact: return "exact";
    case SmoothingMode::MoreauYosida: return "moreau_yosida";
    case SmoothingMode::DeepQuench: return "deep_quench";
  }
  return "unknown";
}

void PotentialSpec::validate() const {
  if (kind == PotentialKind::Logarithmic && !(c1 > 1.0))
    throw ValidationError("logarithmic potential requires c1 > 1");
  if (kind == PotentialKind::DoubleObstacle && !(c2 > 0.0))
    throw ValidationError("double obstacle potential requires c2 > 0");
  if (smoothing == SmoothingMode::MoreauYosida && !(yosida_lambda > 0.0))
    throw ValidationError("Moreau-Yosida smoothing requires lambda > 0");
  if (smoothing == SmoothingMode::DeepQuench) {
    if (kind != PotentialKind::DoubleObstacle)
      throw ValidationError("deep-quench smoothing applies to the double obstacle potential only");
    if (!(quench_alpha > 0.0 && quench_alpha <= 1.0))
      throw ValidationError("deep-quench alpha must lie in (0, 1]");
  }
}

bool PotentialSpec::needs_domain_guard() const {
  if (smoothing == SmoothingMode::MoreauYosida) return false;
  if (kind == PotentialKind::Regular) return false;
  return true;  // exact logarithmic, deep-quench obstacle
}

double eval_F(const PotentialSpec& spec, double r) {
  spec.validate();
  double f2 = 0.0;
  switch (spec.kind) {
    case PotentialKind::Regular: f2 = 0.25 * (1.0 - 2.0 * r * r); break;
    case PotentialKind::Logarithmic: f2 = -spec.c1 * r * r; break;
    case PotentialKind::DoubleObstacle: f2 = spec.c2 * (1.0 - r * r); break;
  }
  switch (spec.smoothing) {
    case SmoothingMode::Exact:
      return f1_value_exact(spec, r) + f2;
    case SmoothingMode::MoreauYosida: {
      // Moreau envelope F1(J(r)) + (r - J(r))^2 / (2 lambda).
      const double y = yosida_resolvent(spec, r, spec.yosida_lambda);
      const double d = r - y;
      return f1_value_exact(spec, y) + 0.5 * d * d / spec.yosida_lambda + f2;
    }
    case SmoothingMode::DeepQuench:
      return spec.quench_alpha * deep_quench_h(r) + f2;
  }
  return 0.0;
}

double eval_F1_prime(const PotentialSpec& spec, double r) {
  spec.validate();
  switch (spec.smoothing) {
    case SmoothingMode::Exact: return f1_prime_exact(spec, r);
    case SmoothingMode::MoreauYosida: return yosida_prime(spec, r, spec.yosida_lambda);
    case SmoothingMode::DeepQuench: return spec.quench_alpha * deep_quench_h_prime(r);
  }
  return 0.0;
}

double eval_F2_prime(const PotentialSpec& spec, double r) {
  spec.validate();
  switch (spec.kind) {
    case PotentialKind::Regular: return -r;
    case PotentialKind::Logarithmic: return -2.0 * spec.c1 * r;
    case PotentialKind::DoubleObstacle: return -2.0 * spec.c2 * r;
  }
  return 0.0;
}

double eval_F_second(const PotentialSpec& spec, double r) {
  spec.validate();
  double f2pp = 0.0;
  switch (spec.kind) {
    case PotentialKind::Regular: f2pp = -1.0; break;
    case PotentialKind::Logarithmic: f2pp = -2.0 * spec.c1; break;
    case PotentialKind::DoubleObstacle: f2pp = -2.0 * spec.c2; break;
  }
  switch (spec.smoothing) {
    case SmoothingMode::Exact:
      return f1_second_exact(spec, r) + f2pp;
    case SmoothingMode::MoreauYosida: {
      if (spec.kind == PotentialKind::DoubleObstacle)
        return (std::abs(r) <= 1.0 ? 0.0 : 1.0 / spec.yosida_lambda) + f2pp;
      const double y = yosida_resolvent(spec, r, spec.yosida_lambda);
      const double s = f1_second_exact(spec, y);
      return s / (1.0 + spec.yosida_lambda * s) + f2pp;
    }
    case SmoothingMode::DeepQuench:
      return spec.quench_alpha * deep_quench_h_second(r) + f2pp;
  }
  return 0.0;
}

double eval_F_third(const PotentialSpec& spec, double r) {
  spec.validate();
  switch (spec.smoothing) {
    case SmoothingMode::Exact:
      return f1_third_exact(spec, r);  // all built-in F2''' vanish
    case SmoothingMode::MoreauYosida: {
      if (spec.kind == PotentialKind::DoubleObstacle) return 0.0;  // F1'_lambda piecewise linear
      // d^2/dr^2 of the Yosida regularization via the resolvent chain rule.
      const double y = yosida_resolvent(spec, r, spec.yosida_lambda);
      const double s = f1_second_exact(spec, y);
      const double t = f1_third_exact(spec, y);
      const double den = 1.0 + spec.yosida_lambda * s;
      return t / (den * den * den);
    }
    case SmoothingMode::DeepQuench: {
      const double d = 1.0 - r * r;
      if (!(d > 0.0)) throw ValidationError("deep-quench F''' requires r in (-1, 1)");
      return spec.quench_alpha * 4.0 * r / (d * d);
    }
  }
  return 0.0;
}

double eval_F1_second(const PotentialSpec& spec, double r) {
  spec.validate();
  switch (spec.smoothing) {
    case SmoothingMode::Exact:
      return f1_second_exact(spec, r);
    case SmoothingMode::DeepQuench:
      if (!(r > -1.0 && r < 1.0)) throw ValidationError("deep-quench F1'' requires r in (-1, 1)");
      return spec.quench_alpha * 2.0 / (1.0 - r * r);
    case SmoothingMode::MoreauYosida: {
      const double lam = spec.yosida_lambda;
      if (spec.kind == PotentialKind::DoubleObstacle)
        return std::abs(r) <= 1.0 ? 0.0 : 1.0 / lam;
      const double y = resolvent_newton(spec, r, lam);
      const double s = f1_second_exact(spec, y);
      return s / (1.0 + lam * s);
    }
  }
  return 0.0;
}

double yosida_resolvent(const PotentialSpec& spec, double r, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("Yosida lambda must be positive");
  if (spec.kind == PotentialKind::DoubleObstacle)
    return std::min(std::max(r, -1.0), 1.0);
  return resolvent_newton(spec, r, lambda);
}

double yosida_prime(const PotentialSpec& spec, double r, double lambda) {
  const double y = yosida_resolvent(spec, r, lambda);
  return (r - y) / lambda;
}

double f2_lipschitz_constant(const PotentialSpec& spec) {
  switch (spec.kind) {
    case PotentialKind::Regular: return 1.0;
    case PotentialKind::Logarithmic: return 2.0 * spec.c1;
    case PotentialKind::DoubleObstacle: return 2.0 * spec.c2;
  }
  return 0.0;
}

double deep_quench_h(double r) {
  return log_f1(r);
}

double deep_quench_h_prime(double r) {
  if (!(r > -1.0 && r < 1.0))
    throw ValidationError("h' requires r in (-1, 1)");
  return std::log((1.0 + r) / (1.0 - r));
}

double deep_quench_h_second(double r) {
  if (!(r > -1.0 && r < 1.0))
    throw ValidationError("h'' requires r in (-1, 1)");
  return 2.0 / (1.0 - r * r);
}

void LatentHeatSpec::validate() const {
  // Both built-in forms have bounded derivatives up to second order for any
  // finite parameters; only finiteness needs checking.
  auto fin = [](double v) { return std::isfinite(v); };
  if (form == LatentHeatForm::Constant) {
    if (!fin(ell0)) throw ValidationError("latent heat ell0 must be finite");
  } else {
    if (!fin(offset) || !fin(amplitude) || !fin(slope))
      throw ValidationError("latent heat tanh parameters must be finite");
  }
}

double eval_ell(const LatentHeatSpec& spec, double r, int derivative_order) {
  if (derivative_order < 0 || derivative_order > 2)
    throw ValidationError("eval_ell: derivative order must be 0, 1 or 2");
  if (spec.form == LatentHeatForm::Constant)
    return derivative_order == 0 ? spec.ell0 : 0.0;
  const double t = std::tanh(spec.slope * r);
  const double sech2 = 1.0 - t * t;
  switch (derivative_order) {
    case 0: return spec.offset + spec.amplitude * t;
    case 1: return spec.amplitude * spec.slope * sech2;
    default: return -2.0 * spec.amplitude * spec.slope * spec.slope * t * sech2;
  }
}

}  // namespace caginalp
