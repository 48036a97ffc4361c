#include "caginalp/fields.hpp"

#include <cmath>
#include <string>

namespace caginalp {

void TimeGrid::validate() const {
  if (!(final_time > 0.0)) throw ValidationError("final_time must be positive");
  if (steps < 1) throw ValidationError("time steps must be at least 1");
}

bool SpaceTimeField::finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

void SpaceTimeField::validate_shape(int expected_steps, int expected_grid) const {
  if (steps != expected_steps || grid_size != expected_grid)
    throw ValidationError("space-time field shape mismatch: have " + std::to_string(steps) +
                          "x" + std::to_string(grid_size) + ", expected " +
                          std::to_string(expected_steps) + "x" + std::to_string(expected_grid));
}

SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b) {
  a.validate_shape(b.steps, b.grid_size);
  SpaceTimeField out = a;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b) {
  a.validate_shape(b.steps, b.grid_size);
  SpaceTimeField out = a;
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

SpaceTimeField operator*(double s, const SpaceTimeField& a) {
  SpaceTimeField out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

void add_scaled(SpaceTimeField& y, double s, const SpaceTimeField& x) {
  y.validate_shape(x.steps, x.grid_size);
  for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += s * x.values[i];
}

double l2q_inner(const SpaceTimeField& a, const SpaceTimeField& b,
                 std::span<const double> weights, double tau) {
  a.validate_shape(b.steps, b.grid_size);
  if (static_cast<int>(weights.size()) != a.grid_size)
    throw ValidationError("l2q_inner: weight count mismatch");
  double acc = 0.0;
  for (int n = 1; n <= a.steps; ++n) {
    auto ra = a.row(n);
    auto rb = b.row(n);
    for (int g = 0; g < a.grid_size; ++g)
      acc += weights[static_cast<size_t>(g)] * ra[static_cast<size_t>(g)] * rb[static_cast<size_t>(g)];
  }
  return tau * acc;
}

double l2q_norm(const SpaceTimeField& a, std::span<const double> weights, double tau) {
  return std::sqrt(l2q_inner(a, a, weights, tau));
}

double linf_norm(const SpaceTimeField& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace caginalp
