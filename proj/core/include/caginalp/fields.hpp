#pragma once

#include <span>
#include <vector>

#include "caginalp/spectral.hpp"

namespace caginalp {

/// Uniform time grid on (0, T] with M steps of size tau = T/M.
struct TimeGrid {
  double final_time = 1.0;
  int steps = 1;

  double dt() const { return final_time / static_cast<double>(steps); }
  double node(int n) const { return dt() * static_cast<double>(n); }
  void validate() const;
};

/// Space-time sample field on the collocation grid: one row per time slab
/// n = 1..M (row n-1 in storage), each holding grid_size nodal values. The
/// row-n sample represents the value on the slab ((n-1) tau, n tau], which is
/// where the time stepping consumes controls and where the cost quadrature
/// samples trajectories.
struct SpaceTimeField {
  int steps = 0;
  int grid_size = 0;
  std::vector<double> values;  // steps * grid_size, slab-major

  SpaceTimeField() = default;
  SpaceTimeField(int steps_, int grid_size_)
      : steps(steps_), grid_size(grid_size_),
        values(static_cast<size_t>(steps_) * static_cast<size_t>(grid_size_), 0.0) {}

  static SpaceTimeField zero(int steps, int grid_size) { return {steps, grid_size}; }
  static SpaceTimeField constant(int steps, int grid_size, double v) {
    SpaceTimeField f(steps, grid_size);
    for (auto& x : f.values) x = v;
    return f;
  }

  double& at(int slab, int node) {
    return values[static_cast<size_t>(slab - 1) * static_cast<size_t>(grid_size) +
                  static_cast<size_t>(node)];
  }
  double at(int slab, int node) const {
    return values[static_cast<size_t>(slab - 1) * static_cast<size_t>(grid_size) +
                  static_cast<size_t>(node)];
  }
  std::span<double> row(int slab) {
    return {values.data() + static_cast<size_t>(slab - 1) * static_cast<size_t>(grid_size),
            static_cast<size_t>(grid_size)};
  }
  std::span<const double> row(int slab) const {
    return {values.data() + static_cast<size_t>(slab - 1) * static_cast<size_t>(grid_size),
            static_cast<size_t>(grid_size)};
  }

  bool same_shape(const SpaceTimeField& other) const {
    return steps == other.steps && grid_size == other.grid_size;
  }
  bool finite() const;
  void validate_shape(int expected_steps, int expected_grid) const;
};

SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField operator*(double s, const SpaceTimeField& a);

/// axpy-style update: y += s * x.
void add_scaled(SpaceTimeField& y, double s, const SpaceTimeField& x);

/// L2(Q) quadrature inner product: tau * sum_n sum_g w_g a_{n,g} b_{n,g}.
double l2q_inner(const SpaceTimeField& a, const SpaceTimeField& b,
                 std::span<const double> weights, double tau);
double l2q_norm(const SpaceTimeField& a, std::span<const double> weights, double tau);
double linf_norm(const SpaceTimeField& a);

}  // namespace caginalp
