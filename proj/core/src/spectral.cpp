#include "caginalp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace caginalp {

namespace {

constexpr double kPi = std::numbers::pi;

struct AxisMode {
  double eigenvalue;
  int index;  // 1-based
};

// Dirichlet on (0,L): e_j = sqrt(2/L) sin(j pi x / L), lambda_j = (j pi / L)^2.
// Neumann on (0,L): e_1 = sqrt(1/L), e_j = sqrt(2/L) cos((j-1) pi x / L),
// lambda_j = ((j-1) pi / L)^2.
double axis_eigenvalue(BoundaryCondition bc, int index, double length) {
  const int k = (bc == BoundaryCondition::Dirichlet) ? index : index - 1;
  const double w = static_cast<double>(k) * kPi / length;
  return w * w;
}

double axis_value(BoundaryCondition bc, int index, double length, double x) {
  if (bc == BoundaryCondition::Dirichlet) {
    return std::sqrt(2.0 / length) * std::sin(static_cast<double>(index) * kPi * x / length);
  }
  if (index == 1) return std::sqrt(1.0 / length);
  return std::sqrt(2.0 / length) * std::cos(static_cast<double>(index - 1) * kPi * x / length);
}

// On the midpoint grid with G nodes, the discretely orthonormal families are
// sin modes 1..G-1 and cos modes 0..G-1.
int axis_capacity(BoundaryCondition bc, int grid_points) {
  return (bc == BoundaryCondition::Dirichlet) ? grid_points - 1 : grid_points;
}

}  // namespace

const char* bc_name(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw ValidationError("domain dimension must be 1 or 2");
  for (int a = 0; a < dimension; ++a) {
    if (!(lengths[static_cast<size_t>(a)] > 0.0))
      throw ValidationError("domain lengths must be positive");
  }
  if (grid_points_per_axis < 1)
    throw ValidationError("grid_points_per_axis must be positive");
}

int DomainSpec::total_grid_points() const {
  int n = grid_points_per_axis;
  return dimension == 2 ? n * n : n;
}

double DomainSpec::measure() const {
  return dimension == 2 ? lengths[0] * lengths[1] : lengths[0];
}

void FractionalParams::validate() const {
  if (!(rho > 0.0) || !(sigma > 0.0))
    throw ValidationError("fractional exponents rho and sigma must be positive");
}

std::shared_ptr<const EigenBasis> EigenBasis::build(const DomainSpec& domain,
                                                    BoundaryCondition bc,
                                                    int mode_count) {
  domain.validate();
  if (mode_count < 1) throw ValidationError("mode_count must be at least 1");

  const int per_axis_cap = axis_capacity(bc, domain.grid_points_per_axis);
  const int capacity = domain.dimension == 2 ? per_axis_cap * per_axis_cap : per_axis_cap;
  if (mode_count > capacity)
    throw ValidationError("mode_count " + std::to_string(mode_count) +
                          " exceeds grid resolution (capacity " +
                          std::to_string(capacity) + " for " + bc_name(bc) +
                          " on " + std::to_string(domain.grid_points_per_axis) +
                          " nodes per axis)");

  auto basis = std::shared_ptr<EigenBasis>(new EigenBasis());
  basis->domain_ = domain;
  basis->bc_ = bc;

  // Enumerate candidate modes, sort ascending by eigenvalue with lexicographic
  // tie-break on the per-axis indices, keep the first mode_count.
  std::vector<std::tuple<double, int, int>> candidates;
  if (domain.dimension == 1) {
    candidates.reserve(static_cast<size_t>(per_axis_cap));
    for (int j = 1; j <= per_axis_cap; ++j)
      candidates.emplace_back(axis_eigenvalue(bc, j, domain.lengths[0]), j, 0);
  } else {
    candidates.reserve(static_cast<size_t>(per_axis_cap) * static_cast<size_t>(per_axis_cap));
    for (int j = 1; j <= per_axis_cap; ++j)
      for (int k = 1; k <= per_axis_cap; ++k)
        candidates.emplace_back(axis_eigenvalue(bc, j, domain.lengths[0]) +
                                    axis_eigenvalue(bc, k, domain.lengths[1]),
                                j, k);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.resize(static_cast<size_t>(mode_count));

  const int g_axis = domain.grid_points_per_axis;
  const int g_total = domain.total_grid_points();
  basis->weights_.assign(static_cast<size_t>(g_total), 0.0);
  basis->table_.assign(static_cast<size_t>(mode_count) * static_cast<size_t>(g_total), 0.0);
  basis->eigenvalues_.reserve(static_cast<size_t>(mode_count));
  basis->mode_indices_.reserve(static_cast<size_t>(mode_count));

  const double w_axis0 = domain.lengths[0] / static_cast<double>(g_axis);
  const double w_axis1 = domain.dimension == 2 ? domain.lengths[1] / static_cast<double>(g_axis) : 1.0;
  for (int g = 0; g < g_total; ++g)
    basis->weights_[static_cast<size_t>(g)] = domain.dimension == 2 ? w_axis0 * w_axis1 : w_axis0;

  for (int m = 0; m < mode_count; ++m) {
    const auto& [lam, j, k] = candidates[static_cast<size_t>(m)];
    basis->eigenvalues_.push_back(lam);
    basis->mode_indices_.push_back({j, k});
    for (int g = 0; g < g_total; ++g) {
      double v;
      if (domain.dimension == 1) {
        const double x = (static_cast<double>(g) + 0.5) * domain.lengths[0] / static_cast<double>(g_axis);
        v = axis_value(bc, j, domain.lengths[0], x);
      } else {
        const int gx = g / g_axis;
        const int gy = g % g_axis;
        const double x = (static_cast<double>(gx) + 0.5) * domain.lengths[0] / static_cast<double>(g_axis);
        const double y = (static_cast<double>(gy) + 0.5) * domain.lengths[1] / static_cast<double>(g_axis);
        v = axis_value(bc, j, domain.lengths[0], x) * axis_value(bc, k, domain.lengths[1], y);
      }
      basis->table_[static_cast<size_t>(m) * static_cast<size_t>(g_total) + static_cast<size_t>(g)] = v;
    }
  }
  return basis;
}

double EigenBasis::node_coordinate(int g, int axis) const {
  const int g_axis = domain_.grid_points_per_axis;
  int idx;
  if (domain_.dimension == 1) {
    idx = g;
  } else {
    idx = (axis == 0) ? g / g_axis : g % g_axis;
  }
  return (static_cast<double>(idx) + 0.5) * domain_.lengths[static_cast<size_t>(axis)] /
         static_cast<double>(g_axis);
}

void EigenBasis::synthesize(std::span<const double> coeffs, std::span<double> grid) const {
  const size_t n = eigenvalues_.size();
  const size_t g_total = weights_.size();
  if (coeffs.size() != n || grid.size() != g_total)
    throw ValidationError("synthesize: shape mismatch");
  std::fill(grid.begin(), grid.end(), 0.0);
  for (size_t j = 0; j < n; ++j) {
    const double c = coeffs[j];
    if (c == 0.0) continue;
    const double* row = table_.data() + j * g_total;
    for (size_t g = 0; g < g_total; ++g) grid[g] += c * row[g];
  }
}

void EigenBasis::analyze(std::span<const double> grid, std::span<double> coeffs) const {
  const size_t n = eigenvalues_.size();
  const size_t g_total = weights_.size();
  if (coeffs.size() != n || grid.size() != g_total)
    throw ValidationError("analyze: shape mismatch");
  for (size_t j = 0; j < n; ++j) {
    const double* row = table_.data() + j * g_total;
    double acc = 0.0;
    for (size_t g = 0; g < g_total; ++g) acc += weights_[g] * grid[g] * row[g];
    coeffs[j] = acc;
  }
}

void SpectralField::validate() const {
  if (!basis) throw ValidationError("spectral field has no basis");
  if (static_cast<int>(coeffs.size()) != basis->mode_count())
    throw ValidationError("coefficient count does not match basis mode count");
  if (!finite()) throw ValidationError("spectral field has non-finite coefficients");
}

bool SpectralField::finite() const {
  for (double c : coeffs)
    if (!std::isfinite(c)) return false;
  return true;
}

double SpectralField::l2_norm() const {
  double acc = 0.0;
  for (double c : coeffs) acc += c * c;
  return std::sqrt(acc);
}

SpectralField apply_power(const SpectralField& v, double s) {
  v.validate();
  if (s < 0.0) throw ValidationError("apply_power: exponent must be nonnegative");
  SpectralField out(v.basis);
  if (s == 0.0) {
    out.coeffs = v.coeffs;
    return out;
  }
  for (size_t j = 0; j < v.coeffs.size(); ++j) {
    const double lam = v.basis->eigenvalue(static_cast<int>(j));
    out.coeffs[j] = lam > 0.0 ? std::pow(lam, s) * v.coeffs[j] : 0.0;
  }
  return out;
}

double norm_vs(const SpectralField& v, double s) {
  v.validate();
  if (s < 0.0) throw ValidationError("norm_vs: exponent must be nonnegative");
  double acc = 0.0;
  for (size_t j = 0; j < v.coeffs.size(); ++j) {
    const double lam = v.basis->eigenvalue(static_cast<int>(j));
    const double pw = (s == 0.0) ? 1.0 : (lam > 0.0 ? std::pow(lam, s) : 0.0);
    acc += v.coeffs[j] * v.coeffs[j] * (1.0 + pw * pw);
  }
  return std::sqrt(acc);
}

double inner_product(const SpectralField& v, const SpectralField& w) {
  if (v.coeffs.size() != w.coeffs.size())
    throw ValidationError("inner_product: mode count mismatch");
  double acc = 0.0;
  for (size_t j = 0; j < v.coeffs.size(); ++j) acc += v.coeffs[j] * w.coeffs[j];
  return acc;
}

std::vector<double> to_grid(const SpectralField& v) {
  v.validate();
  std::vector<double> grid(static_cast<size_t>(v.basis->grid_size()), 0.0);
  v.basis->synthesize(v.coeffs, grid);
  return grid;
}

SpectralField from_grid(std::span<const double> values, BasisPtr basis) {
  if (!basis) throw ValidationError("from_grid: null basis");
  if (static_cast<int>(values.size()) != basis->grid_size())
    throw ValidationError("from_grid: grid size mismatch");
  SpectralField out(std::move(basis));
  out.basis->analyze(values, out.coeffs);
  return out;
}

std::vector<std::string> ValidityReport::warnings() const {
  std::vector<std::string> out;
  if (!a4_ok)
    out.push_back("L4 embedding thresholds not met (need rho >= 3/8 and sigma >= 3/8)");
  if (!a8_ok)
    out.push_back("L6 embedding thresholds not met (need rho >= 1/4 and sigma >= 1/2)");
  if (!a10_ok)
    out.push_back("sup-norm route threshold not met (need rho > 3/4 or rho == 1/2)");
  return out;
}

ValidityReport embedding_guard(double rho, double sigma, OperatorKind) {
  if (!(rho > 0.0) || !(sigma > 0.0))
    throw ValidationError("embedding_guard: rho and sigma must be positive");
  ValidityReport r;
  r.rho = rho;
  r.sigma = sigma;
  r.a4_ok = rho >= 0.375 && sigma >= 0.375;
  r.a8_ok = rho >= 0.25 && sigma >= 0.5;
  r.a10_ok = rho > 0.75 || rho == 0.5;
  return r;
}

}  // namespace caginalp
