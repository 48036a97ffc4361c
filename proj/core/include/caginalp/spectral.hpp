#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "caginalp/errors.hpp"

namespace caginalp {

enum class BoundaryCondition { Dirichlet, Neumann };

const char* bc_name(BoundaryCondition bc);

/// Box domain (interval or rectangle) with a midpoint collocation grid.
///
/// The grid carries `grid_points_per_axis` midpoint nodes per axis. Midpoint
/// nodes make both the sine (Dirichlet) and cosine (Neumann) families
/// discretely orthonormal under the uniform quadrature weights, which is what
/// every round-trip and adjointness guarantee in this library rests on.
struct DomainSpec {
  int dimension = 1;  // 1 or 2
  std::array<double, 2> lengths{1.0, 1.0};
  int grid_points_per_axis = 32;

  void validate() const;
  int total_grid_points() const;
  double measure() const;  // length resp. area

  bool operator==(const DomainSpec&) const = default;
};

struct FractionalParams {
  double rho = 0.5;
  double sigma = 0.5;

  void validate() const;
};

/// Eigenpairs of -Laplace on the box with the given boundary condition,
/// together with the synthesis table e_j(x_g) and quadrature weights.
///
/// Immutable after construction; share freely across threads.
class EigenBasis {
public:
  static std::shared_ptr<const EigenBasis> build(const DomainSpec& domain,
                                                 BoundaryCondition bc,
                                                 int mode_count);

  const DomainSpec& domain() const { return domain_; }
  BoundaryCondition bc() const { return bc_; }
  int mode_count() const { return static_cast<int>(eigenvalues_.size()); }
  int grid_size() const { return static_cast<int>(weights_.size()); }

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int j) const { return eigenvalues_[static_cast<size_t>(j)]; }

  /// Per-axis mode indices (1-based), lexicographic tie-break order.
  const std::vector<std::array<int, 2>>& mode_indices() const { return mode_indices_; }

  const std::vector<double>& quadrature_weights() const { return weights_; }

  /// Coordinate of collocation node g along the given axis.
  double node_coordinate(int g, int axis) const;

  /// Grid values of sum_j c_j e_j at the collocation nodes.
  void synthesize(std::span<const double> coeffs, std::span<double> grid) const;

  /// Quadrature projections c_j = sum_g w_g v_g e_j(x_g).
  void analyze(std::span<const double> grid, std::span<double> coeffs) const;

  /// Table entry e_j(x_g).
  double basis_value(int j, int g) const {
    return table_[static_cast<size_t>(j) * weights_.size() + static_cast<size_t>(g)];
  }

  /// True when the two bases share domain and therefore the collocation grid.
  bool same_grid(const EigenBasis& other) const { return domain_ == other.domain_; }

private:
  EigenBasis() = default;

  DomainSpec domain_;
  BoundaryCondition bc_ = BoundaryCondition::Dirichlet;
  std::vector<double> eigenvalues_;
  std::vector<std::array<int, 2>> mode_indices_;
  std::vector<double> weights_;
  std::vector<double> table_;  // mode-major: table_[j*G + g]
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

/// Truncated eigenfunction expansion; plain value type.
struct SpectralField {
  BasisPtr basis;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(BasisPtr b) : basis(std::move(b)) {
    coeffs.assign(static_cast<size_t>(basis->mode_count()), 0.0);
  }
  SpectralField(BasisPtr b, std::vector<double> c) : basis(std::move(b)), coeffs(std::move(c)) {}

  static SpectralField zero(BasisPtr b) { return SpectralField(std::move(b)); }

  void validate() const;
  bool finite() const;
  double l2_norm() const;
};

/// A^s v in the spectral sense: coefficient j scaled by lambda_j^s.
/// Zero eigenvalues contribute nothing for s > 0; s = 0 is the identity.
SpectralField apply_power(const SpectralField& v, double s);

/// Graph norm sqrt(sum c_j^2 (1 + lambda_j^{2s})). Note norm_vs(v, 0) equals
/// sqrt(2) * l2_norm(v) by this definition.
double norm_vs(const SpectralField& v, double s);

/// L2 inner product, exact in coefficient arithmetic.
double inner_product(const SpectralField& v, const SpectralField& w);

std::vector<double> to_grid(const SpectralField& v);
SpectralField from_grid(std::span<const double> values, BasisPtr basis);

enum class OperatorKind { Laplacian };

/// Embedding-threshold flags. The thresholds come from three-space-dimension
/// Sobolev embeddings; in the 1-D/2-D setting of this library they are
/// sufficient conditions only and are reported as warnings, never errors.
struct ValidityReport {
  double rho = 0.0;
  double sigma = 0.0;
  bool a4_ok = false;   // rho >= 3/8 and sigma >= 3/8  (L4 embeddings)
  bool a8_ok = false;   // rho >= 1/4 and sigma >= 1/2  (L6 embeddings)
  bool a10_ok = false;  // rho > 3/4 or rho == 1/2      (sup-norm route)

  bool all_ok() const { return a4_ok && a8_ok && a10_ok; }
  std::vector<std::string> warnings() const;
};

ValidityReport embedding_guard(double rho, double sigma,
                               OperatorKind kind = OperatorKind::Laplacian);

}  // namespace caginalp
