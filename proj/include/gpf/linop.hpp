#pragma once

#include "gpf/estimate.hpp"
#include "gpf/pnorm.hpp"

#include <initializer_list>
#include <vector>

namespace gpf {

/// Dense real matrix standing for a bounded operator between coordinate spaces.
/// Immutable after construction; entries are always finite.
class LinOp {
 public:
  explicit LinOp(Matrix entries);
  LinOp(std::initializer_list<std::initializer_list<double>> rows);

  static LinOp identity(int n);
  static LinOp zero(int rows, int cols);
  static LinOp diagonal(const std::vector<double>& entries);
  static LinOp from_rows(const std::vector<std::vector<double>>& rows);

  int rows() const noexcept { return static_cast<int>(m_.rows()); }
  int cols() const noexcept { return static_cast<int>(m_.cols()); }
  bool square() const noexcept { return m_.rows() == m_.cols(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  LinOp operator*(const LinOp& rhs) const;
  LinOp operator+(const LinOp& rhs) const;
  LinOp operator-(const LinOp& rhs) const;
  LinOp scaled(double c) const;

  double frobenius_norm() const { return m_.norm(); }

  friend bool operator==(const LinOp& a, const LinOp& b) {
    return a.m_.rows() == b.m_.rows() && a.m_.cols() == b.m_.cols() && a.m_ == b.m_;
  }

 private:
  Matrix m_;
};

/// M f. Throws DimensionError if f.size() != M.cols().
Vector apply(const LinOp& m, const Eigen::Ref<const Vector>& f);

/// Coordinate adjoint (transpose). Acts on coefficient vectors of functionals.
LinOp adjoint(const LinOp& m);

/// Kronecker product with row-major vectorization: (A (x) B)(f (x) g) = Af (x) Bg
/// where (f (x) g)[i * dim(g) + j] = f[i] g[j].
LinOp kronecker(const LinOp& a, const LinOp& b);
Vector kronecker(const Eigen::Ref<const Vector>& f, const Eigen::Ref<const Vector>& g);

/// Block-diagonal A (+) B.
LinOp block_diagonal(const LinOp& a, const LinOp& b);

/// Singular values in decreasing order.
Vector singular_values(const LinOp& m);

/// Number of singular values above `rel_tol * sigma_max`. Zero for the zero map.
int numerical_rank(const LinOp& m, double rel_tol = 1e-10);

/// Unit (2-norm) vector spanning the direction of the smallest right singular
/// value; a kernel vector when rank < cols.
Vector smallest_right_singular_vector(const LinOp& m);

struct InvertibilityReport {
  bool invertible = false;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  /// ||M||_2 and ||M^-1||_2 (infinite when singular).
  double norm2 = 0.0;
  double inverse_norm2 = 0.0;
  /// sigma_min / sigma_max, compared against the tolerance.
  double ratio = 0.0;
  double tolerance = 1e-10;
  /// Ratio within a factor of 100 of the tolerance on either side.
  bool borderline = false;
};

/// Invertible iff sigma_min > 1e-10 sigma_max. Throws DimensionError if not square.
InvertibilityReport is_invertible(const LinOp& m, double rel_tol = 1e-10);

/// Inverse of an invertible square operator; ContractError otherwise.
LinOp inverse(const LinOp& m);

/// Idempotent P on R^n together with a basis of its range V = P(R^n).
class SubspaceProjection {
 public:
  enum class Origin { LeastSquares, Oblique };

  /// Orthogonal projection B (B^T B)^-1 B^T onto span(basis).
  /// Throws ContractError for an empty basis, RankError for a dependent one.
  static SubspaceProjection from_basis(const std::vector<Vector>& basis);

  /// Validating constructor for arbitrary (oblique) idempotents. When `basis`
  /// is empty an orthonormal basis of the range is derived from the matrix.
  static SubspaceProjection from_matrix(const LinOp& matrix,
                                        const std::vector<Vector>& basis = {});

  /// Projection onto span(range_basis) along span(kernel_basis). The two
  /// families together must form a basis of R^n.
  static SubspaceProjection along(const std::vector<Vector>& range_basis,
                                  const std::vector<Vector>& kernel_basis);

  static SubspaceProjection identity(int n);

  const LinOp& matrix() const noexcept { return matrix_; }
  const std::vector<Vector>& basis() const noexcept { return basis_; }
  int ambient_dim() const noexcept { return matrix_.rows(); }
  int rank() const noexcept { return static_cast<int>(basis_.size()); }
  Origin origin() const noexcept { return origin_; }

  /// ||P P - P||_F / (1 + ||P||_F).
  double idempotence_residual() const;
  /// max_b ||P b - b||_2 over the stored range basis.
  double range_residual() const;

 private:
  SubspaceProjection(LinOp matrix, std::vector<Vector> basis, Origin origin);

  LinOp matrix_;
  std::vector<Vector> basis_;
  Origin origin_;
};

/// Same as SubspaceProjection::from_basis.
SubspaceProjection make_projection(const std::vector<Vector>& basis);

/// Estimate of inf_{||f||_p = 1} ||M f||_p. Exact (sigma_min) for p = 2.
BoundEstimate lower_bound_constant(const LinOp& m, double p,
                                   const EstimatorOptions& options = {});

/// Estimate of the induced norm ||M||_{p->p}. Exact (sigma_max) for p = 2.
BoundEstimate operator_norm(const LinOp& m, double p, const EstimatorOptions& options = {});

}  // namespace gpf
