#include "gpf/linop.hpp"

#include "gpf/errors.hpp"
#include "gpf/norm_est.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace gpf {

LinOp::LinOp(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.cols() < 1) throw DimensionError("operator must have positive shape");
  if (!m_.allFinite()) throw DomainError("operator has non-finite entries");
}

LinOp::LinOp(std::initializer_list<std::initializer_list<double>> rows)
    : LinOp([&] {
        const auto r = static_cast<Eigen::Index>(rows.size());
        const auto c = r ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
        Matrix m(r, c);
        Eigen::Index i = 0;
        for (const auto& row : rows) {
          if (static_cast<Eigen::Index>(row.size()) != c) throw DimensionError("ragged matrix rows");
          Eigen::Index j = 0;
          for (double v : row) m(i, j++) = v;
          ++i;
        }
        return m;
      }()) {}

LinOp LinOp::identity(int n) { return LinOp(Matrix::Identity(n, n)); }

LinOp LinOp::zero(int rows, int cols) { return LinOp(Matrix::Zero(rows, cols)); }

LinOp LinOp::diagonal(const std::vector<double>& entries) {
  Vector d = Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size()));
  return LinOp(Matrix(d.asDiagonal()));
}

LinOp LinOp::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("matrix has no rows");
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Matrix m(static_cast<Eigen::Index>(rows.size()), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) throw DimensionError("ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  }
  return LinOp(std::move(m));
}

LinOp LinOp::operator*(const LinOp& rhs) const {
  if (cols() != rhs.rows()) throw DimensionError("operator composition: inner dimensions differ");
  return LinOp(m_ * rhs.m_);
}

LinOp LinOp::operator+(const LinOp& rhs) const {
  if (rows() != rhs.rows() || cols() != rhs.cols()) throw DimensionError("operator sum: shapes differ");
  return LinOp(m_ + rhs.m_);
}

LinOp LinOp::operator-(const LinOp& rhs) const {
  if (rows() != rhs.rows() || cols() != rhs.cols())
    throw DimensionError("operator difference: shapes differ");
  return LinOp(m_ - rhs.m_);
}

LinOp LinOp::scaled(double c) const { return LinOp(c * m_); }

Vector apply(const LinOp& m, const Eigen::Ref<const Vector>& f) {
  if (f.size() != m.cols())
    throw DimensionError("apply: vector length " + std::to_string(f.size()) + " != operator columns " +
                         std::to_string(m.cols()));
  return m.matrix() * f;
}

LinOp adjoint(const LinOp& m) { return LinOp(m.matrix().transpose()); }

LinOp kronecker(const LinOp& a, const LinOp& b) {
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  Matrix k(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      k.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return LinOp(std::move(k));
}

Vector kronecker(const Eigen::Ref<const Vector>& f, const Eigen::Ref<const Vector>& g) {
  Vector out(f.size() * g.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out.segment(i * g.size(), g.size()) = f[i] * g;
  return out;
}

LinOp block_diagonal(const LinOp& a, const LinOp& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a.matrix();
  m.bottomRightCorner(b.rows(), b.cols()) = b.matrix();
  return LinOp(std::move(m));
}

Vector singular_values(const LinOp& m) {
  Eigen::JacobiSVD<Matrix> svd(m.matrix());
  return svd.singularValues();
}

int numerical_rank(const LinOp& m, double rel_tol) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > rel_tol * s[0]) ++rank;
  return rank;
}

Vector smallest_right_singular_vector(const LinOp& m) {
  Eigen::JacobiSVD<Matrix> svd(m.matrix(), Eigen::ComputeFullV);
  return svd.matrixV().col(m.cols() - 1);
}

InvertibilityReport is_invertible(const LinOp& m, double rel_tol) {
  if (!m.square()) throw DimensionError("invertibility test needs a square operator");
  const Vector s = singular_values(m);
  InvertibilityReport r;
  r.tolerance = rel_tol;
  r.sigma_max = s[0];
  r.sigma_min = s[s.size() - 1];
  r.norm2 = r.sigma_max;
  r.ratio = r.sigma_max > 0.0 ? r.sigma_min / r.sigma_max : 0.0;
  r.invertible = r.sigma_max > 0.0 && r.sigma_min > rel_tol * r.sigma_max;
  r.inverse_norm2 = r.sigma_min > 0.0 ? 1.0 / r.sigma_min : std::numeric_limits<double>::infinity();
  r.borderline = r.ratio > 0.0 && r.ratio > rel_tol / 100.0 && r.ratio < rel_tol * 100.0;
  return r;
}

LinOp inverse(const LinOp& m) {
  const auto report = is_invertible(m);
  if (!report.invertible) throw ContractError("operator is not invertible");
  return LinOp(m.matrix().fullPivLu().inverse());
}

SubspaceProjection::SubspaceProjection(LinOp matrix, std::vector<Vector> basis, Origin origin)
    : matrix_(std::move(matrix)), basis_(std::move(basis)), origin_(origin) {}

namespace {

Matrix stack_columns(const std::vector<Vector>& vectors, const char* what) {
  const auto n = vectors.front().size();
  Matrix b(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != n)
      throw DimensionError(std::string(what) + " vectors have different lengths");
    if (!vectors[k].allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
    b.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  return b;
}

void require_independent(const Matrix& b, const char* what) {
  Eigen::JacobiSVD<Matrix> svd(b);
  const Vector s = svd.singularValues();
  if (s.size() < b.cols() || s[0] == 0.0 || s[s.size() - 1] <= 1e-10 * s[0])
    throw RankError(std::string(what) + " vectors are linearly dependent");
}

}  // namespace

SubspaceProjection SubspaceProjection::from_basis(const std::vector<Vector>& basis) {
  if (basis.empty()) throw ContractError("projection must be non-trivial: empty basis");
  const Matrix b = stack_columns(basis, "basis");
  if (b.rows() < 1) throw DimensionError("basis vectors must be non-empty");
  require_independent(b, "basis");
  Eigen::HouseholderQR<Matrix> qr(b);
  const Matrix q = qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
  Matrix p = q * q.transpose();
  return SubspaceProjection(LinOp(std::move(p)), basis, Origin::LeastSquares);
}

SubspaceProjection SubspaceProjection::from_matrix(const LinOp& matrix, const std::vector<Vector>& basis) {
  if (!matrix.square()) throw DimensionError("projection matrix must be square");
  const Matrix& p = matrix.matrix();
  const double residual = (p * p - p).norm();
  // Rounding in P^2 grows with ||P||^2, which is large for nearly parallel range and kernel.
  const double scale = 1.0 + p.norm();
  if (residual > 1e-10 * scale * scale) {
    std::ostringstream msg;
    msg << "projection matrix is not idempotent (||P^2 - P||_F = " << std::scientific << residual << ")";
    throw ContractError(msg.str());
  }
  std::vector<Vector> range = basis;
  if (range.empty()) {
    Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
    const Vector s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s[0] > 0.0 && s[k] > 1e-10 * s[0]) range.emplace_back(svd.matrixU().col(k));
    if (range.empty()) throw ContractError("projection must be non-trivial: zero matrix");
  } else {
    const Matrix b = stack_columns(range, "basis");
    if (b.rows() != p.rows()) throw DimensionError("basis length does not match projection size");
    require_independent(b, "basis");
    for (const auto& v : range)
      if ((p * v - v).norm() > 1e-10 * scale * (1.0 + v.norm()))
        throw ContractError("projection does not fix its range basis (P b != b)");
    if (numerical_rank(matrix) != static_cast<int>(range.size()))
      throw RankError("projection rank differs from the supplied basis size");
  }
  return SubspaceProjection(matrix, std::move(range), Origin::Oblique);
}

SubspaceProjection SubspaceProjection::along(const std::vector<Vector>& range_basis,
                                             const std::vector<Vector>& kernel_basis) {
  if (range_basis.empty()) throw ContractError("projection must be non-trivial: empty range");
  std::vector<Vector> all = range_basis;
  all.insert(all.end(), kernel_basis.begin(), kernel_basis.end());
  const Matrix m = stack_columns(all, "range/kernel");
  if (m.rows() != m.cols()) throw DimensionError("range and kernel bases must together span R^n");
  require_independent(m, "range/kernel");
  Matrix keep = Matrix::Zero(m.rows(), m.cols());
  const auto r = static_cast<Eigen::Index>(range_basis.size());
  keep.leftCols(r) = m.leftCols(r);
  Matrix p = keep * m.inverse();
  // Exact idempotence is lost to rounding; one Newton-style cleanup step.
  p = 3.0 * p * p - 2.0 * p * p * p;
  return from_matrix(LinOp(std::move(p)), {});
}

SubspaceProjection SubspaceProjection::identity(int n) {
  std::vector<Vector> basis;
  for (int k = 0; k < n; ++k) basis.emplace_back(Vector::Unit(n, k));
  return SubspaceProjection(LinOp::identity(n), std::move(basis), Origin::LeastSquares);
}

double SubspaceProjection::idempotence_residual() const {
  const Matrix& p = matrix_.matrix();
  return (p * p - p).norm() / (1.0 + p.norm());
}

double SubspaceProjection::range_residual() const {
  double worst = 0.0;
  for (const auto& b : basis_) worst = std::max(worst, (matrix_.matrix() * b - b).norm());
  return worst;
}

SubspaceProjection make_projection(const std::vector<Vector>& basis) {
  return SubspaceProjection::from_basis(basis);
}

BoundEstimate lower_bound_constant(const LinOp& m, double p, const EstimatorOptions& options) {
  if (p == 2.0 && options.use_p2_exact) return exact_p2_inf(m, options.rank_tolerance);
  return inf_ratio(m, p, p, options);
}

BoundEstimate operator_norm(const LinOp& m, double p, const EstimatorOptions& options) {
  if (p == 2.0 && options.use_p2_exact) return exact_p2_sup(m);
  return sup_ratio(m, p, p, options);
}

}  // namespace gpf
