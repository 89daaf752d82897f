#include "gpf/constructions.hpp"

#include "gpf/errors.hpp"
#include "gpf/norm_est.hpp"
#include "gpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gpf {

PerturbationParams::PerturbationParams(double lambda1, double lambda2, double mu)
    : l1_(lambda1), l2_(lambda2), mu_(mu) {
  if (!(l1_ > -1.0 && l1_ < 1.0)) throw DomainError("lambda1 must lie in (-1, 1)");
  if (!(l2_ > -1.0 && l2_ < 1.0)) throw DomainError("lambda2 must lie in (-1, 1)");
  if (!std::isfinite(mu_)) throw DomainError("mu must be finite");
}

bool PerturbationParams::admissible(double A, double B) const noexcept {
  return -(1.0 + l1_) * B <= mu_ && mu_ <= (1.0 - l1_) * A;
}

void PerturbationParams::validate_against(double A, double B) const {
  if (mu_ < -(1.0 + l1_) * B) throw ContractError("mu must satisfy mu >= -(1 + lambda1) B");
  if (mu_ > (1.0 - l1_) * A) throw ContractError("mu must satisfy mu <= (1 - lambda1) A");
}

namespace {

std::vector<Vector> kernel_basis(const LinOp& p) {
  Eigen::JacobiSVD<Matrix> svd(p.matrix(), Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  std::vector<Vector> out;
  for (Eigen::Index k = 0; k < p.cols(); ++k)
    if (k >= s.size() || s[k] <= 1e-10 * std::max(s[0], 1e-300)) out.emplace_back(svd.matrixV().col(k));
  return out;
}

BoundEstimate norm_p(const LinOp& m, double p, const EstimatorOptions& options) {
  return operator_norm(m, p, options);
}

void require_same_shape(const GPFusionFrame& a, const GPFusionFrame& b) {
  if (a.dim() != b.dim()) throw DimensionError("frames act on different spaces");
  if (a.p() != b.p()) throw DomainError("frames use different exponents p");
  if (a.block_dims() != b.block_dims()) throw DimensionError("frames have different block shapes");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.triple(i).weight() != b.triple(i).weight())
      throw ContractError("weights differ at index " + std::to_string(i));
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

}  // namespace

std::vector<SubspaceProjection> compatible_image_projections(const GPFusionFrame& frame, const LinOp& U) {
  if (U.rows() != frame.dim() || U.cols() != frame.dim())
    throw DimensionError("transform must be n x n for a frame on R^n");
  const LinOp u_inv = inverse(U);
  std::vector<SubspaceProjection> out;
  out.reserve(frame.size());
  for (const auto& t : frame.triples()) {
    std::vector<Vector> range;
    for (const auto& b : t.projection().basis()) range.emplace_back(U.matrix() * b);
    std::vector<Vector> kernel;
    for (const auto& k : kernel_basis(t.projection().matrix())) kernel.emplace_back(u_inv.matrix() * k);
    out.push_back(SubspaceProjection::along(range, kernel));
  }
  return out;
}

GPFusionFrame transformed_family(const GPFusionFrame& frame, const LinOp& U,
                                 const std::vector<SubspaceProjection>& projections_on_UV) {
  if (projections_on_UV.size() != frame.size())
    throw DimensionError("need one image projection per triple");
  std::vector<WeightedTriple> triples;
  triples.reserve(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto& t = frame.triple(i);
    triples.emplace_back(projections_on_UV[i], t.composite() * U, t.weight());
  }
  return GPFusionFrame(frame.space(), std::move(triples));
}

namespace {

std::vector<double> hypothesis_residuals(const GPFusionFrame& frame, const LinOp& U,
                                         const std::vector<SubspaceProjection>& projections_on_UV) {
  std::vector<double> r;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const Matrix pu = frame.triple(i).projection().matrix().matrix() * U.matrix();
    r.push_back((pu * projections_on_UV[i].matrix().matrix() - pu).norm());
  }
  return r;
}

bool all_small(const std::vector<double>& r) {
  return std::all_of(r.begin(), r.end(), [](double x) { return x <= 1e-9; });
}

}  // namespace

TransformResult transform_by_invertible(const GPFusionFrame& frame, const LinOp& U,
                                        const std::vector<SubspaceProjection>& projections_on_UV,
                                        const EstimatorOptions& options) {
  if (!U.square() || U.rows() != frame.dim()) throw DimensionError("transform must be n x n");
  if (!is_invertible(U).invertible) throw ContractError("transform operator is not invertible");
  GPFusionFrame gamma = transformed_family(frame, U, projections_on_UV);
  const FrameBounds base = estimate_bounds(frame, options);
  TransformResult r{std::move(gamma), {}, false, {}, {}, {}};
  r.residuals = hypothesis_residuals(frame, U, projections_on_UV);
  r.hypothesis_ok = all_small(r.residuals);
  r.operator_norm = norm_p(U, frame.p(), options);
  r.inverse_norm = norm_p(inverse(U), frame.p(), options);
  r.predicted.lower = base.A() / r.inverse_norm.value;
  r.predicted.upper = base.B() * r.operator_norm.value;
  r.predicted.provenance = "invertible-transform";
  return r;
}

BoundedBelowReport bounded_below_iff_frame(const GPFusionFrame& frame, const LinOp& U,
                                           const std::vector<SubspaceProjection>& projections_on_UV,
                                           const EstimatorOptions& options) {
  BoundedBelowReport r;
  if (!U.square() || U.rows() != frame.dim()) throw DimensionError("transform must be n x n");
  r.applicable = all_small(hypothesis_residuals(frame, U, projections_on_UV));
  if (!r.applicable) return r;
  const GPFusionFrame gamma = transformed_family(frame, U, projections_on_UV);
  const FrameBounds base = estimate_bounds(frame, options);
  r.A = base.A();
  r.B = base.B();
  const FrameBounds gb = estimate_bounds(gamma, options);
  const auto gc = classify(gamma, gb, options);
  r.C = gc.kernel_detected ? 0.0 : gb.A();
  r.transformed_is_frame = is_frame_class(gc.frame_class);
  const BoundEstimate m = lower_bound_constant(U, frame.p(), options);
  r.u_bounded_below = numerical_rank(U, options.rank_tolerance) == U.cols();
  r.M = r.u_bounded_below ? m.value : 0.0;
  const double scale = std::max({1.0, r.B, r.C, r.A * r.M});
  const double tol = r.tolerance * scale;
  r.forward_holds = !r.transformed_is_frame || r.M >= r.C / r.B - tol;
  r.backward_holds = !r.u_bounded_below || r.C >= r.A * r.M - tol;
  return r;
}

PerturbationCheck perturbation_condition_holds(const GPFusionFrame& lambda, const GPFusionFrame& gamma,
                                               const PerturbationParams& params,
                                               const EstimatorOptions& options) {
  require_same_shape(lambda, gamma);
  const double p = lambda.p();
  const Matrix a = lambda.analysis_matrix().matrix();
  const Matrix g = gamma.analysis_matrix().matrix();
  const Matrix d = a - g;
  const double l1 = params.lambda1(), l2 = params.lambda2(), mu = params.mu();

  auto term = [p](const Matrix& m, const Vector& x, double c, Vector* grad) {
    const Vector y = m * x;
    const double ny = p_norm(y, p);
    if (grad && ny > 0.0) *grad += c * (m.transpose() * duality_map(y, p));
    return c * ny;
  };
  const HomogeneousObjective violation = [&](const Vector& x, Vector* grad) {
    if (grad) *grad = Vector::Zero(x.size());
    double v = term(d, x, 1.0, grad) + term(a, x, -l1, grad) + term(g, x, -l2, grad);
    const double nx = p_norm(x, p);
    if (grad && nx > 0.0) *grad -= mu * duality_map(x, p);
    return v - mu * nx;
  };
  const BoundEstimate best = maximize_on_sphere(violation, lambda.dim(), p, options);
  PerturbationCheck c;
  c.max_violation = best.value;
  c.witness = best.witness;
  c.holds = c.max_violation <= 1e-9;
  c.restarts = options.restarts;
  c.seed = options.seed;
  return c;
}

PredictedBounds predicted_perturbed_bounds(double A, double B, const PerturbationParams& params) {
  const double l1 = params.lambda1(), l2 = params.lambda2(), mu = params.mu();
  return {(A * (1.0 - l1) - mu) / (1.0 + l2), (B * (1.0 + l1) + mu) / (1.0 - l2), "perturbation-1"};
}

PredictedBounds simple_perturbation_bounds(double A, double B, double R) {
  if (!(R > 0.0)) throw ContractError("perturbation radius must satisfy 0 < R");
  if (!(R < A)) throw ContractError("perturbation radius must satisfy R < A");
  return {A - R, B + R, "perturbation-2"};
}

BoundEstimate measure_perturbation_radius(const GPFusionFrame& lambda, const GPFusionFrame& gamma,
                                          const EstimatorOptions& options) {
  require_same_shape(lambda, gamma);
  const LinOp d = lambda.analysis_matrix() - gamma.analysis_matrix();
  return operator_norm(d, lambda.p(), options);
}

namespace {

std::vector<Vector> embed(const std::vector<Vector>& basis, Eigen::Index offset, Eigen::Index total) {
  std::vector<Vector> out;
  for (const auto& b : basis) {
    Vector e = Vector::Zero(total);
    e.segment(offset, b.size()) = b;
    out.push_back(std::move(e));
  }
  return out;
}

SubspaceProjection sum_projection(const SubspaceProjection& a, const SubspaceProjection& b) {
  const Eigen::Index n = a.ambient_dim(), m = b.ambient_dim();
  std::vector<Vector> basis = embed(a.basis(), 0, n + m);
  const auto lower = embed(b.basis(), n, n + m);
  basis.insert(basis.end(), lower.begin(), lower.end());
  using O = SubspaceProjection::Origin;
  if (a.origin() == O::LeastSquares && b.origin() == O::LeastSquares)
    return SubspaceProjection::from_basis(basis);
  return SubspaceProjection::from_matrix(block_diagonal(a.matrix(), b.matrix()), basis);
}

SubspaceProjection tensor_projection(const SubspaceProjection& a, const SubspaceProjection& b) {
  std::vector<Vector> basis;
  for (const auto& x : a.basis())
    for (const auto& y : b.basis()) basis.push_back(kronecker(x, y));
  using O = SubspaceProjection::Origin;
  if (a.origin() == O::LeastSquares && b.origin() == O::LeastSquares)
    return SubspaceProjection::from_basis(basis);
  return SubspaceProjection::from_matrix(kronecker(a.matrix(), b.matrix()), basis);
}

}  // namespace

CombinedFrame direct_sum(const GPFusionFrame& x, const GPFusionFrame& y, const EstimatorOptions& options) {
  if (x.p() != y.p()) throw DomainError("direct sum needs a common exponent p");
  if (x.size() != y.size()) throw DimensionError("direct sum pairs triples by index: counts differ");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x.triple(i).weight() != y.triple(i).weight())
      throw ContractError("direct sum needs equal weights per index; index " + std::to_string(i) + " differs");
  std::vector<WeightedTriple> triples;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& a = x.triple(i);
    const auto& b = y.triple(i);
    triples.emplace_back(sum_projection(a.projection(), b.projection()),
                         block_diagonal(a.local_op(), b.local_op()), a.weight());
  }
  GPFusionFrame frame(PNormSpace(x.dim() + y.dim(), x.p()), std::move(triples));
  const FrameBounds bx = estimate_bounds(x, options);
  const FrameBounds by = estimate_bounds(y, options);
  const double p = x.p();
  PredictedBounds pred;
  pred.lower = std::min(bx.A(), by.A());
  pred.upper = std::max(bx.B(), by.B());
  pred.provenance = "direct-sum; powered form min(A^p,C^p)=" + fmt(std::pow(pred.lower, p)) +
                    ", max(B^p,D^p)=" + fmt(std::pow(pred.upper, p));
  return {std::move(frame), std::move(pred)};
}

TensorProduct tensor_product(const GPFusionFrame& x, const GPFusionFrame& y, const EstimatorOptions& options) {
  if (x.p() != y.p()) throw DomainError("tensor product needs a common exponent p");
  std::vector<WeightedTriple> triples;
  for (const auto& a : x.triples())
    for (const auto& b : y.triples())
      triples.emplace_back(tensor_projection(a.projection(), b.projection()),
                           kronecker(a.local_op(), b.local_op()), a.weight() * b.weight());
  GPFusionFrame frame(PNormSpace(x.dim() * y.dim(), x.p()), std::move(triples));
  const FrameBounds bx = estimate_bounds(x, options);
  const FrameBounds by = estimate_bounds(y, options);
  PredictedBounds pred{bx.A() * by.A(), bx.B() * by.B(), "tensor-product"};
  return {std::move(frame), std::move(pred), x, y};
}

namespace {

// Rows of the product analysis matrix are ordered (i, j, block row); regroup
// them so that the product map on f (x) g0 reads as a map on f alone.
Matrix restrict_left(const Matrix& product, const Vector& g0, int n) {
  Matrix r(product.rows(), n);
  for (int k = 0; k < n; ++k) r.col(k) = product * kronecker(Vector::Unit(n, k), g0);
  return r;
}

Matrix restrict_right(const Matrix& product, const Vector& f0, int m) {
  Matrix r(product.rows(), m);
  for (int k = 0; k < m; ++k) r.col(k) = product * kronecker(f0, Vector::Unit(m, k));
  return r;
}

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
};

Extremes extremes(const Matrix& m, double p, const EstimatorOptions& options) {
  const LinOp op(m);
  return {lower_bound_constant(op, p, options).value, operator_norm(op, p, options).value};
}

}  // namespace

FactorBoundsReport tensor_converse_extract(const TensorProduct& product, const EstimatorOptions& options,
                                           std::size_t samples) {
  const GPFusionFrame& x = product.left;
  const GPFusionFrame& y = product.right;
  const int n = x.dim(), m = y.dim();
  const double p = product.frame.p();
  if (product.frame.dim() != n * m || product.frame.size() != x.size() * y.size())
    throw ContractError("product frame does not match its recorded factors");
  if (samples == 0) throw ContractError("need at least one sample");

  const Matrix& big = product.frame.analysis_matrix().matrix();
  const Matrix& ux = x.analysis_matrix().matrix();
  const Matrix& uy = y.analysis_matrix().matrix();
  const FrameBounds prod_bounds = estimate_bounds(product.frame, options);
  const FrameBounds bx = estimate_bounds(x, options);
  const FrameBounds by = estimate_bounds(y, options);

  FactorBoundsReport rep;
  rep.samples = samples;
  rep.left.lower = rep.right.lower = std::numeric_limits<double>::infinity();
  CounterRng rng(options.seed, 0x74656e736f720000ULL);
  auto unit = [&](int d) {
    Vector v(d);
    do {
      for (auto& e : v) e = rng.normal();
    } while (v.norm() == 0.0);
    return Vector(v / p_norm(v, p));
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector g0 = unit(m);
    const double sg = p_norm(uy * g0, p);
    if (sg > 0.0) {
      const auto e = extremes(restrict_left(big, g0, n) / sg, p, options);
      rep.left.lower = std::min(rep.left.lower, e.lo);
      rep.left.upper = std::max(rep.left.upper, e.hi);
    }
    const Vector f0 = unit(n);
    const double sf = p_norm(ux * f0, p);
    if (sf > 0.0) {
      const auto e = extremes(restrict_right(big, f0, m) / sf, p, options);
      rep.right.lower = std::min(rep.right.lower, e.lo);
      rep.right.upper = std::max(rep.right.upper, e.hi);
    }
  }
  if (!std::isfinite(rep.left.lower)) rep.left.lower = 0.0;
  if (!std::isfinite(rep.right.lower)) rep.right.lower = 0.0;

  rep.left.theorem_lower = prod_bounds.A() / by.B();
  rep.left.theorem_upper = by.A() > 0.0 ? prod_bounds.B() / by.A() : std::numeric_limits<double>::infinity();
  rep.right.theorem_lower = prod_bounds.A() / bx.B();
  rep.right.theorem_upper = bx.A() > 0.0 ? prod_bounds.B() / bx.A() : std::numeric_limits<double>::infinity();
  rep.left.direct_lower = bx.A();
  rep.left.direct_upper = bx.B();
  rep.right.direct_lower = by.A();
  rep.right.direct_upper = by.B();
  rep.left.frame_class = classify(x, bx, options).frame_class;
  rep.right.frame_class = classify(y, by, options).frame_class;
  rep.factors_are_frames = is_frame_class(rep.left.frame_class) && is_frame_class(rep.right.frame_class);
  return rep;
}

}  // namespace gpf
