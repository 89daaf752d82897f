#pragma once

#include "gpf/estimate.hpp"
#include "gpf/gframe.hpp"
#include "gpf/linop.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gpf {

/// Constants of the general perturbation inequality
///   ||(Lambda - Gamma) f|| <= l1 ||Lambda f|| + l2 ||Gamma f|| + mu ||f||.
class PerturbationParams {
 public:
  /// Throws DomainError unless l1, l2 lie in (-1, 1) and mu is finite.
  PerturbationParams(double lambda1, double lambda2, double mu);

  double lambda1() const noexcept { return l1_; }
  double lambda2() const noexcept { return l2_; }
  double mu() const noexcept { return mu_; }

  /// -(1 + l1) B <= mu <= (1 - l1) A.
  bool admissible(double A, double B) const noexcept;
  /// Throws ContractError naming the violated side when not admissible.
  void validate_against(double A, double B) const;

 private:
  double l1_;
  double l2_;
  double mu_;
};

struct PredictedBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// Short tag of the result the bounds come from, e.g. "perturbation-1".
  std::string provenance;

  bool contains(double a, double b, double tol) const noexcept {
    return a >= lower - tol && b <= upper + tol;
  }
};

// ---------------------------------------------------------------------------
// Invertible transforms

/// Projections onto U V_i that satisfy P_{V_i} U P_{U V_i} = P_{V_i} U: range
/// U V_i, kernel U^{-1}(ker P_{V_i}). Throws ContractError when U is singular
/// and RankError when those subspaces are not complementary.
std::vector<SubspaceProjection> compatible_image_projections(const GPFusionFrame& frame, const LinOp& U);

/// The family {(U V_i, Lambda_i P_{V_i} U, v_i)} built on the given projections.
GPFusionFrame transformed_family(const GPFusionFrame& frame, const LinOp& U,
                                 const std::vector<SubspaceProjection>& projections_on_UV);

struct TransformResult {
  GPFusionFrame frame;
  PredictedBounds predicted;
  bool hypothesis_ok = false;
  /// ||P_{V_i} U P_{UV_i} - P_{V_i} U||_F per triple.
  std::vector<double> residuals;
  BoundEstimate operator_norm;  ///< ||U||_p
  BoundEstimate inverse_norm;   ///< ||U^{-1}||_p
};

/// Predicted bounds (A / ||U^{-1}||_p, B ||U||_p), with A, B measured on `frame`.
TransformResult transform_by_invertible(const GPFusionFrame& frame, const LinOp& U,
                                        const std::vector<SubspaceProjection>& projections_on_UV,
                                        const EstimatorOptions& options);

struct BoundedBelowReport {
  bool applicable = false;  ///< compatibility hypothesis held
  double A = 0.0, B = 0.0;  ///< bounds of the original family
  double C = 0.0;           ///< lower bound of the transformed family
  double M = 0.0;           ///< lower_bound_constant(U, p)
  bool transformed_is_frame = false;
  bool u_bounded_below = false;
  /// Frame => M >= C / B - tol.
  bool forward_holds = false;
  /// Bounded below => C >= A M - tol.
  bool backward_holds = false;
  double tolerance = 1e-6;
};

BoundedBelowReport bounded_below_iff_frame(const GPFusionFrame& frame, const LinOp& U,
                                           const std::vector<SubspaceProjection>& projections_on_UV,
                                           const EstimatorOptions& options);

// ---------------------------------------------------------------------------
// Perturbations

struct PerturbationCheck {
  bool holds = false;  ///< max violation <= 1e-9
  double max_violation = 0.0;
  Vector witness;
  int restarts = 0;
  std::uint64_t seed = 0;
};

/// Maximizes ||(U_Lambda - U_Gamma) f|| - l1 ||U_Lambda f|| - l2 ||U_Gamma f||
/// - mu ||f|| over the unit p-sphere. Frames must share n, p, block shapes and
/// per-index weights.
PerturbationCheck perturbation_condition_holds(const GPFusionFrame& lambda, const GPFusionFrame& gamma,
                                               const PerturbationParams& params,
                                               const EstimatorOptions& options);

/// ((A(1 - l1) - mu) / (1 + l2), (B(1 + l1) + mu) / (1 - l2)).
PredictedBounds predicted_perturbed_bounds(double A, double B, const PerturbationParams& params);

/// (A - R, B + R); ContractError unless 0 < R < A.
PredictedBounds simple_perturbation_bounds(double A, double B, double R);

/// Sup of ||(U_Lambda - U_Gamma) f|| / ||f||_p, the smallest admissible R.
BoundEstimate measure_perturbation_radius(const GPFusionFrame& lambda, const GPFusionFrame& gamma,
                                          const EstimatorOptions& options);

// ---------------------------------------------------------------------------
// Products

struct CombinedFrame {
  GPFusionFrame frame;
  PredictedBounds predicted;
};

/// {(V_i + W_i, Lambda_i (+) Gamma_i, v_i)} on R^{n+m} with the l^p sum norm.
/// Predicted (min(A, C), max(B, D)); the provenance also records the powered
/// form min(A^p, C^p), max(B^p, D^p).
CombinedFrame direct_sum(const GPFusionFrame& x, const GPFusionFrame& y, const EstimatorOptions& options);

struct TensorProduct {
  GPFusionFrame frame;
  PredictedBounds predicted;  ///< (A C, B D)
  GPFusionFrame left;
  GPFusionFrame right;
};

/// Triples over all pairs (i, j) in row-major order: (P_i (x) Q_j,
/// Lambda_i (x) Gamma_j, v_i w_j). Vectors use kron(f, g)[i m + j] = f_i g_j.
TensorProduct tensor_product(const GPFusionFrame& x, const GPFusionFrame& y, const EstimatorOptions& options);

struct FactorBounds {
  /// Bounds read off elementary tensors f (x) g0 with the sharper
  /// per-g0 normalisation s(g0) = ||U_Gamma g0||.
  double lower = 0.0;
  double upper = 0.0;
  /// Theorem-style constants A_prod / D and B_prod / C (resp. / B, / A).
  double theorem_lower = 0.0;
  double theorem_upper = 0.0;
  FrameClass frame_class = FrameClass::NotFrame;
  /// Factor measured directly, for comparison.
  double direct_lower = 0.0;
  double direct_upper = 0.0;
};

struct FactorBoundsReport {
  FactorBounds left;
  FactorBounds right;
  std::size_t samples = 0;
  bool factors_are_frames = false;
};

/// Recovers factor bounds from the product frame by restricting it to
/// elementary tensors. `samples` unit vectors are drawn for the fixed factor.
FactorBoundsReport tensor_converse_extract(const TensorProduct& product, const EstimatorOptions& options,
                                           std::size_t samples = 32);

}  // namespace gpf
