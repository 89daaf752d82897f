#pragma once

#include "gpf/estimate.hpp"
#include "gpf/linop.hpp"
#include "gpf/pnorm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gpf {

/// One member (V_i, Lambda_i, v_i) of a family: projection onto V_i, local
/// operator Lambda_i : R^n -> R^{d_i}, and a positive weight.
class WeightedTriple {
 public:
  WeightedTriple(SubspaceProjection projection, LinOp local_op, double weight);

  const SubspaceProjection& projection() const noexcept { return projection_; }
  const LinOp& local_op() const noexcept { return local_op_; }
  double weight() const noexcept { return weight_; }
  int block_dim() const noexcept { return local_op_.rows(); }
  int ambient_dim() const noexcept { return local_op_.cols(); }

  /// Lambda_i P_{V_i} as a d_i x n matrix (weight not included).
  LinOp composite() const;

 private:
  SubspaceProjection projection_;
  LinOp local_op_;
  double weight_;
};

/// A finite family {(V_i, Lambda_i, v_i)} over (R^n, ||.||_p). Immutable.
class GPFusionFrame {
 public:
  GPFusionFrame(PNormSpace space, std::vector<WeightedTriple> triples);

  const PNormSpace& space() const noexcept { return space_; }
  int dim() const noexcept { return space_.dim(); }
  double p() const noexcept { return space_.p(); }
  double q() const noexcept { return space_.q(); }
  std::size_t size() const noexcept { return triples_.size(); }
  const std::vector<WeightedTriple>& triples() const noexcept { return triples_; }
  const WeightedTriple& triple(std::size_t i) const { return triples_.at(i); }
  std::vector<int> block_dims() const;
  int total_block_dim() const;

  /// Stacked [v_1 Lambda_1 P_1; ...; v_m Lambda_m P_m], (sum d_i) x n.
  const LinOp& analysis_matrix() const noexcept { return analysis_; }
  /// Transpose of the analysis matrix: g -> sum v_i P_i^T Lambda_i^T g_i.
  LinOp synthesis_matrix() const { return adjoint(analysis_); }

  /// Lambda_i -> c Lambda_i for every i.
  GPFusionFrame scaled_operators(double c) const;
  /// v_i -> c v_i for every i.
  GPFusionFrame scaled_weights(double c) const;
  /// The subfamily indexed by `indices` (order preserved as given).
  GPFusionFrame subfamily(const std::vector<std::size_t>& indices) const;

 private:
  PNormSpace space_;
  std::vector<WeightedTriple> triples_;
  LinOp analysis_;
};

/// U f = {v_i Lambda_i P_{V_i} f}.
MixedSeq analysis_apply(const GPFusionFrame& frame, const Eigen::Ref<const Vector>& f);

/// T {g_i} = sum_i v_i P_{V_i}^T Lambda_i^T g_i, a coefficient vector in X*.
Vector synthesis_apply(const GPFusionFrame& frame, const DualMixedSeq& g);

struct FrameBounds {
  BoundEstimate lower;  ///< A, from inf_ratio
  BoundEstimate upper;  ///< B, from sup_ratio
  std::optional<BoundEstimate> exact_lower;  ///< p = 2 only
  std::optional<BoundEstimate> exact_upper;

  /// Certified values when present, estimator values otherwise.
  const BoundEstimate& best_lower() const { return exact_lower ? *exact_lower : lower; }
  const BoundEstimate& best_upper() const { return exact_upper ? *exact_upper : upper; }
  double A() const { return best_lower().value; }
  double B() const { return best_upper().value; }
};

/// A = inf and B = sup of ||U f|| / ||f||_p. p = 2 frames also carry SVD values
/// when `options.use_p2_exact`.
FrameBounds estimate_bounds(const GPFusionFrame& frame, const EstimatorOptions& options);

enum class FrameClass { NotFrame, BesselOnly, Frame, Tight, Parseval };
std::string_view to_string(FrameClass c) noexcept;
bool is_frame_class(FrameClass c) noexcept;

struct ClassifyTolerances {
  /// Tight iff |A - B| <= tight * B; Parseval additionally |A - 1| <= tight.
  double tight = 1e-6;
  /// BesselOnly iff no kernel is detected but A <= lower_floor * B.
  double lower_floor = 1e-8;
};

struct FrameClassification {
  std::optional<BoundEstimate> bessel_bound;
  std::optional<BoundEstimate> lower_bound;
  FrameClass frame_class = FrameClass::NotFrame;
  int stacked_rank = 0;
  bool kernel_detected = false;
};

FrameClassification classify(const GPFusionFrame& frame, const EstimatorOptions& options,
                             const ClassifyTolerances& tolerances = {});
/// Same, reusing bounds that were already estimated.
FrameClassification classify(const GPFusionFrame& frame, const FrameBounds& bounds,
                             const EstimatorOptions& options, const ClassifyTolerances& tolerances = {});

/// {(V_i, A^-1 Lambda_i, v_i)} for a tight frame with bound A.
/// Throws ContractError when the frame does not classify as tight.
GPFusionFrame rescale_to_parseval(const GPFusionFrame& frame, const EstimatorOptions& options,
                                  const ClassifyTolerances& tolerances = {});

/// Only f = 0 is annihilated by every Lambda_i P_{V_i} (stacked rank n).
bool is_gf_complete(const GPFusionFrame& frame, double rank_tolerance = 1e-10);

struct RieszReport {
  bool gf_complete = false;
  /// inf / sup of ||T g||_q / ||g||_q over every subfamily J.
  BoundEstimate lower_sandwich;
  BoundEstimate upper_sandwich;
  bool is_riesz = false;
  /// T is injective on the whole sequence space (rank = sum d_i).
  bool synthesis_injective = false;
  std::size_t subsets_checked = 0;
  /// Subsets were drawn at random rather than enumerated (|I| > 8).
  bool subsets_sampled = false;
};

RieszReport check_riesz(const GPFusionFrame& frame, const EstimatorOptions& options);

struct DualityReport {
  /// max |<U f, g> - <f, T g>| / (1 + ||U f||_p ||g||_q).
  double max_residual = 0.0;
  std::size_t samples = 0;
};

DualityReport verify_duality(const GPFusionFrame& frame, std::size_t samples, std::uint64_t seed);

struct SurjectivityReport {
  FrameClass frame_class = FrameClass::NotFrame;
  bool is_frame = false;
  int synthesis_rank = 0;
  bool synthesis_surjective = false;
  /// is_frame == synthesis_surjective.
  bool frame_equivalence_holds = false;
  /// R(U) equals the whole sequence space (rank of U = sum d_i).
  bool analysis_surjective = false;
  bool synthesis_injective = false;
  bool is_riesz = false;
  /// For frames: is_riesz == synthesis_injective == analysis_surjective.
  bool riesz_equivalence_holds = false;
};

SurjectivityReport verify_surjectivity_characterization(const GPFusionFrame& frame,
                                                        const EstimatorOptions& options);

struct BesselSynthesisReport {
  /// ||T|| from l^q({X_i*}) to X*.
  BoundEstimate synthesis_norm;
  /// Bessel bound B of the family.
  double bessel_bound = 0.0;
  /// ||T|| <= B + 1e-6.
  bool synthesis_bounded_by_B = false;
  /// max over sampled f of ||U f||_p / (||T|| ||f||_p); must not exceed 1.
  double analysis_over_T = 0.0;
  bool analysis_bounded_by_T = false;
};

BesselSynthesisReport verify_bessel_synthesis(const GPFusionFrame& frame,
                                              const EstimatorOptions& options);

/// max over random permutations pi and inputs g of the relative change of
/// sum_i v_i P_i^T Lambda_i^T g_i when summed in order pi.
double synthesis_permutation_residual(const GPFusionFrame& frame, std::size_t permutations,
                                      std::uint64_t seed);

}  // namespace gpf
