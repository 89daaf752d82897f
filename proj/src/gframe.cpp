#include "gpf/gframe.hpp"

#include "gpf/errors.hpp"
#include "gpf/norm_est.hpp"
#include "gpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gpf {

WeightedTriple::WeightedTriple(SubspaceProjection projection, LinOp local_op, double weight)
    : projection_(std::move(projection)), local_op_(std::move(local_op)), weight_(weight) {
  if (!(weight_ > 0.0) || !std::isfinite(weight_)) throw ContractError("weight must be > 0");
  if (local_op_.cols() != projection_.ambient_dim())
    throw DimensionError("local operator has " + std::to_string(local_op_.cols()) +
                         " columns but the projection acts on R^" +
                         std::to_string(projection_.ambient_dim()));
}

LinOp WeightedTriple::composite() const { return local_op_ * projection_.matrix(); }

namespace {

LinOp stack_analysis(const std::vector<WeightedTriple>& triples, int n) {
  int rows = 0;
  for (const auto& t : triples) rows += t.block_dim();
  Matrix m(rows, n);
  int offset = 0;
  for (const auto& t : triples) {
    m.middleRows(offset, t.block_dim()) = t.weight() * t.composite().matrix();
    offset += t.block_dim();
  }
  return LinOp(std::move(m));
}

}  // namespace

GPFusionFrame::GPFusionFrame(PNormSpace space, std::vector<WeightedTriple> triples)
    : space_(space),
      triples_(std::move(triples)),
      analysis_([&] {
        if (triples_.empty()) throw ContractError("a frame needs at least one triple");
        for (std::size_t i = 0; i < triples_.size(); ++i)
          if (triples_[i].ambient_dim() != space_.dim())
            throw DimensionError("triple " + std::to_string(i) + " acts on R^" +
                                 std::to_string(triples_[i].ambient_dim()) + ", expected R^" +
                                 std::to_string(space_.dim()));
        return stack_analysis(triples_, space_.dim());
      }()) {}

std::vector<int> GPFusionFrame::block_dims() const {
  std::vector<int> dims;
  dims.reserve(triples_.size());
  for (const auto& t : triples_) dims.push_back(t.block_dim());
  return dims;
}

int GPFusionFrame::total_block_dim() const { return analysis_.rows(); }

GPFusionFrame GPFusionFrame::scaled_operators(double c) const {
  std::vector<WeightedTriple> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) out.emplace_back(t.projection(), t.local_op().scaled(c), t.weight());
  return GPFusionFrame(space_, std::move(out));
}

GPFusionFrame GPFusionFrame::scaled_weights(double c) const {
  std::vector<WeightedTriple> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) out.emplace_back(t.projection(), t.local_op(), c * t.weight());
  return GPFusionFrame(space_, std::move(out));
}

GPFusionFrame GPFusionFrame::subfamily(const std::vector<std::size_t>& indices) const {
  std::vector<WeightedTriple> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(triples_.at(i));
  return GPFusionFrame(space_, std::move(out));
}

MixedSeq analysis_apply(const GPFusionFrame& frame, const Eigen::Ref<const Vector>& f) {
  if (f.size() != frame.dim()) throw DimensionError("analysis: vector length does not match frame dimension");
  std::vector<Vector> blocks;
  blocks.reserve(frame.size());
  for (const auto& t : frame.triples())
    blocks.emplace_back(t.weight() * apply(t.local_op(), apply(t.projection().matrix(), f)));
  return MixedSeq(std::move(blocks), frame.p());
}

Vector synthesis_apply(const GPFusionFrame& frame, const DualMixedSeq& g) {
  if (g.block_dims() != frame.block_dims())
    throw DimensionError("synthesis: block shapes do not match the frame");
  Vector out = Vector::Zero(frame.dim());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto& t = frame.triple(i);
    out += t.weight() * (t.projection().matrix().matrix().transpose() *
                         (t.local_op().matrix().transpose() * g.block(i)));
  }
  return out;
}

FrameBounds estimate_bounds(const GPFusionFrame& frame, const EstimatorOptions& options) {
  const LinOp& u = frame.analysis_matrix();
  FrameBounds b;
  b.lower = inf_ratio(u, frame.p(), frame.p(), options);
  b.upper = sup_ratio(u, frame.p(), frame.p(), options);
  if (frame.p() == 2.0 && options.use_p2_exact) {
    b.exact_lower = exact_p2_inf(u, options.rank_tolerance);
    b.exact_upper = exact_p2_sup(u);
  }
  return b;
}

std::string_view to_string(FrameClass c) noexcept {
  switch (c) {
    case FrameClass::NotFrame:
      return "NotFrame";
    case FrameClass::BesselOnly:
      return "BesselOnly";
    case FrameClass::Frame:
      return "Frame";
    case FrameClass::Tight:
      return "Tight";
    case FrameClass::Parseval:
      return "Parseval";
  }
  return "Unknown";
}

bool is_frame_class(FrameClass c) noexcept {
  return c == FrameClass::Frame || c == FrameClass::Tight || c == FrameClass::Parseval;
}

FrameClassification classify(const GPFusionFrame& frame, const FrameBounds& bounds,
                             const EstimatorOptions& options, const ClassifyTolerances& tol) {
  FrameClassification c;
  c.bessel_bound = bounds.best_upper();
  c.lower_bound = bounds.best_lower();
  c.stacked_rank = numerical_rank(frame.analysis_matrix(), options.rank_tolerance);
  c.kernel_detected = c.stacked_rank < frame.dim();
  const double a = c.lower_bound->value;
  const double b = c.bessel_bound->value;
  if (c.kernel_detected) {
    c.frame_class = FrameClass::NotFrame;
  } else if (!(a > tol.lower_floor * b)) {
    c.frame_class = FrameClass::BesselOnly;
  } else if (std::abs(a - b) <= tol.tight * b) {
    c.frame_class = std::abs(a - 1.0) <= tol.tight && std::abs(b - 1.0) <= tol.tight ? FrameClass::Parseval
                                                                                      : FrameClass::Tight;
  } else {
    c.frame_class = FrameClass::Frame;
  }
  return c;
}

FrameClassification classify(const GPFusionFrame& frame, const EstimatorOptions& options,
                             const ClassifyTolerances& tol) {
  return classify(frame, estimate_bounds(frame, options), options, tol);
}

GPFusionFrame rescale_to_parseval(const GPFusionFrame& frame, const EstimatorOptions& options,
                                  const ClassifyTolerances& tol) {
  const auto c = classify(frame, options, tol);
  if (c.frame_class != FrameClass::Tight && c.frame_class != FrameClass::Parseval)
    throw ContractError("rescale_to_parseval needs a tight frame, got " + std::string(to_string(c.frame_class)));
  const double a = c.lower_bound->value;
  return frame.scaled_operators(1.0 / a);
}

bool is_gf_complete(const GPFusionFrame& frame, double rank_tolerance) {
  return numerical_rank(frame.analysis_matrix(), rank_tolerance) == frame.dim();
}

namespace {

// Columns of T belonging to the blocks in `members`.
std::vector<Eigen::Index> block_columns(const GPFusionFrame& frame, const std::vector<std::size_t>& members) {
  std::vector<Eigen::Index> offsets(frame.size() + 1, 0);
  for (std::size_t i = 0; i < frame.size(); ++i)
    offsets[i + 1] = offsets[i] + frame.triple(i).block_dim();
  std::vector<Eigen::Index> cols;
  for (auto i : members)
    for (Eigen::Index c = offsets[i]; c < offsets[i + 1]; ++c) cols.push_back(c);
  return cols;
}

struct Sandwich {
  BoundEstimate lower;
  BoundEstimate upper;
};

Sandwich synthesis_sandwich(const Matrix& t, const std::vector<Eigen::Index>& cols, double q,
                            const EstimatorOptions& options) {
  Matrix sub(t.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = t.col(cols[k]);
  const LinOp op(std::move(sub));
  Sandwich s;
  if (q == 2.0 && options.use_p2_exact) {
    s.lower = exact_p2_inf(op, options.rank_tolerance);
    s.upper = exact_p2_sup(op);
  } else {
    s.lower = inf_ratio(op, q, q, options);
    s.upper = sup_ratio(op, q, q, options);
  }
  for (auto* e : {&s.lower, &s.upper}) {
    Vector full = Vector::Zero(t.cols());
    for (std::size_t k = 0; k < cols.size(); ++k) full[cols[k]] = e->witness[static_cast<Eigen::Index>(k)];
    e->witness = std::move(full);
  }
  return s;
}

}  // namespace

RieszReport check_riesz(const GPFusionFrame& frame, const EstimatorOptions& options) {
  RieszReport r;
  const LinOp t = frame.synthesis_matrix();
  const std::size_t m = frame.size();
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (m <= 8) {
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (1u << i)) s.push_back(i);
      subsets.push_back(std::move(s));
    }
  } else {
    r.subsets_sampled = true;
    subsets.push_back(all);
    CounterRng rng(options.seed, 0x7375627365747300ULL);
    while (subsets.size() < 65) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < m; ++i)
        if (rng.next_u64() & 1ULL) s.push_back(i);
      if (!s.empty()) subsets.push_back(std::move(s));
    }
  }
  bool first = true;
  for (const auto& s : subsets) {
    auto sw = synthesis_sandwich(t.matrix(), block_columns(frame, s), frame.q(), options);
    if (first || sw.lower.value < r.lower_sandwich.value) r.lower_sandwich = std::move(sw.lower);
    if (first || sw.upper.value > r.upper_sandwich.value) r.upper_sandwich = std::move(sw.upper);
    first = false;
  }
  r.subsets_checked = subsets.size();
  r.gf_complete = is_gf_complete(frame, options.rank_tolerance);
  r.synthesis_injective = numerical_rank(t, options.rank_tolerance) == t.cols();
  r.is_riesz = r.gf_complete && r.synthesis_injective && r.lower_sandwich.value > 0.0;
  return r;
}

DualityReport verify_duality(const GPFusionFrame& frame, std::size_t samples, std::uint64_t seed) {
  DualityReport rep;
  rep.samples = samples;
  CounterRng rng(seed, 0x6475616c00000000ULL);
  const auto dims = frame.block_dims();
  for (std::size_t s = 0; s < samples; ++s) {
    Vector f(frame.dim());
    for (auto& x : f) x = rng.normal();
    Vector gflat(frame.total_block_dim());
    for (auto& x : gflat) x = rng.normal();
    const MixedSeq uf = analysis_apply(frame, f);
    const DualMixedSeq g = DualMixedSeq::from_flat(gflat, dims, frame.q());
    const double lhs = dual_pairing(uf, g);
    const double rhs = f.dot(synthesis_apply(frame, g));
    const double scale = 1.0 + mixed_norm(uf) * dual_mixed_norm(g);
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs) / scale);
  }
  return rep;
}

SurjectivityReport verify_surjectivity_characterization(const GPFusionFrame& frame,
                                                        const EstimatorOptions& options) {
  SurjectivityReport r;
  r.frame_class = classify(frame, options).frame_class;
  r.is_frame = is_frame_class(r.frame_class);
  const LinOp t = frame.synthesis_matrix();
  r.synthesis_rank = numerical_rank(t, options.rank_tolerance);
  r.synthesis_surjective = r.synthesis_rank == frame.dim();
  r.frame_equivalence_holds = r.is_frame == r.synthesis_surjective;

  const int analysis_rank = numerical_rank(frame.analysis_matrix(), options.rank_tolerance);
  r.analysis_surjective = analysis_rank == frame.total_block_dim();
  r.synthesis_injective = r.synthesis_rank == t.cols();

  // Riesz via the sandwich on the whole family.
  std::vector<std::size_t> all(frame.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto sw = synthesis_sandwich(t.matrix(), block_columns(frame, all), frame.q(), options);
  r.is_riesz = is_gf_complete(frame, options.rank_tolerance) && !sw.lower.kernel_detected &&
               sw.lower.value > 0.0;
  r.riesz_equivalence_holds =
      !r.is_frame || (r.is_riesz == r.synthesis_injective && r.is_riesz == r.analysis_surjective);
  return r;
}

BesselSynthesisReport verify_bessel_synthesis(const GPFusionFrame& frame, const EstimatorOptions& options) {
  BesselSynthesisReport r;
  const LinOp t = frame.synthesis_matrix();
  r.synthesis_norm = (frame.q() == 2.0 && options.use_p2_exact) ? exact_p2_sup(t)
                                                                 : sup_ratio(t, frame.q(), frame.q(), options);
  r.bessel_bound = estimate_bounds(frame, options).B();
  r.synthesis_bounded_by_B = r.synthesis_norm.value <= r.bessel_bound + 1e-6;

  const double tnorm = r.synthesis_norm.value;
  CounterRng rng(options.seed, 0x62657373656c0000ULL);
  for (int s = 0; s < 64; ++s) {
    Vector f(frame.dim());
    for (auto& x : f) x = rng.normal();
    const double lhs = mixed_norm(analysis_apply(frame, f));
    const double rhs = tnorm * p_norm(f, frame.p());
    if (rhs > 0.0) r.analysis_over_T = std::max(r.analysis_over_T, lhs / rhs);
    else if (lhs > 0.0) r.analysis_over_T = std::numeric_limits<double>::infinity();
  }
  r.analysis_bounded_by_T = r.analysis_over_T <= 1.0 + 1e-6;
  return r;
}

double synthesis_permutation_residual(const GPFusionFrame& frame, std::size_t permutations,
                                      std::uint64_t seed) {
  CounterRng rng(seed, 0x7065726d00000000ULL);
  const auto dims = frame.block_dims();
  double worst = 0.0;
  for (std::size_t k = 0; k < permutations; ++k) {
    Vector gflat(frame.total_block_dim());
    for (auto& x : gflat) x = rng.normal();
    const DualMixedSeq g = DualMixedSeq::from_flat(gflat, dims, frame.q());
    const Vector reference = synthesis_apply(frame, g);

    std::vector<std::size_t> order(frame.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

    Vector permuted = Vector::Zero(frame.dim());
    for (auto i : order) {
      const auto& t = frame.triple(i);
      permuted += t.weight() * (t.projection().matrix().matrix().transpose() *
                                (t.local_op().matrix().transpose() * g.block(i)));
    }
    worst = std::max(worst, (permuted - reference).norm() / (1.0 + reference.norm()));
  }
  return worst;
}

}  // namespace gpf
