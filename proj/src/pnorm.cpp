#include "gpf/pnorm.hpp"

#include "gpf/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gpf {

namespace {

void require_finite(const Eigen::Ref<const Vector>& v) {
  if (!v.allFinite()) throw DomainError("vector has non-finite entries");
}

void require_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw DomainError("exponent must satisfy 1 < p < inf, got " + std::to_string(p));
}

}  // namespace

double p_norm(const Eigen::Ref<const Vector>& v, double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw DomainError("p-norm exponent must lie in [1, inf), got " + std::to_string(p));
  require_finite(v);
  if (v.size() == 0) return 0.0;
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (p == 1.0) return v.cwiseAbs().sum();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) acc += std::pow(std::abs(v[k]) / scale, p);
  return scale * std::pow(acc, 1.0 / p);
}

double dual_exponent(double p) {
  require_exponent(p);
  return p / (p - 1.0);
}

Vector duality_map(const Eigen::Ref<const Vector>& v, double p) {
  require_exponent(p);
  const double norm = p_norm(v, p);
  Vector g = Vector::Zero(v.size());
  if (norm == 0.0) return g;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double r = std::abs(v[k]) / norm;
    g[k] = std::copysign(std::pow(r, p - 1.0), v[k]);
    if (v[k] == 0.0) g[k] = 0.0;
  }
  return g;
}

PNormSpace::PNormSpace(int dim, double p) : dim_(dim), p_(p), q_(0.0) {
  if (dim < 1) throw DimensionError("space dimension must be >= 1");
  q_ = dual_exponent(p);
}

double PNormSpace::norm(const Eigen::Ref<const Vector>& f) const {
  if (f.size() != dim_) throw DimensionError("vector length does not match space dimension");
  return p_norm(f, p_);
}

double PNormSpace::dual_norm(const Eigen::Ref<const Vector>& g) const {
  if (g.size() != dim_) throw DimensionError("functional length does not match space dimension");
  return p_norm(g, q_);
}

namespace detail {

BlockSequence::BlockSequence(std::vector<Vector> blocks, double exponent)
    : blocks_(std::move(blocks)), exponent_(exponent) {
  require_exponent(exponent);
  for (const auto& b : blocks_) require_finite(b);
}

std::vector<int> BlockSequence::block_dims() const {
  std::vector<int> dims;
  dims.reserve(blocks_.size());
  for (const auto& b : blocks_) dims.push_back(static_cast<int>(b.size()));
  return dims;
}

int BlockSequence::total_dim() const {
  int total = 0;
  for (const auto& b : blocks_) total += static_cast<int>(b.size());
  return total;
}

Vector BlockSequence::flatten() const {
  Vector flat(total_dim());
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    flat.segment(offset, b.size()) = b;
    offset += b.size();
  }
  return flat;
}

std::vector<Vector> split_blocks(const Eigen::Ref<const Vector>& flat,
                                 const std::vector<int>& dims) {
  const int total = std::accumulate(dims.begin(), dims.end(), 0);
  if (total != flat.size())
    throw DimensionError("flat length " + std::to_string(flat.size()) +
                         " does not match block dimensions total " + std::to_string(total));
  std::vector<Vector> blocks;
  blocks.reserve(dims.size());
  Eigen::Index offset = 0;
  for (int d : dims) {
    blocks.emplace_back(flat.segment(offset, d));
    offset += d;
  }
  return blocks;
}

}  // namespace detail

MixedSeq::MixedSeq(std::vector<Vector> blocks, double p)
    : BlockSequence(std::move(blocks), p) {}

MixedSeq MixedSeq::from_flat(const Eigen::Ref<const Vector>& flat,
                             const std::vector<int>& dims, double p) {
  return MixedSeq(detail::split_blocks(flat, dims), p);
}

DualMixedSeq::DualMixedSeq(std::vector<Vector> blocks, double q)
    : BlockSequence(std::move(blocks), q) {}

DualMixedSeq DualMixedSeq::from_flat(const Eigen::Ref<const Vector>& flat,
                                     const std::vector<int>& dims, double q) {
  return DualMixedSeq(detail::split_blocks(flat, dims), q);
}

namespace {

double outer_norm(const detail::BlockSequence& s) {
  Vector block_norms(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    block_norms[static_cast<Eigen::Index>(i)] = p_norm(s.block(i), s.exponent());
  return p_norm(block_norms, s.exponent());
}

}  // namespace

double mixed_norm(const MixedSeq& s) { return outer_norm(s); }

double dual_mixed_norm(const DualMixedSeq& g) { return outer_norm(g); }

double dual_pairing(const MixedSeq& s, const DualMixedSeq& g) {
  if (s.block_dims() != g.block_dims())
    throw DimensionError("dual pairing: block shapes differ");
  const double conj = 1.0 / s.p() + 1.0 / g.q();
  if (std::abs(conj - 1.0) > 1e-12)
    throw DomainError("dual pairing: exponents are not conjugate");
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += s.block(i).dot(g.block(i));
  return total;
}

DualMixedSeq duality_map(const MixedSeq& s) {
  // With matching inner and outer exponents the mixed norm is the p-norm of
  // the concatenation, so the norming functional is the flat duality map.
  const Vector g = duality_map(s.flatten(), s.p());
  return DualMixedSeq::from_flat(g, s.block_dims(), dual_exponent(s.p()));
}

}  // namespace gpf
