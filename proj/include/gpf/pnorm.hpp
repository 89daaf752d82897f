#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace gpf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// (sum |v_k|^p)^(1/p) for p in [1, inf). Entries are rescaled by max |v_k|
/// before powering so large or tiny vectors do not overflow.
/// Throws DomainError on non-finite entries or p outside [1, inf).
double p_norm(const Eigen::Ref<const Vector>& v, double p);

/// The conjugate exponent q with 1/p + 1/q = 1. Requires 1 < p < inf.
double dual_exponent(double p);

/// Unit-dual-norm functional attaining the p-norm of `v`:
/// g_k = sign(v_k) |v_k|^(p-1) / ||v||_p^(p-1), so ||g||_q = 1 and <v, g> = ||v||_p.
/// The zero vector maps to zero.
Vector duality_map(const Eigen::Ref<const Vector>& v, double p);

/// Finite-dimensional coordinate space (R^dim, ||.||_p), 1 < p < inf.
class PNormSpace {
 public:
  PNormSpace(int dim, double p);

  int dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  double norm(const Eigen::Ref<const Vector>& f) const;
  /// Norm of a functional in X*, given by its coefficient vector.
  double dual_norm(const Eigen::Ref<const Vector>& g) const;

  friend bool operator==(const PNormSpace&, const PNormSpace&) = default;

 private:
  int dim_;
  double p_;
  double q_;
};

namespace detail {

class BlockSequence {
 public:
  BlockSequence() = default;
  BlockSequence(std::vector<Vector> blocks, double exponent);

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }
  const Vector& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<Vector>& blocks() const noexcept { return blocks_; }
  std::vector<int> block_dims() const;
  int total_dim() const;
  /// Concatenation of all blocks.
  Vector flatten() const;
  double exponent() const noexcept { return exponent_; }

 protected:
  std::vector<Vector> blocks_;
  double exponent_ = 2.0;
};

std::vector<Vector> split_blocks(const Eigen::Ref<const Vector>& flat,
                                 const std::vector<int>& dims);

}  // namespace detail

/// Element {f_i} of l^p({X_i}) with X_i = (R^{d_i}, ||.||_p).
class MixedSeq : public detail::BlockSequence {
 public:
  MixedSeq() = default;
  MixedSeq(std::vector<Vector> blocks, double p);
  static MixedSeq from_flat(const Eigen::Ref<const Vector>& flat,
                            const std::vector<int>& dims, double p);
  double p() const noexcept { return exponent_; }
};

/// Element {g_i} of l^q({X_i*}); blocks are coefficient vectors of functionals.
class DualMixedSeq : public detail::BlockSequence {
 public:
  DualMixedSeq() = default;
  DualMixedSeq(std::vector<Vector> blocks, double q);
  static DualMixedSeq from_flat(const Eigen::Ref<const Vector>& flat,
                                const std::vector<int>& dims, double q);
  double q() const noexcept { return exponent_; }
};

/// (sum_i ||f_i||_p^p)^(1/p); zero for the empty sequence.
double mixed_norm(const MixedSeq& s);
/// (sum_i ||g_i||_q^q)^(1/q).
double dual_mixed_norm(const DualMixedSeq& g);

/// sum_i <f_i, g_i>. Requires matching block shapes and conjugate exponents.
double dual_pairing(const MixedSeq& s, const DualMixedSeq& g);

/// The norming functional of `s`: dual mixed norm 1 and pairing = mixed_norm(s).
DualMixedSeq duality_map(const MixedSeq& s);

}  // namespace gpf
