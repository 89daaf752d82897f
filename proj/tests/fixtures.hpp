#pragma once

#include "gpf/gframe.hpp"

#include <vector>

namespace fixture {

using namespace gpf;

inline WeightedTriple triple(const Matrix& lambda, double weight = 1.0) {
  return WeightedTriple(SubspaceProjection::identity(static_cast<int>(lambda.cols())), LinOp(lambda), weight);
}

inline GPFusionFrame frame_of(double p, std::vector<WeightedTriple> ts) {
  const int n = ts.front().ambient_dim();
  return GPFusionFrame(PNormSpace(n, p), std::move(ts));
}

/// One triple (I, c I, 1).
inline GPFusionFrame scaled_identity(int n, double p, double c = 1.0) {
  return frame_of(p, {triple(c * Matrix::Identity(n, n))});
}

/// (I, diag(e_1), 1), (I, diag(e_2), 1) on R^2.
inline GPFusionFrame coordinate_frame(double p) {
  Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
  d1(0, 0) = 1.0;
  d2(1, 1) = 1.0;
  return frame_of(p, {triple(d1), triple(d2)});
}

/// (I, e_1^T, 1), (I, e_2^T, 1) on R^2: stacked synthesis matrix is the identity.
inline GPFusionFrame coordinate_selectors(double p) {
  return frame_of(p, {triple(Matrix{{1.0, 0.0}}), triple(Matrix{{0.0, 1.0}})});
}

/// Same analysis map as `f`, with the weights of `like` (direct sums pair weights by index).
inline GPFusionFrame with_weights(const GPFusionFrame& f, const GPFusionFrame& like) {
  std::vector<WeightedTriple> ts;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& t = f.triple(i);
    const double w = like.triple(i).weight();
    ts.emplace_back(t.projection(), LinOp(t.local_op().matrix() * (t.weight() / w)), w);
  }
  return GPFusionFrame(f.space(), std::move(ts));
}

}  // namespace fixture
