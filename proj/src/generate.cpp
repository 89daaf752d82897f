#include "gpf/generate.hpp"

#include "gpf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gpf {

std::string_view to_string(GenClass c) noexcept {
  switch (c) {
    case GenClass::Any:
      return "any";
    case GenClass::Frame:
      return "frame";
    case GenClass::Tight:
      return "tight";
    case GenClass::Parseval:
      return "parseval";
    case GenClass::Deficient:
      return "deficient";
  }
  return "unknown";
}

GenClass parse_gen_class(std::string_view name) {
  for (auto c : {GenClass::Any, GenClass::Frame, GenClass::Tight, GenClass::Parseval, GenClass::Deficient})
    if (to_string(c) == name) return c;
  throw ContractError("unknown generator class '" + std::string(name) +
                      "' (expected any, frame, tight, parseval or deficient)");
}

Matrix gaussian_matrix(int rows, int cols, CounterRng& rng) {
  Matrix m(rows, cols);
  // Row-major draw order so the stream layout does not depend on Eigen storage.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

Matrix random_orthonormal(int rows, int cols, CounterRng& rng) {
  if (rows < cols) throw DimensionError("random_orthonormal needs rows >= cols");
  const Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix column signs against R's diagonal so Q does not depend on the QR sign convention.
  const Matrix r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  for (int k = 0; k < cols; ++k)
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  return q;
}

LinOp random_invertible(int n, CounterRng& rng, double lo, double hi) {
  const Matrix q1 = random_orthonormal(n, n, rng);
  const Matrix q2 = random_orthonormal(n, n, rng);
  Vector s(n);
  for (auto& x : s) x = rng.uniform(lo, hi);
  return LinOp(q1 * s.asDiagonal() * q2.transpose());
}

namespace {

void validate(const GenRequest& req) {
  if (req.dim < 1) throw ContractError("dim must be >= 1");
  if (req.block_dims.empty()) throw ContractError("need at least one block");
  for (int d : req.block_dims)
    if (d < 1) throw ContractError("block dimensions must be >= 1");
  if (!(req.p > 1.0) || !std::isfinite(req.p)) throw DomainError("p must satisfy 1 < p < inf");
}

int total(const std::vector<int>& dims) { return std::accumulate(dims.begin(), dims.end(), 0); }

std::vector<double> draw_weights(std::size_t m, CounterRng& rng) {
  std::vector<double> w(m);
  for (auto& x : w) x = rng.uniform(0.5, 2.0);
  return w;
}

std::vector<Vector> columns(const Matrix& m) {
  std::vector<Vector> out;
  for (Eigen::Index k = 0; k < m.cols(); ++k) out.emplace_back(m.col(k));
  return out;
}

// Orthogonal projection onto span(rows of `required`) plus random extra
// directions, `rank` in total. P = I when rank reaches n.
SubspaceProjection containing_projection(const Matrix& required_rows, int rank, CounterRng& rng) {
  const int n = static_cast<int>(required_rows.cols());
  if (rank >= n) return SubspaceProjection::identity(n);
  Matrix basis(n, rank);
  const int r = static_cast<int>(required_rows.rows());
  basis.leftCols(r) = required_rows.transpose();
  if (rank > r) basis.rightCols(rank - r) = gaussian_matrix(n, rank - r, rng);
  return SubspaceProjection::from_basis(columns(basis));
}

int rank_between(int lo, int hi, CounterRng& rng) { return lo >= hi ? hi : rng.uniform_int(lo, hi); }

// Range of dimension `rank` from Gaussian draws; one time in four the
// projection is oblique along a random complement.
SubspaceProjection random_projection(int n, int rank, CounterRng& rng, bool allow_oblique) {
  if (rank >= n) return SubspaceProjection::identity(n);
  const Matrix range = gaussian_matrix(n, rank, rng);
  if (allow_oblique && rng.uniform() < 0.25) {
    const Matrix kernel = gaussian_matrix(n, n - rank, rng);
    return SubspaceProjection::along(columns(range), columns(kernel));
  }
  return SubspaceProjection::from_basis(columns(range));
}

GPFusionFrame orthonormal_stacking(const GenRequest& req, double scale, CounterRng& rng) {
  const int n = req.dim;
  const Matrix q = random_orthonormal(total(req.block_dims), n, rng);
  const auto weights = draw_weights(req.block_dims.size(), rng);
  std::vector<WeightedTriple> triples;
  int offset = 0;
  for (std::size_t i = 0; i < req.block_dims.size(); ++i) {
    const int d = req.block_dims[i];
    const Matrix qi = q.middleRows(offset, d);
    offset += d;
    SubspaceProjection proj = d >= n ? SubspaceProjection::identity(n)
                                     : containing_projection(qi, rank_between(d, n, rng), rng);
    triples.emplace_back(std::move(proj), LinOp(qi * (scale / weights[i])), weights[i]);
  }
  return GPFusionFrame(PNormSpace(n, req.p), std::move(triples));
}

// Rows +-(K / c_j)^{1/p} e_j with every coordinate j used c_j >= 1 times, so
// the sum of |row . x|^p is K ||x||_p^p.
GPFusionFrame coordinate_selectors(const GenRequest& req, double K, CounterRng& rng) {
  const int n = req.dim;
  const int rows = total(req.block_dims);
  std::vector<int> coord(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) coord[static_cast<std::size_t>(r)] = r < n ? r : rng.uniform_int(0, n - 1);
  for (int r = rows - 1; r > 0; --r) std::swap(coord[static_cast<std::size_t>(r)], coord[static_cast<std::size_t>(rng.uniform_int(0, r))]);
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  for (int c : coord) ++count[static_cast<std::size_t>(c)];

  const auto weights = draw_weights(req.block_dims.size(), rng);
  std::vector<WeightedTriple> triples;
  int offset = 0;
  for (std::size_t i = 0; i < req.block_dims.size(); ++i) {
    const int d = req.block_dims[i];
    Matrix lambda = Matrix::Zero(d, n);
    std::vector<int> used;
    for (int k = 0; k < d; ++k) {
      const int j = coord[static_cast<std::size_t>(offset + k)];
      const double sign = (rng.next_u64() & 1ULL) ? -1.0 : 1.0;
      lambda(k, j) = sign * std::pow(K / count[static_cast<std::size_t>(j)], 1.0 / req.p) / weights[i];
      if (std::find(used.begin(), used.end(), j) == used.end()) used.push_back(j);
    }
    offset += d;
    std::sort(used.begin(), used.end());
    Matrix selected = Matrix::Zero(static_cast<Eigen::Index>(used.size()), n);
    for (std::size_t k = 0; k < used.size(); ++k) selected(static_cast<Eigen::Index>(k), used[k]) = 1.0;
    SubspaceProjection proj =
        containing_projection(selected, rank_between(static_cast<int>(used.size()), n, rng), rng);
    triples.emplace_back(std::move(proj), LinOp(std::move(lambda)), weights[i]);
  }
  return GPFusionFrame(PNormSpace(n, req.p), std::move(triples));
}

GPFusionFrame gaussian_family(const GenRequest& req, CounterRng& rng, bool full_rank_projections) {
  const int n = req.dim;
  const auto weights = draw_weights(req.block_dims.size(), rng);
  std::vector<WeightedTriple> triples;
  for (std::size_t i = 0; i < req.block_dims.size(); ++i) {
    const int d = req.block_dims[i];
    const int rank = full_rank_projections ? rank_between(std::min(d, n), n, rng) : rank_between(1, n, rng);
    SubspaceProjection proj = random_projection(n, rank, rng, true);
    triples.emplace_back(std::move(proj), LinOp(gaussian_matrix(d, n, rng)), weights[i]);
  }
  return GPFusionFrame(PNormSpace(n, req.p), std::move(triples));
}

GPFusionFrame deficient_family(const GenRequest& req, CounterRng& rng) {
  const int n = req.dim;
  const auto weights = draw_weights(req.block_dims.size(), rng);
  std::vector<WeightedTriple> triples;
  if (n == 1) {
    for (std::size_t i = 0; i < req.block_dims.size(); ++i)
      triples.emplace_back(SubspaceProjection::identity(1), LinOp::zero(req.block_dims[i], 1), weights[i]);
    return GPFusionFrame(PNormSpace(n, req.p), std::move(triples));
  }
  Vector k = gaussian_matrix(n, 1, rng).col(0);
  k.normalize();
  const Matrix away = Matrix::Identity(n, n) - k * k.transpose();
  for (std::size_t i = 0; i < req.block_dims.size(); ++i) {
    const int rank = rank_between(1, n - 1, rng);
    const Matrix basis = away * gaussian_matrix(n, rank, rng);
    triples.emplace_back(SubspaceProjection::from_basis(columns(basis)),
                         LinOp(gaussian_matrix(req.block_dims[i], n, rng)), weights[i]);
  }
  return GPFusionFrame(PNormSpace(n, req.p), std::move(triples));
}

void require_reachable_rank(const GenRequest& req, int reachable) {
  if (reachable < req.dim)
    throw ContractError("rank deficit: block dimensions reach rank at most " + std::to_string(reachable) +
                        " < dim " + std::to_string(req.dim));
}

}  // namespace

GPFusionFrame generate_frame(const GenRequest& req) {
  validate(req);
  const int n = req.dim;
  switch (req.target) {
    case GenClass::Any: {
      CounterRng rng(req.seed, 0);
      return gaussian_family(req, rng, false);
    }
    case GenClass::Deficient: {
      CounterRng rng(req.seed, 0);
      return deficient_family(req, rng);
    }
    case GenClass::Tight:
    case GenClass::Parseval: {
      require_reachable_rank(req, total(req.block_dims));
      CounterRng rng(req.seed, 0);
      const bool parseval = req.target == GenClass::Parseval;
      if (req.p == 2.0) {
        const double scale = parseval ? 1.0 : rng.uniform(0.5, 3.0);
        return orthonormal_stacking(req, scale, rng);
      }
      const double K = parseval ? 1.0 : rng.uniform(0.5, 4.0);
      return coordinate_selectors(req, K, rng);
    }
    case GenClass::Frame: {
      int reachable = 0;
      for (int d : req.block_dims) reachable += std::min(d, n);
      require_reachable_rank(req, reachable);
      for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
        CounterRng rng(req.seed, attempt);
        GPFusionFrame f = gaussian_family(req, rng, true);
        if (is_gf_complete(f, 1e-8)) return f;
      }
      throw ContractError("rank deficit: no full-rank draw in 64 attempts");
    }
  }
  throw ContractError("unknown generator class");
}

Json generation_metadata(const GenRequest& req) {
  Json blocks = Json::array();
  for (int d : req.block_dims) blocks.push_back(d);
  Json g;
  g["algorithm"] = kRngAlgorithm;
  g["seed"] = req.seed;
  g["class"] = to_string(req.target);
  g["dim"] = req.dim;
  g["block_dims"] = std::move(blocks);
  g["p"] = req.p;
  Json meta;
  meta["generator"] = std::move(g);
  return meta;
}

}  // namespace gpf
