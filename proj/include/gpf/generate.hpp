#pragma once

#include "gpf/frame_spec.hpp"
#include "gpf/gframe.hpp"
#include "gpf/rng.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gpf {

enum class GenClass { Any, Frame, Tight, Parseval, Deficient };

std::string_view to_string(GenClass c) noexcept;
/// Accepts "any", "frame", "tight", "parseval", "deficient".
GenClass parse_gen_class(std::string_view name);

struct GenRequest {
  int dim = 2;
  std::vector<int> block_dims{1, 1};
  double p = 2.0;
  std::uint64_t seed = 0;
  GenClass target = GenClass::Frame;
};

/// Seeded random family. Same request, same frame, bit for bit.
///
///   any        Gaussian local operators and projection bases, no guarantees.
///   frame      stacked rank n (retried until it holds).
///   tight      A = B; orthonormal stacking at p = 2, scaled coordinate
///              selectors otherwise.
///   parseval   as tight with A = B = 1.
///   deficient  every projection range avoids a common direction k, so the
///              stacked map has k in its kernel.
///
/// Throws ContractError("rank deficit ...") when the block dimensions cannot
/// reach rank n for frame, tight and parseval targets.
GPFusionFrame generate_frame(const GenRequest& request);

/// Metadata block recording the request and the generator algorithm.
Json generation_metadata(const GenRequest& request);

/// Random n x n operator Q1 diag(s) Q2 with singular values s in [lo, hi].
LinOp random_invertible(int n, CounterRng& rng, double lo = 0.5, double hi = 2.0);

/// Matrix of i.i.d. standard normals.
Matrix gaussian_matrix(int rows, int cols, CounterRng& rng);

/// Random orthonormal columns (rows >= cols).
Matrix random_orthonormal(int rows, int cols, CounterRng& rng);

}  // namespace gpf
