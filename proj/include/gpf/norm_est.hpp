#pragma once

#include "gpf/estimate.hpp"
#include "gpf/linop.hpp"
#include "gpf/pnorm.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gpf {

/// Linear map f -> {Phi_i(f)} from (R^dim, ||.||_p) into a mixed sequence space.
using BlockMap = std::function<MixedSeq(const Vector&)>;

/// Positively 1-homogeneous objective phi(x). When `gradient` is non-null it
/// receives a (sub)gradient at x.
using HomogeneousObjective = std::function<double(const Vector& x, Vector* gradient)>;

/// Builds the matrix of `map` from its action on the coordinate basis and
/// spot-checks additivity/homogeneity on seeded random pairs (residual <= 1e-9,
/// relative). Throws ContractError if the map is not linear or changes shape.
/// `codomain_p` receives the exponent carried by the map's output.
LinOp materialize(const BlockMap& map, int dim, std::uint64_t seed, double* codomain_p = nullptr);

/// Estimate sup_f ||map(f)|| / ||f||_p by multi-restart projected gradient
/// ascent on the unit p-sphere. Deterministic for fixed seed and restart count.
BoundEstimate sup_ratio(const BlockMap& map, int dim, double p, const EstimatorOptions& options);
/// Estimate inf_f ||map(f)|| / ||f||_p. A nontrivial kernel (rank test) is
/// reported directly with a kernel witness.
BoundEstimate inf_ratio(const BlockMap& map, int dim, double p, const EstimatorOptions& options);

/// Matrix forms: ratio ||M x||_{codomain_p} / ||x||_{domain_p}.
BoundEstimate sup_ratio(const LinOp& m, double domain_p, double codomain_p,
                        const EstimatorOptions& options);
BoundEstimate inf_ratio(const LinOp& m, double domain_p, double codomain_p,
                        const EstimatorOptions& options);

/// Maximize phi(x) / ||x||_p over x != 0. The returned witness is p-unit and
/// `value` is phi at the witness.
BoundEstimate maximize_on_sphere(const HomogeneousObjective& phi, int dim, double p,
                                 const EstimatorOptions& options);

struct ExactBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// (sigma_min, sigma_max) of a stacked matrix; sigma_min is 0 when rows < cols.
ExactBounds p2_exact_bounds(const LinOp& stacked);

/// Certified p = 2 estimates with singular-vector witnesses.
BoundEstimate exact_p2_sup(const LinOp& m);
BoundEstimate exact_p2_inf(const LinOp& m, double rank_tolerance = 1e-10);

struct GridBounds {
  BoundEstimate lower;
  BoundEstimate upper;
  double resolution = 0.0;
  std::size_t points = 0;
  bool certified = false;
};

/// Exhaustive angular sweep of the unit p-sphere in dimension 1, 2 or 3.
/// Each grid direction is p-renormalized before the ratio is evaluated.
/// Throws UnsupportedError for dim > 3.
GridBounds grid_oracle(const BlockMap& map, int dim, double p, double resolution);
GridBounds grid_oracle(const LinOp& m, double domain_p, double codomain_p, double resolution);

}  // namespace gpf
