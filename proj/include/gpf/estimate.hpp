#pragma once

#include "gpf/pnorm.hpp"

#include <cstdint>
#include <string_view>

namespace gpf {

enum class BoundKind { Sup, Inf };

enum class EstimateMethod { ExactP2, GradientRestarts, GridOracle };

std::string_view to_string(BoundKind kind) noexcept;
std::string_view to_string(EstimateMethod method) noexcept;

/// Estimated sup or inf of a norm ratio ||Phi(f)|| / ||f|| over f != 0.
///
/// The witness is a unit vector of the domain norm and the ratio evaluated at
/// it equals `value`, so a Sup estimate never exceeds the true supremum and an
/// Inf estimate never falls below the true infimum.
struct BoundEstimate {
  double value = 0.0;
  Vector witness;
  BoundKind kind = BoundKind::Sup;
  EstimateMethod method = EstimateMethod::GradientRestarts;
  /// True only for ExactP2 and for GridOracle at resolution <= 0.01 rad.
  bool certified = false;

  int restarts = 0;
  std::uint64_t seed = 0;
  /// Index of the restart whose witness won (ties: lowest index).
  int best_restart = -1;
  /// Iterations spent by the winning restart.
  int iterations = 0;
  /// False if the winning restart hit the iteration cap.
  bool converged = true;
  /// Inf estimates: the map has a nontrivial kernel and the witness spans it.
  bool kernel_detected = false;
  /// GridOracle: largest jump of the ratio between adjacent grid points.
  double slack = 0.0;
};

/// Knobs shared by every estimator entry point.
struct EstimatorOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_iterations = 10000;
  /// Stop when the objective improves by less than this (relative) over
  /// `stall_window` iterations.
  double stall_tolerance = 1e-12;
  int stall_window = 5;
  double armijo = 1e-4;
  /// For p = 2 problems also compute (and prefer) the SVD values.
  bool use_p2_exact = true;
  /// Relative singular-value threshold for rank and kernel decisions.
  double rank_tolerance = 1e-10;
};

}  // namespace gpf
