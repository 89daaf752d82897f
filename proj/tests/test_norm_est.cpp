#include "gpf/errors.hpp"
#include "gpf/norm_est.hpp"
#include "gpf/rng.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gpf;

namespace {

BlockMap matrix_map(const Matrix& m, double p) {
  return [m, p](const Vector& f) { return MixedSeq({m * f}, p); };
}

EstimatorOptions opts(std::uint64_t seed = 1, int restarts = 20) {
  EstimatorOptions o;
  o.seed = seed;
  o.restarts = restarts;
  return o;
}

}  // namespace

TEST(SupRatio, Examples) {
  EXPECT_NEAR(sup_ratio(matrix_map(Matrix::Identity(2, 2), 2.0), 2, 2.0, opts()).value, 1.0, 1e-12);
  EXPECT_NEAR(sup_ratio(matrix_map(Vector{{3.0, 1.0}}.asDiagonal(), 2.0), 2, 2.0, opts()).value, 3.0, 1e-9);
  const BlockMap twice = [](const Vector& f) { return MixedSeq({f, f}, 2.0); };
  EXPECT_NEAR(sup_ratio(twice, 2, 2.0, opts()).value, std::sqrt(2.0), 1e-12);
}

TEST(InfRatio, Examples) {
  EXPECT_NEAR(inf_ratio(matrix_map(Matrix::Identity(3, 3), 2.0), 3, 2.0, opts()).value, 1.0, 1e-12);
  EXPECT_NEAR(inf_ratio(matrix_map(Vector{{3.0, 1.0}}.asDiagonal(), 2.0), 2, 2.0, opts()).value, 1.0, 1e-9);
  Matrix deficient(2, 2);
  deficient << 1, 0, 1, 0;
  const auto k = inf_ratio(matrix_map(deficient, 2.0), 2, 2.0, opts());
  EXPECT_NEAR(k.value, 0.0, 1e-15);
  EXPECT_TRUE(k.kernel_detected);
  EXPECT_NEAR(std::abs(k.witness[1]), 1.0, 1e-12);
}

TEST(Materialize, RejectsNonlinearMaps) {
  const BlockMap squared = [](const Vector& f) { return MixedSeq({f.cwiseProduct(f)}, 2.0); };
  EXPECT_THROW(sup_ratio(squared, 2, 2.0, opts()), ContractError);
  const BlockMap shifted = [](const Vector& f) { return MixedSeq({f + Vector::Ones(f.size())}, 2.0); };
  EXPECT_THROW(inf_ratio(shifted, 2, 2.0, opts()), ContractError);
  const BlockMap abs_map = [](const Vector& f) { return MixedSeq({f.cwiseAbs()}, 2.0); };
  EXPECT_THROW(materialize(abs_map, 2, 5), ContractError);
}

TEST(Estimate, WitnessContract) {
  std::mt19937_64 g(12);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix m = oracle::random_matrix(4, 3, g);
      for (const auto& e : {sup_ratio(LinOp(m), p, p, opts(trial)), inf_ratio(LinOp(m), p, p, opts(trial))}) {
        EXPECT_NEAR(oracle::pnorm(e.witness, p), 1.0, 1e-9);
        EXPECT_NEAR(oracle::pnorm(m * e.witness, p), e.value, 1e-9 * (1.0 + e.value));
        EXPECT_EQ(e.method, EstimateMethod::GradientRestarts);
        EXPECT_FALSE(e.certified);
      }
    }
  }
}

TEST(Estimate, OneSidedAgainstSweep) {
  // A Sup estimate never exceeds the true sup, an Inf estimate never undercuts the true inf.
  std::mt19937_64 g(13);
  for (double p : {1.5, 3.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix m = oracle::random_matrix(3, 2, g);
      const auto s = oracle::sweep2(m, p, p);
      const double sup = sup_ratio(LinOp(m), p, p, opts(trial)).value;
      const double inf = inf_ratio(LinOp(m), p, p, opts(trial)).value;
      EXPECT_LE(sup, s.hi * (1 + 1e-9) + 1e-9);
      EXPECT_GE(inf, s.lo * (1 - 1e-9) - 1e-9);
      EXPECT_NEAR(sup, s.hi, 1e-6 * s.hi);
      EXPECT_NEAR(inf, s.lo, 1e-6 * s.hi);
    }
  }
}

TEST(Estimate, P2AgreesWithEigenOracle) {
  std::mt19937_64 g(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_matrix(5, 3, g);
    EXPECT_NEAR(sup_ratio(LinOp(m), 2, 2, opts(trial)).value, oracle::sigma_max(m), 1e-6 * oracle::sigma_max(m));
    EXPECT_NEAR(inf_ratio(LinOp(m), 2, 2, opts(trial)).value, oracle::sigma_min(m), 1e-6 * oracle::sigma_max(m));
  }
}

TEST(Estimate, DeterministicForFixedSeed) {
  std::mt19937_64 g(15);
  const Matrix m = oracle::random_matrix(4, 4, g);
  const auto a = sup_ratio(LinOp(m), 1.7, 1.7, opts(99, 12));
  const auto b = sup_ratio(LinOp(m), 1.7, 1.7, opts(99, 12));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness, b.witness);
  EXPECT_EQ(a.best_restart, b.best_restart);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Estimate, TieGoesToLowestRestart) {
  // Every unit vector attains the ratio of a multiple of the identity.
  const auto e = sup_ratio(LinOp(2.0 * Matrix::Identity(3, 3)), 2.5, 2.5, opts(4, 8));
  EXPECT_EQ(e.best_restart, 0);
  EXPECT_NEAR(e.value, 2.0, 1e-14);
}

TEST(Estimate, HomogeneityInScale) {
  std::mt19937_64 g(16);
  for (double p : {1.5, 2.5}) {
    const Matrix m = oracle::random_matrix(3, 3, g);
    for (double c : {0.5, 3.0}) {
      const auto s1 = sup_ratio(LinOp(m), p, p, opts(3));
      const auto s2 = sup_ratio(LinOp(c * m), p, p, opts(3));
      EXPECT_NEAR(s2.value, c * s1.value, 1e-7 * c * s1.value);
      const auto i1 = inf_ratio(LinOp(m), p, p, opts(3));
      const auto i2 = inf_ratio(LinOp(c * m), p, p, opts(3));
      EXPECT_NEAR(i2.value, c * i1.value, 1e-7 * c * s1.value);
    }
  }
}

TEST(Estimate, AddingABlockNeverDecreasesBounds) {
  std::mt19937_64 g(18);
  for (double p : {1.5, 2.0, 3.0}) {
    const Matrix m = oracle::random_matrix(3, 3, g);
    const Matrix extra = oracle::random_matrix(2, 3, g);
    Matrix both(5, 3);
    both << m, extra;
    EXPECT_GE(sup_ratio(LinOp(both), p, p, opts(2)).value, sup_ratio(LinOp(m), p, p, opts(2)).value - 1e-9);
    EXPECT_GE(inf_ratio(LinOp(both), p, p, opts(2)).value, inf_ratio(LinOp(m), p, p, opts(2)).value - 1e-6);
  }
}

TEST(Estimate, RestartValidation) {
  EstimatorOptions o;
  o.restarts = 0;
  EXPECT_THROW(sup_ratio(LinOp::identity(2), 2, 2, o), ContractError);
  EXPECT_THROW(sup_ratio(LinOp::identity(2), 1.0, 2, opts()), DomainError);
}

TEST(P2Exact, Examples) {
  const auto id = p2_exact_bounds(LinOp::identity(3));
  EXPECT_DOUBLE_EQ(id.lower, 1.0);
  EXPECT_DOUBLE_EQ(id.upper, 1.0);
  Matrix stack(4, 2);
  stack << 1, 0, 0, 0, 0, 0, 0, 1;
  const auto s = p2_exact_bounds(LinOp(stack));
  EXPECT_NEAR(s.lower, 1.0, 1e-15);
  EXPECT_NEAR(s.upper, 1.0, 1e-15);
  const auto two = p2_exact_bounds(LinOp(2.0 * Matrix::Identity(2, 2)));
  EXPECT_NEAR(two.lower, 2.0, 1e-15);
  EXPECT_NEAR(two.upper, 2.0, 1e-15);
  EXPECT_EQ(p2_exact_bounds(LinOp{{1, 2, 3}}).lower, 0.0);
}

TEST(P2Exact, CertifiedWithWitnesses) {
  std::mt19937_64 g(19);
  const Matrix m = oracle::random_matrix(4, 3, g);
  const auto hi = exact_p2_sup(LinOp(m));
  const auto lo = exact_p2_inf(LinOp(m));
  EXPECT_TRUE(hi.certified);
  EXPECT_EQ(hi.method, EstimateMethod::ExactP2);
  EXPECT_NEAR(hi.value, oracle::sigma_max(m), 1e-10);
  EXPECT_NEAR(lo.value, oracle::sigma_min(m), 1e-10);
  EXPECT_NEAR(hi.witness.norm(), 1.0, 1e-12);
}

TEST(GridOracle, Examples) {
  const auto id = grid_oracle(LinOp::identity(2), 3.0, 3.0, 1e-3);
  EXPECT_NEAR(id.lower.value, 1.0, 1e-6);
  EXPECT_NEAR(id.upper.value, 1.0, 1e-6);
  EXPECT_TRUE(id.upper.certified);
  const auto d = grid_oracle(LinOp{{2, 0}, {0, 1}}, 2.0, 2.0, 1e-3);
  EXPECT_NEAR(d.lower.value, 1.0, 1e-3);
  EXPECT_NEAR(d.upper.value, 2.0, 1e-3);
  // f -> f1 + f2 at p = 1.5: maximum 2^(1/3) at f1 = f2 by Hoelder with q = 3.
  const BlockMap sum = [](const Vector& f) { return MixedSeq({Vector{{f[0] + f[1]}}}, 1.5); };
  const auto s = grid_oracle(sum, 2, 1.5, 1e-3);
  EXPECT_NEAR(s.upper.value, std::cbrt(2.0), 1e-6);
  EXPECT_NEAR(std::abs(s.upper.witness[0]), std::abs(s.upper.witness[1]), 1e-3);
}

TEST(GridOracle, DimensionLimits) {
  EXPECT_THROW(grid_oracle(LinOp::identity(4), 2.0, 2.0, 0.1), UnsupportedError);
  const auto one = grid_oracle(LinOp{{-3}}, 2.0, 2.0, 0.1);
  EXPECT_DOUBLE_EQ(one.upper.value, 3.0);
  const auto three = grid_oracle(LinOp{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}, 2.0, 2.0, 0.01);
  EXPECT_NEAR(three.upper.value, 3.0, 1e-3);
  EXPECT_NEAR(three.lower.value, 1.0, 1e-3);
  EXPECT_FALSE(grid_oracle(LinOp::identity(2), 2.0, 2.0, 0.1).upper.certified);
}

TEST(MaximizeOnSphere, NegativeObjectives) {
  // phi(x) = -||x||_p has maximum -1 on the unit sphere.
  const HomogeneousObjective phi = [](const Vector& x, Vector* grad) {
    if (grad) *grad = -duality_map(x, 3.0);
    return -p_norm(x, 3.0);
  };
  const auto e = maximize_on_sphere(phi, 3, 3.0, opts());
  EXPECT_NEAR(e.value, -1.0, 1e-12);
}
