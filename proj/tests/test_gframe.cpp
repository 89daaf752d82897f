#include "fixtures.hpp"
#include "gpf/errors.hpp"
#include "gpf/generate.hpp"
#include "gpf/gframe.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gpf;
using fixture::coordinate_frame;
using fixture::frame_of;
using fixture::scaled_identity;
using fixture::triple;

namespace {

EstimatorOptions opts(std::uint64_t seed = 0) {
  EstimatorOptions o;
  o.seed = seed;
  return o;
}

GPFusionFrame random_frame(int n, std::vector<int> dims, double p, std::uint64_t seed,
                           GenClass c = GenClass::Frame) {
  GenRequest r;
  r.dim = n;
  r.block_dims = std::move(dims);
  r.p = p;
  r.seed = seed;
  r.target = c;
  return generate_frame(r);
}

}  // namespace

TEST(WeightedTriple, Invariants) {
  EXPECT_THROW(WeightedTriple(SubspaceProjection::identity(2), LinOp::identity(2), 0.0), ContractError);
  EXPECT_THROW(WeightedTriple(SubspaceProjection::identity(2), LinOp::identity(2), -1.0), ContractError);
  EXPECT_THROW(WeightedTriple(SubspaceProjection::identity(2), LinOp::identity(3), 1.0), DimensionError);
}

TEST(GPFusionFrame, AllTriplesShareTheSpace) {
  std::vector<WeightedTriple> ts{triple(Matrix::Identity(2, 2)), triple(Matrix::Identity(3, 3))};
  EXPECT_THROW(GPFusionFrame(PNormSpace(2, 2.0), ts), DimensionError);
  EXPECT_THROW(GPFusionFrame(PNormSpace(2, 2.0), {}), ContractError);
}

TEST(Analysis, Examples) {
  const auto a = analysis_apply(scaled_identity(2, 2.0), Vector{{1.0, 2.0}});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.block(0), (Vector{{1.0, 2.0}}));
  const auto c = analysis_apply(coordinate_frame(2.0), Vector{{3.0, 4.0}});
  EXPECT_EQ(c.block(0), (Vector{{3.0, 0.0}}));
  EXPECT_EQ(c.block(1), (Vector{{0.0, 4.0}}));
  const auto z = analysis_apply(random_frame(3, {2, 1}, 2.5, 4), Vector::Zero(3));
  EXPECT_EQ(mixed_norm(z), 0.0);
  EXPECT_THROW(analysis_apply(coordinate_frame(2.0), Vector::Zero(3)), DimensionError);
}

TEST(Analysis, MatchesHandAssembledStack) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_frame(4, {2, 3, 1}, 1.8, s, GenClass::Any);
    EXPECT_LE((f.analysis_matrix().matrix() - oracle::stacked(f)).norm(), 1e-14);
    std::mt19937_64 g(s);
    const Vector x = oracle::random_vector(4, g);
    EXPECT_NEAR(mixed_norm(analysis_apply(f, x)), oracle::mixed_norm_of_analysis(f, x), 1e-12);
  }
}

TEST(Synthesis, Examples) {
  EXPECT_EQ(synthesis_apply(scaled_identity(2, 2.0), DualMixedSeq({Vector{{1.0, 2.0}}}, 2.0)),
            (Vector{{1.0, 2.0}}));
  EXPECT_EQ(synthesis_apply(coordinate_frame(2.0), DualMixedSeq({Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}}, 2.0)),
            (Vector{{1.0, 1.0}}));
  const auto f = random_frame(3, {2, 2}, 3.0, 1);
  EXPECT_EQ(synthesis_apply(f, DualMixedSeq({Vector::Zero(2), Vector::Zero(2)}, 1.5)), Vector::Zero(3));
  EXPECT_THROW(synthesis_apply(f, DualMixedSeq({Vector::Zero(2)}, 1.5)), DimensionError);
}

TEST(Bounds, Examples) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto b = estimate_bounds(scaled_identity(3, p), opts());
    EXPECT_NEAR(b.A(), 1.0, 1e-12);
    EXPECT_NEAR(b.B(), 1.0, 1e-12);
    const auto c = estimate_bounds(scaled_identity(2, p, 2.5), opts());
    EXPECT_NEAR(c.A(), 2.5, 1e-12);
    EXPECT_NEAR(c.B(), 2.5, 1e-12);
  }
  const auto coord = estimate_bounds(coordinate_frame(2.0), opts());
  ASSERT_TRUE(coord.exact_lower.has_value());
  EXPECT_NEAR(coord.exact_lower->value, 1.0, 1e-15);
  EXPECT_NEAR(coord.exact_upper->value, 1.0, 1e-15);
}

TEST(Bounds, CoordinateFrameAtOtherExponentsIsParseval) {
  // sum_i |x_i|^p = ||x||_p^p for every p.
  for (double p : {1.3, 2.7}) {
    const auto c = classify(coordinate_frame(p), opts());
    EXPECT_EQ(c.frame_class, FrameClass::Parseval);
  }
}

TEST(Bounds, WeightScalingScalesBothBounds) {
  for (double p : {1.5, 2.0, 4.0}) {
    const auto f = random_frame(3, {2, 2}, p, 9);
    const auto b1 = estimate_bounds(f, opts(1));
    const auto b2 = estimate_bounds(f.scaled_weights(3.0), opts(1));
    EXPECT_NEAR(b2.A(), 3.0 * b1.A(), 1e-7 * b2.B());
    EXPECT_NEAR(b2.B(), 3.0 * b1.B(), 1e-7 * b2.B());
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(scaled_identity(2, 2.0), opts()).frame_class, FrameClass::Parseval);
  const auto tight = classify(scaled_identity(2, 2.0, 2.0), opts());
  EXPECT_EQ(tight.frame_class, FrameClass::Tight);
  EXPECT_NEAR(tight.lower_bound->value, 2.0, 1e-12);
  const auto nf = classify(frame_of(2.0, {triple(Matrix{{1.0, 0.0}})}), opts());
  EXPECT_EQ(nf.frame_class, FrameClass::NotFrame);
  EXPECT_TRUE(nf.kernel_detected);
  EXPECT_EQ(nf.stacked_rank, 1);
}

TEST(Classify, InvariantsOnGeneratedFamilies) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (auto c : {GenClass::Frame, GenClass::Deficient, GenClass::Any}) {
      const auto f = random_frame(3, {1, 2, 1}, s % 2 ? 2.0 : 1.7, s, c);
      const auto k = classify(f, opts(s));
      if (k.frame_class == FrameClass::Frame) {
        EXPECT_GT(k.lower_bound->value, 0.0);
      }
      if (k.frame_class == FrameClass::Tight || k.frame_class == FrameClass::Parseval) {
        EXPECT_LE(std::abs(k.lower_bound->value - k.bessel_bound->value), 1e-6 * k.bessel_bound->value);
      }
      if (c == GenClass::Deficient) EXPECT_EQ(k.frame_class, FrameClass::NotFrame);
      // Lower bound positive exactly when the stack is injective.
      EXPECT_EQ(k.kernel_detected, !is_gf_complete(f));
    }
  }
}

TEST(Rescale, Examples) {
  const auto r = rescale_to_parseval(scaled_identity(2, 2.0, 2.0), opts());
  EXPECT_LE((r.triple(0).local_op().matrix() - Matrix::Identity(2, 2)).norm(), 1e-15);
  const auto b = estimate_bounds(r, opts());
  EXPECT_NEAR(b.A(), 1.0, 1e-12);
  EXPECT_NEAR(b.B(), 1.0, 1e-12);

  const auto same = rescale_to_parseval(scaled_identity(3, 2.0), opts());
  EXPECT_LE((same.triple(0).local_op().matrix() - Matrix::Identity(3, 3)).norm(), 1e-12);

  const auto five = rescale_to_parseval(scaled_identity(2, 3.0, 5.0), opts());
  EXPECT_EQ(classify(five, opts()).frame_class, FrameClass::Parseval);

  EXPECT_NO_THROW(rescale_to_parseval(coordinate_frame(2.0), opts()));
}

TEST(Rescale, RejectsNonTight) {
  const auto f = frame_of(2.0, {triple(Matrix{{1.0, 0.0}, {0.0, 3.0}})});
  EXPECT_THROW(rescale_to_parseval(f, opts()), ContractError);
}

TEST(GfComplete, Examples) {
  EXPECT_TRUE(is_gf_complete(scaled_identity(2, 2.0)));
  EXPECT_FALSE(is_gf_complete(frame_of(2.0, {triple(Matrix{{1.0, 0.0}})})));
  EXPECT_TRUE(is_gf_complete(coordinate_frame(2.0)));
}

TEST(Riesz, Examples) {
  const auto id = check_riesz(scaled_identity(2, 2.0), opts());
  EXPECT_NEAR(id.lower_sandwich.value, 1.0, 1e-12);
  EXPECT_NEAR(id.upper_sandwich.value, 1.0, 1e-12);
  EXPECT_TRUE(id.is_riesz);

  const auto coord = check_riesz(fixture::coordinate_selectors(2.0), opts());
  EXPECT_NEAR(coord.lower_sandwich.value, 1.0, 1e-12);
  EXPECT_NEAR(coord.upper_sandwich.value, 1.0, 1e-12);
  EXPECT_TRUE(coord.is_riesz);
  EXPECT_EQ(coord.subsets_checked, 3u);
  EXPECT_FALSE(coord.subsets_sampled);

  // With 2 x 2 diagonal blocks the zero rows put (e_2, e_1) in the kernel of T.
  const auto diag = check_riesz(coordinate_frame(2.0), opts());
  EXPECT_FALSE(diag.is_riesz);
  EXPECT_NEAR(diag.lower_sandwich.value, 0.0, 1e-12);

  const auto over = check_riesz(frame_of(2.0, {triple(Matrix{{1.0}}), triple(Matrix{{1.0}})}), opts());
  EXPECT_FALSE(over.is_riesz);
  EXPECT_FALSE(over.synthesis_injective);
}

TEST(Riesz, ImpliesFrameWithSameConstants) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = random_frame(3, {1, 2}, 2.0, s);
    const auto r = check_riesz(f, opts(s));
    if (!r.is_riesz) continue;
    const auto c = classify(f, opts(s));
    EXPECT_TRUE(is_frame_class(c.frame_class));
    // T = U^T, so sigma_min(T) = sigma_min(U) on square systems.
    EXPECT_NEAR(c.lower_bound->value, oracle::sigma_min(f.synthesis_matrix().matrix()), 1e-9);
  }
}

TEST(Riesz, SampledSubsetsForLargeFamilies) {
  const auto f = random_frame(2, std::vector<int>(9, 1), 2.0, 3);
  const auto r = check_riesz(f, opts());
  EXPECT_TRUE(r.subsets_sampled);
  EXPECT_EQ(r.subsets_checked, 65u);
  EXPECT_FALSE(r.is_riesz);
}

TEST(Duality, ResidualExamples) {
  EXPECT_LE(verify_duality(scaled_identity(2, 2.0), 100, 1).max_residual, 1e-12);
  EXPECT_LE(verify_duality(random_frame(4, {2, 1, 3}, 2.5, 77), 100, 2).max_residual, 1e-10);
  const auto f = random_frame(4, {2, 1, 3}, 2.5, 77);
  const DualMixedSeq zero({Vector::Zero(2), Vector::Zero(1), Vector::Zero(3)}, f.q());
  const Vector x = Vector::Ones(4);
  EXPECT_EQ(dual_pairing(analysis_apply(f, x), zero), 0.0);
  EXPECT_EQ(x.dot(synthesis_apply(f, zero)), 0.0);
}

TEST(Surjectivity, Examples) {
  const auto id = verify_surjectivity_characterization(scaled_identity(2, 2.0), opts());
  EXPECT_TRUE(id.is_frame);
  EXPECT_TRUE(id.synthesis_surjective);
  EXPECT_TRUE(id.frame_equivalence_holds);

  const auto def = verify_surjectivity_characterization(random_frame(3, {1, 1}, 2.0, 5, GenClass::Deficient), opts());
  EXPECT_FALSE(def.is_frame);
  EXPECT_FALSE(def.synthesis_surjective);
  EXPECT_TRUE(def.frame_equivalence_holds);

  const auto over = verify_surjectivity_characterization(random_frame(2, {2, 2}, 2.0, 6), opts());
  EXPECT_TRUE(over.is_frame);
  EXPECT_TRUE(over.synthesis_surjective);
  EXPECT_FALSE(over.analysis_surjective);
  EXPECT_FALSE(over.is_riesz);
  EXPECT_TRUE(over.riesz_equivalence_holds);
}

TEST(BesselSynthesis, NormOfTIsBoundedByB) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto f = random_frame(3, {2, 1, 2}, p, s, GenClass::Any);
      const auto r = verify_bessel_synthesis(f, opts(s));
      EXPECT_TRUE(r.synthesis_bounded_by_B) << r.synthesis_norm.value << " vs " << r.bessel_bound;
      EXPECT_TRUE(r.analysis_bounded_by_T) << r.analysis_over_T;
    }
  }
}

TEST(Synthesis, PermutationInvariance) {
  for (std::uint64_t s = 0; s < 5; ++s)
    EXPECT_LE(synthesis_permutation_residual(random_frame(3, {1, 2, 2, 1}, 2.0, s), 10, s), 1e-14);
}

TEST(Frame, Subfamily) {
  const auto f = random_frame(3, {1, 2, 3}, 2.0, 8);
  const auto g = f.subfamily({2, 0});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.block_dims(), (std::vector<int>{3, 1}));
  EXPECT_THROW(f.subfamily({3}), std::out_of_range);
}
