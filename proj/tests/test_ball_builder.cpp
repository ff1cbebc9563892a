#include <gtest/gtest.h>

#include "zyg/affine_fit.hpp"
#include "zyg/ball_builder.hpp"

using namespace zyg;

namespace {

LemmaParams params(double delta, double M, double r) {
  LemmaParams p;
  p.delta = delta;
  p.M = M;
  p.r = r;
  return p;
}

OffsetBallPair build(const ScalarField& f, double x0, const LemmaParams& p) {
  return construct_offset_ball(f, std::span<const double>(&x0, 1), p);
}

}  // namespace

TEST(BallBuilder, VerticalCaseOnZeroField) {
  const auto pair = build(ScalarField::parse("constant:c=0"), 0.5, params(1.0, 1.1, 0.05));
  EXPECT_EQ(pair.case_tag, CaseTag::vertical);
  EXPECT_DOUBLE_EQ(pair.offset.center[0], 0.5);
  EXPECT_NEAR(pair.offset.center[1], 0.21, 1e-15);
  EXPECT_DOUBLE_EQ(pair.offset.radius, 0.05);
  EXPECT_NEAR(pair.disjointness.margin, 0.16, 1e-15);
  EXPECT_NEAR(pair.distance_bound, 0.16, 1e-15);
  EXPECT_FALSE(pair.r_prime.has_value());
}

TEST(BallBuilder, GradientCaseOnSteepLine) {
  const auto pair = build(ScalarField::parse("affine:slope=10"), 0.0, params(1.0, 1.1, 0.05));
  EXPECT_EQ(pair.case_tag, CaseTag::gradient);
  EXPECT_NEAR(pair.gradient_used[0], 10.0, 1e-9);
  ASSERT_TRUE(pair.r_prime.has_value());
  EXPECT_NEAR(*pair.r_prime, 0.0055, 1e-12);
  EXPECT_NEAR(pair.offset.center[0], 0.011, 1e-12);
  EXPECT_NEAR(pair.offset.center[1], -0.215, 1e-12);
  EXPECT_NEAR(pair.offset.radius, 0.0055, 1e-12);
  EXPECT_TRUE(pair.disjointness.passed());
  // Exact distance from the offset centre to the line y = 10 x, minus the radius.
  const double exact = std::abs(10.0 * 0.011 + 0.215) / std::sqrt(101.0) - 0.0055;
  EXPECT_GE(pair.disjointness.margin, exact - 1e-12);
  EXPECT_DOUBLE_EQ(pair.distance_bound, (5 * 1.1 + 1) * 0.05);
}

TEST(BallBuilder, ZeroSignPlacesOffsetAbove) {
  EXPECT_EQ(sign_of(0.0), 1.0);
  EXPECT_EQ(sign_of(-0.0), 1.0);
  EXPECT_EQ(sign_of(-1e-300), -1.0);
}

TEST(BallBuilder, PreconditionErrors) {
  const auto f = ScalarField::parse("constant:c=0");
  EXPECT_THROW(build(f, 0.5, params(1.0, 1.1, 0.2)), RadiusTooLargeError);
  EXPECT_THROW(build(f, 0.5, params(1.0, 1.0, 0.01)), DomainError);
  EXPECT_THROW(build(f, 0.5, params(1.0, 0.5, 0.01)), DomainError);
  EXPECT_THROW(build(f, 0.5, params(1.0, 1.1, -0.01)), DomainError);
}

TEST(BallBuilder, RadiusTooLargeIsADomainError) {
  EXPECT_THROW(check_lemma_params(params(0.75, 1.1, 0.1)), DomainError);
}

TEST(BallBuilder, CoverOfZeroFieldIsVertical) {
  const auto cover = cover_graph(ScalarField::parse("constant:c=0"), Box::unit(1), params(1.0, 1.1, 0.1));
  EXPECT_GE(cover.pairs.size(), 11u);
  EXPECT_TRUE(cover.coverage_verified);
  for (const auto& p : cover.pairs) EXPECT_EQ(p.case_tag, CaseTag::vertical);
}

TEST(BallBuilder, IdentityStaysVerticalAtTheBoundary) {
  const auto cover = cover_graph(ScalarField::parse("affine:slope=1"), Box::unit(1), params(1.0, 1.1, 0.01));
  for (const auto& p : cover.pairs) {
    EXPECT_EQ(p.case_tag, CaseTag::vertical);
    EXPECT_TRUE(p.disjointness.passed());
  }
}

TEST(BallBuilder, WeierstrassCoverMixesCasesAndIsDisjoint) {
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48");
  const auto family = random_ball_family(1, 256, 4, 14, 1);
  const double M = estimate_M(f, std::span<const Ball>(family)).clamped;
  const auto cover = cover_graph(f, Box::unit(1), params(0.5, M, std::exp2(-8)));
  std::size_t vertical = 0;
  for (const auto& p : cover.pairs) {
    if (p.case_tag == CaseTag::vertical) ++vertical;
    EXPECT_TRUE(p.disjointness.passed());
    EXPECT_GE(p.disjointness.samples, 1000u);
    EXPECT_LE(p.center_distance, (5 * M + 1) * p.base.radius + 1e-12);
    EXPECT_LE(p.ball_distance, p.distance_bound + 1e-12);
  }
  EXPECT_GT(vertical, 0u);
  EXPECT_LT(vertical, cover.pairs.size());
  EXPECT_TRUE(cover.coverage_verified);
}

TEST(BallBuilder, VerticalOffsetIsExactlyAbove) {
  const auto f = ScalarField::parse("square");
  const auto pair = build(f, 0.3, params(1.0, 1.1, 0.002));
  ASSERT_EQ(pair.case_tag, CaseTag::vertical);
  EXPECT_EQ(pair.offset.center[0], pair.base.center[0]);
  EXPECT_NEAR(pair.offset.center[1] - pair.base.center[1], (2 * 1.1 + 2) * 0.002, 1e-15);
}

TEST(BallBuilder, FootprintSamplesStayInsideTheBall) {
  const Point c{0.2, -0.4};
  const auto pts = footprint_samples(c, 0.1, 500);
  EXPECT_EQ(pts.size(), 505u);
  for (const auto& p : pts) EXPECT_LE(distance(p, c), 0.1 * (1 + 1e-12));
}

TEST(BallBuilder, PorosityOfFlatGraph) {
  const auto f = ScalarField::parse("constant:c=0");
  const auto rep = porosity_probe(f, Ball({0.5, 0.0}, 0.1, Space::graph));
  EXPECT_DOUBLE_EQ(rep.best_a, 0.49);
  ASSERT_TRUE(rep.sweep.back().hole.has_value());
  EXPECT_GT(rep.sweep.back().margin, 0.0);
}

TEST(BallBuilder, PorosityAwayFromGraph) {
  const auto rep = porosity_probe(ScalarField::parse("constant:c=0"), Ball({0.5, 1.0}, 0.1, Space::graph));
  EXPECT_DOUBLE_EQ(rep.best_a, 0.99);
}

TEST(BallBuilder, PorosityHoleRatioOutOfRange) {
  const auto f = ScalarField::parse("constant:c=0");
  EXPECT_THROW(find_hole(f, Ball({0.5, 0.0}, 0.1, Space::graph), 1.0, 10, 1), DomainError);
}

TEST(BallBuilder, WeierstrassPorosityTable) {
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48");
  const auto rows = porosity_scale_table(f, {{0.1}, {0.37}}, 4, 8, 100, 1);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    EXPECT_GT(r.best_a, 0.0);
    EXPECT_LT(r.best_a, 1.0);
    EXPECT_DOUBLE_EQ(r.radius, std::exp2(-r.k));
  }
}
