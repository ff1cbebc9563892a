#include <gtest/gtest.h>

#include <random>

#include "zyg/cover_certifier.hpp"
#include "zyg/serialize.hpp"

using namespace zyg;

namespace {

// Smallest integer K0 >= 5M + 1 plus one; smallest p with 2^p >= 5K.
std::pair<long, long> k_p_oracle(double M) {
  long k0 = 0;
  while (static_cast<double>(k0) < 5.0 * M + 1.0) ++k0;
  const long K = k0 + 1;
  long p = 0;
  while ((1L << p) < 5 * K) ++p;
  return {K, p};
}

std::vector<Ball> random_family(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Ball> out;
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(Point{u(rng), u(rng)}, 0.005 + 0.06 * u(rng) * u(rng));
  return out;
}

const ScalarField& flat() {
  static const auto f = ScalarField::parse("constant:c=0.5");
  return f;
}

}  // namespace

TEST(CoverCertifier, KAndPForMEqualsTwo) {
  EXPECT_EQ(zygmund_K(2.0), 12);
  EXPECT_EQ(doubling_power(12), 6);
}

TEST(CoverCertifier, KAndPMatchIntegerOracle) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(1.0, 40.0);
  for (int i = 0; i < 50; ++i) {
    const double M = std::nextafter(u(rng), 100.0);
    const auto [K, p] = k_p_oracle(M);
    EXPECT_EQ(zygmund_K(M), K) << "M = " << M;
    EXPECT_EQ(doubling_power(zygmund_K(M)), p) << "M = " << M;
  }
  for (double M : {1.2, 1.4, 1.8, 3.0}) {
    EXPECT_EQ(zygmund_K(M), k_p_oracle(M).first) << "M = " << M;
  }
}

TEST(CoverCertifier, KRejectsInvalidM) {
  EXPECT_THROW(zygmund_K(1.0), DomainError);
  EXPECT_THROW(zygmund_K(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(CoverCertifier, VitaliTrivialFamilies) {
  const std::vector<Ball> one{Ball({0.3, 0.3}, 0.1)};
  EXPECT_EQ(vitali_subcover(std::span<const Ball>(one)), std::vector<std::size_t>{0});
  const std::vector<Ball> twins{Ball({0.3, 0.3}, 0.1), Ball({0.3, 0.3}, 0.1)};
  const auto kept = vitali_subcover(std::span<const Ball>(twins));
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_TRUE(twins[kept[0]].enlarged(5.0).contains(twins[1 - kept[0]].center));
  EXPECT_THROW(vitali_subcover(std::span<const Ball>()), DomainError);
  EXPECT_THROW(vitali_subcover(std::span<const Ball>(one), 0.5), DomainError);
}

TEST(CoverCertifier, VitaliDisjointAndCovering) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int family = 0; family < 5; ++family) {
    const auto balls = random_family(rng, 200);
    const auto kept = vitali_subcover(std::span<const Ball>(balls));
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        const auto& a = balls[kept[i]];
        const auto& b = balls[kept[j]];
        EXPECT_GT(distance(a.center, b.center), a.radius + b.radius);
      }
    std::size_t tested = 0;
    while (tested < 2000) {
      const Point p{u(rng), u(rng)};
      bool in_family = false;
      for (const auto& b : balls) in_family = in_family || b.contains(p);
      if (!in_family) continue;
      ++tested;
      bool covered = false;
      for (auto k : kept) covered = covered || balls[k].enlarged(5.0).contains(p);
      EXPECT_TRUE(covered);
    }
  }
}

TEST(CoverCertifier, EmbeddingRescalesOnlyHeights) {
  const auto flat_emb = embed_in_unit_cube(flat());
  EXPECT_EQ(flat_emb.scale, 1.0);
  EXPECT_EQ(flat_emb.offset, 0.0);
  const auto w = embed_in_unit_cube(ScalarField::parse("weierstrass:a=0.5,b=2,N=48"));
  EXPECT_NEAR(w.scale, 0.125, 1e-9);
  EXPECT_LE(w.scale, 0.125);
  EXPECT_NEAR(w.offset, 0.5, 1e-9);
  for (double x : {0.0, 0.2, 0.9}) {
    const double v = w.field(std::span<const double>(&x, 1));
    EXPECT_GE(v, 0.25);
    EXPECT_LE(v, 0.75);
  }
}

TEST(CoverCertifier, FlatProfileBracketsSlabArea) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=14,beta=0.25,seed=1");
  std::vector<double> deltas;
  for (int k = 3; k <= 10; ++k) deltas.push_back(std::exp2(-k));
  const auto rows = neighborhood_mass_profile(flat(), tree, deltas);
  ASSERT_EQ(rows.size(), deltas.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(rows[i].mass.contains(2 * deltas[i])) << deltas[i];
    if (i > 0) {
      EXPECT_LT(rows[i].mass.upper, rows[i - 1].mass.upper);
    }
  }
}

TEST(CoverCertifier, WideNeighbourhoodHasFullMass) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=8,beta=0.1,seed=7");
  const std::vector<double> deltas{2.0};
  const auto rows = neighborhood_mass_profile(flat(), tree, deltas);
  EXPECT_NEAR(rows[0].mass.lower, 1.0, 1e-12);
  EXPECT_NEAR(rows[0].mass.upper, 1.0, 1e-12);
}

TEST(CoverCertifier, ProfileScheduleValidation) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=8,beta=0.1,seed=7");
  const std::vector<double> fine{std::exp2(-9)};
  EXPECT_THROW(neighborhood_mass_profile(flat(), tree, fine), ResolutionError);
  const std::vector<double> unordered{0.1, 0.2};
  EXPECT_THROW(neighborhood_mass_profile(flat(), tree, unordered), DomainError);
  const auto cube = DyadicMeasureTree::parse("dyadic:n=3,depth=6,beta=0.1,seed=7");
  const std::vector<double> ok{0.25};
  EXPECT_THROW(neighborhood_mass_profile(flat(), cube, ok), ConfigurationError);
}

TEST(CoverCertifier, WeierstrassProfileDecreases) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=10,beta=0.1,seed=7");
  const auto emb = embed_in_unit_cube(ScalarField::parse("weierstrass:a=0.5,b=2,N=48"));
  std::vector<double> deltas;
  for (int k = 3; k <= 8; ++k) deltas.push_back(std::exp2(-k));
  const auto rows = neighborhood_mass_profile(emb.field, tree, deltas);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].mass.upper, rows[i - 1].mass.upper);
  }
}

TEST(CoverCertifier, ChainMechanicsWithLargeEpsilon) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=14,beta=0.25,seed=1");
  const auto cert = certify_thinness(flat(), tree, 1000.0, 1.001);
  EXPECT_TRUE(cert.pass);
  EXPECT_EQ(cert.K, 8);
  EXPECT_EQ(cert.p, 6);
  EXPECT_EQ(cert.offset_failures, 0u);
  EXPECT_EQ(cert.uncovered_samples, 0u);
  EXPECT_TRUE(cert.lattice_coverage_verified);
  EXPECT_GT(cert.cover_size, cert.disjoint_size);
  EXPECT_EQ(cert.gradient_pairs, 0u);
  ASSERT_EQ(cert.chain.size(), 7u);
  for (const auto& rec : cert.chain) EXPECT_TRUE(rec.satisfied) << rec.label;
  EXPECT_LT(cert.chain.back().lhs, 1000.0 + 1e-9);
  const Json j = to_json(cert);
  EXPECT_TRUE(chain_holds(j));
  EXPECT_EQ(j["verdict"], "pass");
}

TEST(CoverCertifier, SerializedChainIsRechecked) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=14,beta=0.25,seed=1");
  Json j = to_json(certify_thinness(flat(), tree, 1000.0, 1.001));
  j["chain"][0]["lhs"] = 1e9;
  EXPECT_FALSE(chain_holds(j));
}

TEST(CoverCertifier, SmallEpsilonExhaustsTheSchedule) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=14,beta=0.25,seed=1");
  try {
    certify_thinness(flat(), tree, 0.1, 1.001);
    FAIL() << "expected ScheduleExhaustedError";
  } catch (const ScheduleExhaustedError& e) {
    EXPECT_EQ(e.achieved().size(), 10u);
    EXPECT_LT(e.threshold(), 0.1 / 4096.0);
    for (const auto& [delta, upper] : e.achieved()) EXPECT_GE(upper, 2 * delta - std::exp2(-13));
  }
}

TEST(CoverCertifier, ArgumentErrors) {
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=8,beta=0.25,seed=1");
  EXPECT_THROW(certify_thinness(flat(), tree, 0.0, 2.0), DomainError);
  EXPECT_THROW(certify_thinness(flat(), tree, 1.0, 1.0), DomainError);
  const auto cube = DyadicMeasureTree::parse("dyadic:n=3,depth=6,beta=0.1,seed=7");
  EXPECT_THROW(certify_thinness(flat(), cube, 1.0, 2.0), ConfigurationError);
}

TEST(CoverCertifier, ChainRecordRelations) {
  EXPECT_TRUE((ChainRecord{"a", 1.0, 1.0, Relation::le, true}).holds());
  EXPECT_FALSE((ChainRecord{"a", 1.0, 1.0, Relation::lt, false}).holds());
  EXPECT_TRUE((ChainRecord{"a", 1.0, 1.0 + 1e-12, Relation::eq, true}).holds());
  EXPECT_FALSE((ChainRecord{"a", 2.0, 1.0, Relation::le, false}).holds());
}
