#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/math/constants/constants.hpp>

#include "zyg/function_catalog.hpp"

using namespace zyg;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

// Independent 50-digit partial sum of a^n cos(b^n pi x), n = 0..N.
double big_weierstrass(int N, double a, double b, double x) {
  const Big pi = boost::math::constants::pi<Big>();
  Big sum = 0, an = 1, bn = 1;
  for (int n = 0; n <= N; ++n) {
    sum += an * boost::multiprecision::cos(bn * pi * Big(x));
    an *= Big(a);
    bn *= Big(b);
  }
  return static_cast<double>(sum);
}

double at(const ScalarField& f, double x) { return f(std::span<const double>(&x, 1)); }

}  // namespace

TEST(FunctionCatalog, WeierstrassAtZeroIsGeometricSum) {
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=40");
  EXPECT_NEAR(at(f, 0.0), big_weierstrass(40, 0.5, 2.0, 0.0), 1e-15);
  EXPECT_NEAR(at(f, 0.0), 2.0 - std::exp2(-40), 1e-15);
}

TEST(FunctionCatalog, WeierstrassMatchesArbitraryPrecision) {
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48");
  for (double x : {0.1, 0.25, 0.3337, 0.5, 0.71, 0.999, -0.4, 1.75}) {
    EXPECT_NEAR(at(f, x), big_weierstrass(48, 0.5, 2.0, x), 1e-13) << "x = " << x;
  }
}

TEST(FunctionCatalog, NonIntegerFrequencyMatchesArbitraryPrecision) {
  const auto f = ScalarField::parse("weierstrass:a=0.4,b=2.5,N=40");
  for (double x : {0.05, 0.2, 0.61}) EXPECT_NEAR(at(f, x), big_weierstrass(40, 0.4, 2.5, x), 1e-9) << "x = " << x;
}

TEST(FunctionCatalog, ElementaryFields) {
  EXPECT_DOUBLE_EQ(at(ScalarField::parse("affine:slope=3"), 2.0), 6.0);
  EXPECT_DOUBLE_EQ(at(ScalarField::parse("abs"), -0.5), 0.5);
  EXPECT_DOUBLE_EQ(at(ScalarField::parse("square"), 0.3), 0.09);
  EXPECT_DOUBLE_EQ(at(ScalarField::parse("constant:c=0.5"), 17.0), 0.5);
}

TEST(FunctionCatalog, UnknownFamilyOrKeyIsConfigurationError) {
  EXPECT_THROW(ScalarField::parse("peano:a=1"), ConfigurationError);
  EXPECT_THROW(ScalarField::parse("weierstrass:a=0.5,q=2"), ConfigurationError);
  EXPECT_THROW(ScalarField::parse("affine"), ConfigurationError);
  EXPECT_THROW(ScalarField::parse("weierstrass:a=1.5,b=2"), ConfigurationError);
}

TEST(FunctionCatalog, TooShortTruncationIsRejected) {
  EXPECT_THROW(ScalarField::parse("weierstrass:a=0.5,b=2,N=10"), ConfigurationError);
}

TEST(FunctionCatalog, SpecRoundTrips) {
  for (const char* s : {"weierstrass:a=0.5,b=2,N=48", "takagi", "holder:alpha=0.5", "affine:slope=1;2,c=0.25",
                        "abs:d=2", "square", "weierstrass:a=0.5,b=2,N=48,scale=0.125,offset=0.5"}) {
    const auto f = ScalarField::parse(s);
    const auto g = ScalarField::parse(f.spec());
    EXPECT_EQ(f.spec(), g.spec());
    std::vector<double> x(f.dimension(), 0.377);
    EXPECT_EQ(f(std::span<const double>(x)), g(std::span<const double>(x))) << s;
  }
}

TEST(FunctionCatalog, RegularityLabels) {
  using C = RegularityLabel::Class;
  EXPECT_EQ(ScalarField::parse("weierstrass:a=0.5,b=2").label().cls, C::zygmund_not_lipschitz);
  EXPECT_EQ(ScalarField::parse("affine:slope=3").label().cls, C::lipschitz);
  EXPECT_DOUBLE_EQ(ScalarField::parse("affine:slope=3").label().constant, 3.0);
  const auto t = ScalarField::parse("takagi").label();
  EXPECT_EQ(t.cls, C::holder);
  EXPECT_DOUBLE_EQ(t.alpha, 0.9);
}

TEST(FunctionCatalog, RangeEnclosureContainsSamples) {
  for (const char* s : {"weierstrass:a=0.5,b=2,N=48", "takagi", "holder:alpha=0.5", "abs", "square",
                        "weierstrass:a=0.4,b=2.5,N=40"}) {
    const auto f = ScalarField::parse(s);
    for (double lo : {-0.3, 0.0, 0.123, 0.5}) {
      for (double w : {1e-3, 0.05, 0.4}) {
        const double hi = lo + w;
        const auto r = f.range_over(std::span<const double>(&lo, 1), std::span<const double>(&hi, 1));
        for (int i = 0; i <= 200; ++i) {
          const double v = at(f, lo + w * i / 200.0);
          EXPECT_LE(r.lo, v) << s;
          EXPECT_GE(r.hi, v) << s;
        }
      }
    }
  }
}

TEST(FunctionCatalog, DifferencesOnElementaryFields) {
  const auto sq = ScalarField::parse("square");
  const double x0[] = {0.0}, h[] = {0.1};
  EXPECT_NEAR(second_difference(sq, std::span<const double>(x0), std::span<const double>(h)), 0.02, 1e-17);
  const auto ab = ScalarField::parse("abs");
  const double h3[] = {0.3};
  EXPECT_DOUBLE_EQ(second_difference(ab, std::span<const double>(x0), std::span<const double>(h3)), 0.6);
  const auto id = ScalarField::parse("affine:slope=1");
  const double x1[] = {1.0}, q[] = {0.25};
  EXPECT_DOUBLE_EQ(first_difference(id, std::span<const double>(x1), std::span<const double>(q)), 0.25);
  const double zero[] = {0.0};
  EXPECT_THROW(second_difference(sq, std::span<const double>(x0), std::span<const double>(zero)), DomainError);
  EXPECT_THROW(first_difference(sq, std::span<const double>(x0), std::span<const double>(zero)), DomainError);
}

TEST(FunctionCatalog, AffineSecondDifferenceVanishes) {
  const auto f = ScalarField::parse("affine:slope=3,c=-1");
  for (double x : {0.0, 0.3, 0.77})
    for (double hv : {0.5, 1e-3, std::exp2(-20)}) {
      const double xs[] = {x}, hs[] = {hv};
      EXPECT_LT(std::abs(second_difference(f, std::span<const double>(xs), std::span<const double>(hs))), 1e-12);
    }
}

TEST(FunctionCatalog, WeierstrassSecondDifferencesAtZeroMatchOracle) {
  // Frozen from the 50-digit oracle for k = 1..20.
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48");
  for (int k = 1; k <= 20; ++k) {
    const double h = std::exp2(-k);
    const double exact = big_weierstrass(48, 0.5, 2.0, h) + big_weierstrass(48, 0.5, 2.0, -h) -
                         2.0 * big_weierstrass(48, 0.5, 2.0, 0.0);
    const double xs[] = {0.0}, hs[] = {h};
    EXPECT_NEAR(second_difference(f, std::span<const double>(xs), std::span<const double>(hs)), exact, 1e-13)
        << "k = " << k;
  }
}

TEST(FunctionCatalog, MultivariateFieldsAreBounded) {
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48,d=2");
  EXPECT_EQ(f.dimension(), 2u);
  const double x[] = {0.2, 0.7};
  EXPECT_LE(std::abs(f(std::span<const double>(x))), 2.0 + 1e-12);
}
