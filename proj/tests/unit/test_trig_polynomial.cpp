#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwrs/trig_polynomial.hpp"
#include "rwrs/types.hpp"

using namespace rwrs;

TEST(TrigPolynomial, CosineIsHermitianPair) {
  TrigPolynomial f(2);
  f.add_cosine({1, 0}, 2.0);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.coefficient({1, 0}), std::complex<double>(1.0, 0.0));
  EXPECT_EQ(f.coefficient({-1, 0}), std::complex<double>(1.0, 0.0));
  EXPECT_DOUBLE_EQ(f.l1_norm(), 2.0);
  EXPECT_DOUBLE_EQ(f.l2_norm_squared(), 2.0);
  const double x[2] = {0.125, 0.7};
  EXPECT_NEAR(f.evaluate(x).real(), 2.0 * std::cos(2 * std::numbers::pi * 0.125), 1e-14);
  EXPECT_NEAR(f.evaluate(x).imag(), 0.0, 1e-15);
}

TEST(TrigPolynomial, SineEvaluates) {
  TrigPolynomial f(1);
  f.add_sine({3}, 1.5);
  const double x[1] = {0.05};
  EXPECT_NEAR(f.evaluate(x).real(), 1.5 * std::sin(2 * std::numbers::pi * 0.15), 1e-14);
}

TEST(TrigPolynomial, Validation) {
  TrigPolynomial f(2);
  EXPECT_THROW(f.add_cosine({0, 0}, 1.0), ValidationError);
  EXPECT_THROW(f.add_cosine({1, 0, 0}, 1.0), ValidationError);
  EXPECT_THROW(TrigPolynomial::from_terms(1, {{{1}, {1.0, 0.0}}}), ValidationError);
  EXPECT_NO_THROW(TrigPolynomial::from_terms(1, {{{1}, {1.0, 2.0}}, {{-1}, {1.0, -2.0}}}));
}

TEST(TrigPolynomial, ArithmeticCancels) {
  TrigPolynomial f(3), g(3);
  f.add_cosine({1, 2, 3}, 1.0).add_sine({0, 1, 0}, 2.0);
  g.add_cosine({1, 2, 3}, 1.0);
  const auto d = f - g;
  EXPECT_EQ(d.size(), 2u);
  EXPECT_TRUE((f - f).empty());
  EXPECT_DOUBLE_EQ((f + f).l1_norm(), f.scaled(2.0).l1_norm());
  EXPECT_EQ(negate({1, -2, 0}), (Frequency{-1, 2, 0}));
}
