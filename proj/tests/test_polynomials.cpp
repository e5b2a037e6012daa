#include <gtest/gtest.h>

#include <cmath>

#include "hpcrack/hp_space.hpp"
#include "hpcrack/polynomials.hpp"

using namespace hpcrack;

TEST(Polynomials, GaussRulesIntegrateToDegreeTwoNMinusOne)
{
  for (int n = 1; n <= max_gauss_points; ++n) {
    const auto& rule = gauss_1d(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (int q = 0; q < n; ++q)
        sum += rule.weights[q] * std::pow(rule.points[q], k);
      EXPECT_NEAR(sum, 1.0 / (k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(Polynomials, TensorGaussExamples)
{
  const QuadratureRule one = gauss_rule(1);
  ASSERT_EQ(one.points.size(), 1u);
  EXPECT_DOUBLE_EQ(one.points[0][0], 0.5);
  EXPECT_DOUBLE_EQ(one.points[0][1], 0.5);
  EXPECT_DOUBLE_EQ(one.weights[0], 1.0);

  const QuadratureRule two = gauss_rule(2);
  double s3t3 = 0.0;
  for (std::size_t q = 0; q < two.points.size(); ++q)
    s3t3 += two.weights[q] * std::pow(two.points[q][0], 3) * std::pow(two.points[q][1], 3);
  EXPECT_NEAR(s3t3, 1.0 / 16.0, 1e-15);

  const QuadratureRule four = gauss_rule(4);
  double s7 = 0.0;
  double total = 0.0;
  for (std::size_t q = 0; q < four.points.size(); ++q) {
    s7 += four.weights[q] * std::pow(four.points[q][0], 7);
    total += four.weights[q];
  }
  EXPECT_NEAR(s7, 0.125, 1e-15);
  EXPECT_NEAR(total, 1.0, 1e-15);

  EXPECT_THROW((void)gauss_rule(0), std::invalid_argument);
  EXPECT_THROW((void)gauss_rule(17), std::invalid_argument);
}

TEST(Polynomials, GllNodesAreSymmetricWithEndpoints)
{
  for (int p = 1; p <= max_degree; ++p) {
    const auto& x = gll_nodes(p);
    ASSERT_EQ(x.size(), static_cast<std::size_t>(p + 1));
    EXPECT_EQ(x.front(), 0.0);
    EXPECT_EQ(x.back(), 1.0);
    for (int k = 0; k <= p; ++k)
      EXPECT_NEAR(x[k], 1.0 - x[p - k], 1e-15);
    for (int k = 1; k < p; ++k) {
      // Interior nodes are roots of P_p'.
      EXPECT_NEAR(legendre(p, 2.0 * x[k] - 1.0)[1], 0.0, 1e-11);
      EXPECT_LT(x[k - 1], x[k]);
    }
  }
}

TEST(Polynomials, LagrangeBasisIsInterpolatory)
{
  for (int p = 1; p <= max_degree; ++p) {
    const auto& b = lagrange_basis(p);
    for (int k = 0; k <= p; ++k)
      for (int m = 0; m <= p; ++m)
        EXPECT_NEAR(b.value(k, b.nodes()[m]), k == m ? 1.0 : 0.0, 1e-13);
  }
}

TEST(Polynomials, LagrangeDerivativeMatchesFiniteDifference)
{
  const double h = 1e-6;
  for (int p = 1; p <= max_degree; ++p) {
    const auto& b = lagrange_basis(p);
    for (int k = 0; k <= p; ++k)
      for (double s : {0.1, 0.37, 0.8}) {
        const double fd = (b.value(k, s + h) - b.value(k, s - h)) / (2 * h);
        EXPECT_NEAR(b.derivative(k, s), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST(Polynomials, ShapeEvalExamples)
{
  const ShapeValue v00 = shape_eval(1, 0, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(v00.value, 1.0);
  EXPECT_DOUBLE_EQ(v00.gradient.x(), -1.0);
  EXPECT_DOUBLE_EQ(v00.gradient.y(), -1.0);
  EXPECT_DOUBLE_EQ(shape_eval(1, 0, {1.0, 1.0}).value, 0.0);

  for (auto st : {std::array<double, 2>{0.3, 0.9}, std::array<double, 2>{0.71, 0.05}}) {
    double sum = 0.0;
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int node = 0; node < 9; ++node) {
      const ShapeValue v = shape_eval(2, node, st);
      sum += v.value;
      grad += v.gradient;
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(grad.norm(), 0.0, 1e-13);
  }
}

TEST(Polynomials, TabulationMatchesDirectEvaluation)
{
  const auto& tab = tabulate(3, 5);
  const auto& rule = gauss_1d(5);
  const auto& b = lagrange_basis(3);
  for (int q = 0; q < 5; ++q)
    for (int k = 0; k <= 3; ++k) {
      EXPECT_DOUBLE_EQ(tab.values[q][k], b.value(k, rule.points[q]));
      EXPECT_DOUBLE_EQ(tab.derivatives[q][k], b.derivative(k, rule.points[q]));
    }
}
