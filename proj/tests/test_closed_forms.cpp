#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "toda/closed_forms.hpp"

using namespace toda;

namespace {

// Plain restatement of the bubble formula, evaluated naively.
double naive_bubble(double mu, double b, double r) {
  const double y = mu * mu * std::pow(r, 2 * (1 + b));
  return std::log(8 * mu * mu * (1 + b) * (1 + b) * std::pow(r, 2 * b) / ((1 + y) * (1 + y)));
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> r;
  for (int i = 0; i <= n; ++i) r.push_back(a * std::pow(b / a, double(i) / n));
  return r;
}

}  // namespace

TEST(LiouvilleBubble, Examples) {
  EXPECT_DOUBLE_EQ(liouville_bubble({1, 0}, 0.0), std::log(8.0));
  EXPECT_NEAR(liouville_bubble({1, 0}, 1.0), std::log(2.0), 1e-15);
}

TEST(LiouvilleBubble, Errors) {
  EXPECT_THROW(liouville_bubble({1, 1}, 1.0), std::invalid_argument);
  EXPECT_THROW(liouville_bubble({0, 0}, 1.0), std::invalid_argument);
  EXPECT_THROW(liouville_bubble({1, 0}, -1.0), std::invalid_argument);
  EXPECT_THROW(singular_bubble({1, 1}, 0.0), std::invalid_argument);
  EXPECT_THROW(singular_bubble({1, -0.5}, 1.0), std::invalid_argument);
}

TEST(LiouvilleBubble, TotalMassByQuadrature) {
  auto u = [](double r) { return naive_bubble(1.0, 0.0, r); };
  const double m = oracle::radial_mass(u, 1e-8, 1e8);
  EXPECT_NEAR(m, 4.0, 1e-9);
  EXPECT_DOUBLE_EQ(bubble_total_mass({1, 0}), 4.0);
}

TEST(SingularBubble, Examples) {
  EXPECT_NEAR(singular_bubble({1, 1}, 1.0), std::log(8.0), 1e-15);
  EXPECT_NEAR(bubble_operator_residual({1, 2}, 3.0), 0.0, 1e-10);
  EXPECT_DOUBLE_EQ(bubble_total_mass({1, 1}), 8.0);
}

TEST(SingularBubble, TotalMassByQuadrature) {
  for (double b : {0.5, 1.0, 2.0, 3.0}) {
    auto u = [b](double r) { return naive_bubble(1.0, b, r); };
    EXPECT_NEAR(oracle::radial_mass(u, 1e-8, 1e6), 4 * (1 + b), 1e-8) << b;
  }
}

TEST(SingularBubble, MatchesNaiveFormula) {
  for (double mu : {0.3, 1.0, 7.0})
    for (double b : {0.0, 1.0, 2.5})
      for (double r : log_grid(1e-3, 1e3, 30))
        EXPECT_NEAR(singular_bubble({mu, b}, r), naive_bubble(mu, b, r), 1e-12 * (1 + std::abs(naive_bubble(mu, b, r))));
}

TEST(BubbleOperator, ResidualOnLogGrid) {
  for (double b : {0.0, 0.5, 1.0, 2.0, 3.0})
    for (double mu : {0.5, 1.0, 2.0})
      for (double r : log_grid(1e-3, 1e3, 120)) EXPECT_LT(std::abs(bubble_operator_residual({mu, b}, r)), 1e-9);
}

TEST(BubbleOperator, DerivativesAgreeWithFiniteDifferences) {
  for (double b : {0.0, 1.0, 2.0})
    for (double r : {0.01, 0.3, 1.0, 4.0, 50.0}) {
      auto u = [b](double s) { return naive_bubble(1.0, b, s); };
      const double h = 1e-3 * r;
      EXPECT_NEAR(bubble_derivative({1, b}, r), oracle::d1(u, r, h), 1e-7 / r);
      EXPECT_NEAR(bubble_second_derivative({1, b}, r), oracle::d2(u, r, h), 1e-5 / (r * r));
    }
  EXPECT_DOUBLE_EQ(bubble_second_derivative({1, 0}, 0.0), -2.0);
  EXPECT_DOUBLE_EQ(bubble_derivative({1, 0}, 0.0), 0.0);
}

TEST(BubbleMass, ClosedFormAgreesWithQuadrature) {
  for (double b : {0.0, 1.5})
    for (double R : {0.1, 1.0, 10.0}) {
      auto u = [b](double s) { return naive_bubble(2.0, b, s); };
      EXPECT_NEAR(bubble_mass({2.0, b}, R), oracle::radial_mass(u, 1e-9, R), 1e-9);
    }
  EXPECT_DOUBLE_EQ(bubble_mass({1, 0}, 1.0), 2.0);
}

TEST(BubbleScaling, Covariance) {
  for (double mu : {1e-2, 0.5, 3.0, 1e3})
    for (double r : log_grid(1e-3, 1e3, 40))
      EXPECT_NEAR(liouville_bubble({mu, 0}, r), liouville_bubble({1, 0}, mu * r) + 2 * std::log(mu), 1e-12 * (1 + std::abs(liouville_bubble({mu, 0}, r))));
}

TEST(BubbleScaling, FarField) {
  for (double mu : {0.5, 1.0, 2.0})
    for (double b : {0.0, 1.0, 2.0}) {
      const double r = 1e8;
      const double lim = singular_bubble({mu, b}, r) + (4 + 2 * b) * std::log(r);
      EXPECT_NEAR(lim, bubble_far_field_constant({mu, b}), 1e-9);
    }
  // b = 0: u + 4 log r -> log(8/μ^2).
  EXPECT_NEAR(liouville_bubble({1, 0}, 1e7) + 4 * std::log(1e7), std::log(8.0), 1e-12);
}

TEST(BubbleScaling, OriginConstant) {
  for (double b : {0.0, 1.0, 2.0}) {
    const double r = 1e-9;
    EXPECT_NEAR(singular_bubble({1.5, b}, r) - 2 * b * std::log(r), bubble_origin_constant({1.5, b}), 1e-9);
  }
}

TEST(Conversions, Examples) {
  auto u = from_w_eta({0, 0});
  EXPECT_EQ(u, (std::array<double, 3>{0, 0, 0}));
  u = from_w_eta({1, 2});
  EXPECT_EQ(u, (std::array<double, 3>{1, -3, 1}));
  u = from_w_eta({0.7, 0.0});
  EXPECT_EQ(u[0], u[1]);

  auto v = from_theta_phi({0, 0});
  EXPECT_EQ(v, (std::array<double, 3>{0, 0, 0}));
  v = from_theta_phi({1, 1});
  EXPECT_EQ(v, (std::array<double, 3>{2, -4, 2}));
  v = from_theta_phi({0.4, 0.0});
  EXPECT_EQ(v[0], -0.4);
  EXPECT_EQ(v[1], -0.4);
  EXPECT_EQ(v[2], 0.8);
}

TEST(Conversions, ConstraintsAndRoundTrips) {
  for (double w : {-3.0, -0.25, 0.0, 1.0, 7.5})
    for (double e : {-2.0, 0.0, 0.5, 4.0}) {
      const auto u = from_w_eta({w, e});
      EXPECT_EQ(u[0] + u[1] + 2 * u[2], 0.0);
      const auto back = to_w_eta(u);
      EXPECT_EQ(back.w, w);
      EXPECT_EQ(back.eta, e);

      const auto t = from_theta_phi({w, e});
      EXPECT_EQ(t[0] + t[1] + t[2], 0.0);
      const auto tb = to_theta_phi(t);
      EXPECT_DOUBLE_EQ(tb.theta, w);
      EXPECT_DOUBLE_EQ(tb.phi, e);
    }
  static_assert(from_w_eta({1, 2})[1] == -3.0);
}
