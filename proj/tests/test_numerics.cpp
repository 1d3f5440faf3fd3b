#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "slgf/error.hpp"
#include "slgf/numerics.hpp"

namespace slgf {
namespace {

TEST(NelderMead, QuadraticBowl) {
  for (int dim = 1; dim <= 4; ++dim) {
    const Optimum o = nelder_mead([](const Eigen::VectorXd& x) { return (x.array() - 3.0).square().sum(); },
                                  Eigen::VectorXd::Zero(dim));
    EXPECT_TRUE(o.converged);
    EXPECT_LT((o.location.array() - 3.0).abs().maxCoeff(), 1e-5);
  }
}

TEST(NelderMead, Rosenbrock) {
  const Optimum o = nelder_mead(
      [](const Eigen::VectorXd& x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); },
      Eigen::Vector2d(-1.2, 1.0));
  EXPECT_TRUE(o.converged);
  EXPECT_LT((o.location - Eigen::Vector2d(1, 1)).lpNorm<Eigen::Infinity>(), 1e-3);
}

TEST(NelderMead, AlreadyAtMinimum) {
  const Optimum o = nelder_mead([](const Eigen::VectorXd& x) { return std::abs(x[0]) + 1.0; }, Eigen::VectorXd::Zero(1));
  EXPECT_DOUBLE_EQ(o.location[0], 0.0);
  EXPECT_DOUBLE_EQ(o.value, 1.0);
}

TEST(NelderMead, Errors) {
  EXPECT_THROW(nelder_mead([](const Eigen::VectorXd&) { return NAN; }, Eigen::VectorXd::Zero(2)), Error);
  EXPECT_THROW(nelder_mead([](const Eigen::VectorXd&) { return 0.0; }, Eigen::VectorXd()), Error);
  NelderMeadOptions few;
  few.max_iter = 3;
  const Optimum o = nelder_mead([](const Eigen::VectorXd& x) { return (x.array() - 30.0).square().sum(); },
                                Eigen::VectorXd::Zero(3), few);
  EXPECT_FALSE(o.converged);
  EXPECT_LE(o.iterations, 3);
}

TEST(NelderMead, ValueMatchesLocation) {
  auto f = [](const Eigen::VectorXd& x) { return std::cosh(x[0] - 1) + x[1] * x[1]; };
  const Optimum o = nelder_mead(f, Eigen::Vector2d(4, -2));
  EXPECT_EQ(o.value, f(o.location));
}

// Random strictly convex quadratics, dimension <= 4.
TEST(NelderMead, ConvexQuadraticProperty) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 4;
    Eigen::MatrixXd b(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) b(i, j) = u(rng);
    const Eigen::MatrixXd a = b * b.transpose() + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd c(dim);
    for (int i = 0; i < dim; ++i) c[i] = u(rng);
    auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) - c.dot(x); };
    const Eigen::VectorXd exact = a.ldlt().solve(c);
    const Optimum o = nelder_mead(f, Eigen::VectorXd::Zero(dim));
    EXPECT_LT((o.location - exact).lpNorm<Eigen::Infinity>(), 1e-4) << "trial " << trial;
  }
}

TEST(BrentRoot, Examples) {
  EXPECT_NEAR(brent_root([](double x) { return x * x - 2; }, 0, 2), std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(brent_root([](double x) { return x; }, -1, 1), 0.0, 1e-12);
  const double r = brent_root([](double x) { return std::log(x / 1e-8); }, 1e-12, 10.0);
  EXPECT_NEAR(r, 1e-8, 1e-12);
  EXPECT_THROW(brent_root([](double x) { return x * x + 1; }, -1, 1), Error);
}

TEST(BrentRoot, BracketingProperty) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double root = u(rng), slope = 0.1 + std::abs(u(rng));
    auto f = [&](double x) { return std::tanh(slope * (x - root)) + 0.01 * (x - root) * (x - root) * (x - root); };
    const double tol = 1e-12 * std::max(1.0, std::abs(root));
    const double r = brent_root(f, -10, 10);
    EXPECT_TRUE(std::abs(f(r)) < 1e-10 || (f(r - tol) > 0) != (f(r + tol) > 0)) << trial;
  }
}

TEST(HessianCentral, Quadratic) {
  Eigen::Matrix3d a;
  a << 4, 1, -2, 1, 3, 0.5, -2, 0.5, 6;
  auto f = [&](const Eigen::VectorXd& x) { return x.dot(a * x); };
  for (const Eigen::Vector3d x : {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1.5, -2, 3), Eigen::Vector3d(40, -7, 12)}) {
    const Eigen::MatrixXd h = hessian_central(f, x);
    EXPECT_LT((h - 2 * a).cwiseAbs().maxCoeff() / (2 * a).cwiseAbs().maxCoeff(), 1e-5) << x.transpose();
    EXPECT_EQ((h - h.transpose()).norm(), 0.0);
  }
}

TEST(HessianCentral, Examples) {
  auto s = [](const Eigen::VectorXd& x) { return std::sin(x[0]); };
  EXPECT_NEAR(hessian_central(s, Eigen::VectorXd::Zero(1))(0, 0), 0.0, 1e-6);
  auto xy = [](const Eigen::VectorXd& x) { return x[0] * x[1]; };
  const Eigen::MatrixXd h = hessian_central(xy, Eigen::Vector2d(0.3, -1.7));
  EXPECT_NEAR(h(0, 1), 1.0, 1e-6);
  EXPECT_NEAR(h(1, 0), 1.0, 1e-6);
  EXPECT_NEAR(h(0, 0), 0.0, 1e-6);
  EXPECT_NEAR(h(1, 1), 0.0, 1e-6);
  auto logs = [](const Eigen::VectorXd& x) { return std::log(x[0]); };
  EXPECT_NEAR(hessian_central(logs, Eigen::VectorXd::Constant(1, 2.0))(0, 0), -0.25, 1e-7);
  EXPECT_THROW(hessian_central(logs, Eigen::VectorXd::Zero(1)), Error);
}

TEST(SpecialFunctions, LogGamma) {
  EXPECT_EQ(log_gamma(1.0), 0.0);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(M_PI), 1e-15);
  EXPECT_NEAR(log_gamma(10.0), std::log(362880.0), 1e-13);
  EXPECT_THROW(log_gamma(0.0), Error);
  EXPECT_THROW(log_gamma(-1.5), Error);
}

TEST(SpecialFunctions, LogSumExp) {
  EXPECT_NEAR(log_sum_exp(Eigen::Vector2d(0, 0)), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_sum_exp(Eigen::Vector2d(-1000, -1000.5)), -1000 + std::log1p(std::exp(-0.5)), 1e-12);
  EXPECT_NEAR(log_sum_exp(Eigen::Vector2d(-999.526, -1e308)), -999.526, 1e-12);
  EXPECT_NEAR(log_sum_exp(Eigen::Vector3d(700, 700, -1e308)), 700 + std::log(2.0), 1e-12);
  EXPECT_THROW(log_sum_exp(Eigen::VectorXd()), Error);
}

}  // namespace
}  // namespace slgf
