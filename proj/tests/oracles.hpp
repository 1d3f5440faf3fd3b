#ifndef SLGF_TESTS_ORACLES_HPP
#define SLGF_TESTS_ORACLES_HPP

// Brute-force quadrature references for the fractional marginal likelihood.
// Everything here works on dense N x N covariance matrices and shares no code
// with the library's sufficient-statistic evaluations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace slgf::oracle {

inline constexpr double kLog2Pi = 1.8378770664093454836;

struct Problem {
  Eigen::MatrixXd x;  // intercept first, full column rank
  Eigen::VectorXd y;
  std::vector<int> groups;
};

// Intercept plus p_full - 1 standard normal covariates; group 1 holds the last
// n1 rows unless shuffled.
inline Problem random_problem(std::mt19937_64& rng, int n, int p_full, int n1, bool shuffle) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  Problem pr;
  pr.x.resize(n, p_full);
  pr.x.col(0).setOnes();
  for (int j = 1; j < p_full; ++j)
    for (int i = 0; i < n; ++i) pr.x(i, j) = z(rng);
  pr.groups.assign(static_cast<std::size_t>(n), 0);
  for (int i = n - n1; i < n; ++i) pr.groups[static_cast<std::size_t>(i)] = 1;
  if (shuffle) std::shuffle(pr.groups.begin(), pr.groups.end(), rng);
  const double sd0 = u(rng), sd1 = u(rng);
  Eigen::VectorXd beta(p_full);
  for (int j = 0; j < p_full; ++j) beta[j] = z(rng);
  pr.y = pr.x * beta;
  for (int i = 0; i < n; ++i) pr.y[i] += (pr.groups[static_cast<std::size_t>(i)] ? sd1 : sd0) * z(rng);
  return pr;
}

// log ∫ N(y | 1 a + X_rest beta, (b Phi)^-1) N(beta | 0, G) da dbeta, with a flat
// measure on a. Covariance C = (b Phi)^-1 + X_rest G X_rest'.
inline double log_gaussian_marginal(const Eigen::VectorXd& y, const Eigen::MatrixXd& x_rest,
                                    const Eigen::MatrixXd& g_cov, const Eigen::VectorXd& precision, double b) {
  const auto n = y.size();
  Eigen::MatrixXd c = (1.0 / (b * precision.array())).matrix().asDiagonal();
  if (x_rest.cols() > 0) c += x_rest * g_cov * x_rest.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd ci1 = llt.solve(ones), ciy = llt.solve(y);
  const double s11 = ones.dot(ci1), s1y = ones.dot(ciy), syy = y.dot(ciy);
  return -0.5 * static_cast<double>(n - 1) * kLog2Pi - 0.5 * log_det - 0.5 * std::log(s11) -
         0.5 * (syy - s1y * s1y / s11);
}

// log of the b-powered likelihood divided by the normal density it is
// proportional to: L^b = const * N(y | mean, (b Phi)^-1).
inline double log_power_constant(const Eigen::VectorXd& precision, double b) {
  const double n = static_cast<double>(precision.size());
  const double sum_log = precision.array().log().sum();
  return 0.5 * n * (1.0 - b) * kLog2Pi - 0.5 * n * std::log(b) + 0.5 * (b - 1.0) * sum_log;
}

// log ∫ exp(f) over a box by the composite trapezoid rule on a tensor grid.
// Returns NaN when the box edges carry non-negligible mass.
inline double log_grid_integral(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, const std::vector<int>& points) {
  const auto d = lo.size();
  std::vector<double> values;
  std::vector<bool> edge;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd h(d), x(d);
  for (Eigen::Index k = 0; k < d; ++k) h[k] = (hi[k] - lo[k]) / (points[static_cast<std::size_t>(k)] - 1);
  double weight_log = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) weight_log += std::log(h[k]);
  while (true) {
    bool on_edge = false;
    for (Eigen::Index k = 0; k < d; ++k) {
      const int i = idx[static_cast<std::size_t>(k)];
      x[k] = lo[k] + i * h[k];
      on_edge = on_edge || i == 0 || i == points[static_cast<std::size_t>(k)] - 1;
    }
    values.push_back(f(x));
    edge.push_back(on_edge);
    Eigen::Index k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == points[static_cast<std::size_t>(k)]) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0, edge_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += std::exp(values[i] - top);
    if (edge[i]) edge_max = std::max(edge_max, values[i]);
  }
  if (edge_max > top - 15.0) return std::numeric_limits<double>::quiet_NaN();
  return top + std::log(sum) + weight_log;
}

// Coarse search for the argmax of f on a grid, used to centre a fine grid.
inline Eigen::VectorXd coarse_argmax(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& hi, double step) {
  const auto d = lo.size();
  Eigen::VectorXd best = lo, x = lo;
  double best_value = -std::numeric_limits<double>::infinity();
  std::function<void(Eigen::Index)> walk = [&](Eigen::Index k) {
    if (k == d) {
      const double v = f(x);
      if (v > best_value) {
        best_value = v;
        best = x;
      }
      return;
    }
    for (double t = lo[k]; t <= hi[k] + 1e-12; t += step) {
      x[k] = t;
      walk(k + 1);
    }
  };
  walk(0);
  return best;
}

inline Eigen::VectorXd precision_of(const std::vector<int>& groups, double gamma0, double gamma1) {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t i = 0; i < groups.size(); ++i) phi[static_cast<Eigen::Index>(i)] = std::exp(groups[i] ? gamma1 : gamma0);
  return phi;
}

// Flat prior on (intercept, coefficients), d gamma per log precision.
// Coefficients integrated through the dense normal form.
inline double flat_log_integrand(const Problem& pr, const Eigen::VectorXd& precision, double b) {
  const Eigen::MatrixXd xtwx = pr.x.transpose() * precision.asDiagonal() * pr.x;
  const Eigen::LLT<Eigen::MatrixXd> llt(xtwx);
  const Eigen::VectorXd beta = llt.solve(pr.x.transpose() * precision.asDiagonal() * pr.y);
  const Eigen::VectorXd r = pr.y - pr.x * beta;
  const double rss = r.dot(precision.asDiagonal() * r);
  const double p = static_cast<double>(pr.x.cols());
  const double n = static_cast<double>(pr.y.size());
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * n * b * kLog2Pi + 0.5 * b * precision.array().log().sum() + 0.5 * p * kLog2Pi -
         0.5 * p * std::log(b) - 0.5 * log_det - 0.5 * b * rss;
}

inline double flat_hom(const Problem& pr, double b) {
  auto side = [&](double bb) {
    auto f = [&](double gamma) {
      return flat_log_integrand(pr, Eigen::VectorXd::Constant(pr.y.size(), std::exp(gamma)), bb);
    };
    double centre = -20.0, best = -std::numeric_limits<double>::infinity();
    for (double t = -20.0; t <= 20.0; t += 0.05) {
      if (f(t) > best) {
        best = f(t);
        centre = t;
      }
    }
    const double top = f(centre);
    auto g = [&](double t) { return std::exp(f(t) - top); };
    return top + std::log(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, centre - 40.0, centre + 40.0,
                                                                                          15, 1e-13));
  };
  return side(1.0) - side(b);
}

// 200 x 200 trapezoid grid over gamma in [-20, 20]^2.
inline double flat_het(const Problem& pr, double b, int points = 200) {
  auto side = [&](double bb) {
    auto f = [&](const Eigen::VectorXd& g) { return flat_log_integrand(pr, precision_of(pr.groups, g[0], g[1]), bb); };
    return log_grid_integral(f, Eigen::Vector2d(-20, -20), Eigen::Vector2d(20, 20), {points, points});
  };
  return side(1.0) - side(b);
}

// Zellner-Siow: beta_rest | g, Phi ~ N(0, g (X_rest' W X_rest)^-1) with the
// precision-weighted centring W; g ~ InvGamma(1/2, N/2).
inline double zs_log_integrand(const Problem& pr, const Eigen::VectorXd& precision, double u, double b) {
  const auto n = pr.y.size();
  const Eigen::MatrixXd x_rest = pr.x.rightCols(pr.x.cols() - 1);
  Eigen::MatrixXd g_cov(0, 0);
  double log_prior = 0.0;
  if (x_rest.cols() > 0) {
    const double s = precision.sum();
    const Eigen::MatrixXd w =
        Eigen::MatrixXd(precision.asDiagonal()) - precision * precision.transpose() / s;
    const Eigen::MatrixXd m = x_rest.transpose() * w * x_rest;
    g_cov = std::exp(u) * m.inverse();
    const double nn = static_cast<double>(n);
    log_prior = 0.5 * std::log(nn / 2.0) - std::lgamma(0.5) - 1.5 * u - nn / (2.0 * std::exp(u)) + u;
  }
  return log_power_constant(precision, b) + log_gaussian_marginal(pr.y, x_rest, g_cov, precision, b) + log_prior;
}

namespace detail {
inline double zs_side(const Problem& pr, double bb, bool het, double step) {
  const bool has_g = pr.x.cols() > 1;
  const auto n = pr.y.size();
  auto f = [&](const Eigen::VectorXd& t) {
    const Eigen::VectorXd phi = het ? precision_of(pr.groups, t[0], t[1]) : Eigen::VectorXd::Constant(n, std::exp(t[0]));
    const double u = has_g ? t[het ? 2 : 1] : 0.0;
    return zs_log_integrand(pr, phi, u, bb);
  };
  const int dg = het ? 2 : 1;
  const int d = dg + (has_g ? 1 : 0);
  Eigen::VectorXd lo(d), hi(d);
  lo.head(dg).setConstant(-15);
  hi.head(dg).setConstant(15);
  if (has_g) {
    lo[dg] = -8;
    hi[dg] = 30;
  }
  const Eigen::VectorXd centre = coarse_argmax(f, lo, hi, 1.0);
  // Log precisions decay slowly towards -inf (rate b n / 2) and doubly
  // exponentially towards +inf; log g decays slowly towards +inf.
  std::vector<int> points;
  for (int k = 0; k < dg; ++k) {
    lo[k] = centre[k] - 12;
    hi[k] = centre[k] + 6;
    points.push_back(static_cast<int>(std::lround(18 / step)) + 1);
  }
  if (has_g) {
    lo[dg] = centre[dg] - 6;
    hi[dg] = centre[dg] + 30;
    points.push_back(static_cast<int>(std::lround(36 / step)) + 1);
  }
  return log_grid_integral(f, lo, hi, points);
}
}  // namespace detail

inline double zs_hom(const Problem& pr, double b, double step = 0.1) {
  return detail::zs_side(pr, 1.0, false, step) - detail::zs_side(pr, b, false, step);
}

inline double zs_het(const Problem& pr, double b, double step = 0.3) {
  return detail::zs_side(pr, 1.0, true, step) - detail::zs_side(pr, b, true, step);
}

// One-dimensional reference for the homoscedastic Zellner-Siow path from the
// closed-form powered marginal given g (numbers only, no design).
inline double zs_hom_from_r2(double n, double p, double r2, double sst, double b) {
  auto side = [&](double bb) {
    const double big = 0.5 * (n * bb - 1.0), small = 0.5 * (n * bb - 1.0 - p);
    auto f = [&](double u) {
      const double g = std::exp(u);
      return std::lgamma(big) - big * (std::log(M_PI) + std::log(bb * sst)) - 0.5 * std::log(bb * n) +
             small * std::log1p(bb * g) - big * std::log1p(bb * g * (1.0 - r2)) + 0.5 * std::log(n / 2.0) -
             std::lgamma(0.5) - 1.5 * u - n / (2.0 * g) + u;
    };
    double centre = 0.0, best = -std::numeric_limits<double>::infinity();
    for (double u = -15; u <= 40; u += 0.01) {
      if (f(u) > best) {
        best = f(u);
        centre = u;
      }
    }
    auto g = [&](double u) { return std::exp(f(u) - best); };
    return best + std::log(boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, centre - 30.0, centre + 80.0,
                                                                                         20, 1e-13));
  };
  return side(1.0) - side(b);
}

}  // namespace slgf::oracle

#endif  // SLGF_TESTS_ORACLES_HPP
