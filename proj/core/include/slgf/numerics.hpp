#ifndef SLGF_NUMERICS_HPP
#define SLGF_NUMERICS_HPP

#include <functional>

#include <Eigen/Dense>

namespace slgf {

using Objective = std::function<double(const Eigen::VectorXd&)>;
using ScalarFunction = std::function<double(double)>;

struct Optimum {
  Eigen::VectorXd location;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct NelderMeadOptions {
  double tol = 1e-10;  // on max - min of the simplex values
  int max_iter = 0;    // 0 means 5000 * dimension
  int restarts = 3;    // fresh simplex around the optimum after convergence
};

// Minimizes f. Throws BadStart when f(start) is not finite. Running out of
// iterations returns converged = false.
Optimum nelder_mead(const Objective& f, const Eigen::VectorXd& start,
                    const NelderMeadOptions& options = {});

// Brent's method on [lo, hi]. The default tolerance is 1e-12 * max(1, |x|).
// Throws BracketFailure when f(lo) and f(hi) share a sign.
double brent_root(const ScalarFunction& f, double lo, double hi, double tol = 0.0);

// Central second differences with one Richardson step, symmetrized.
// Throws StencilFailure on a non-finite evaluation.
Eigen::MatrixXd hessian_central(const Objective& f, const Eigen::VectorXd& x);

// Throws DomainError for x <= 0.
double log_gamma(double x);

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace slgf

#endif  // SLGF_NUMERICS_HPP
