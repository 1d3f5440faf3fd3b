#include "slgf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "slgf/error.hpp"

namespace slgf {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;

  void sort() {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> p;
    std::vector<double> v;
    for (auto i : order) {
      p.push_back(points[i]);
      v.push_back(values[i]);
    }
    points = std::move(p);
    values = std::move(v);
  }
};

// Non-finite trial values count as +inf so the simplex backs away from them.
double guarded(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Simplex initial_simplex(const Objective& f, const Eigen::VectorXd& start, double start_value) {
  const auto n = start.size();
  Simplex s;
  s.points.push_back(start);
  s.values.push_back(start_value);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = start;
    p[i] += 0.1 * std::max(1.0, std::abs(start[i]));
    s.points.push_back(p);
    s.values.push_back(guarded(f, p));
  }
  return s;
}

// One Nelder-Mead run; returns true on convergence.
bool run(const Objective& f, Simplex& s, double tol, int max_iter, int& iterations) {
  constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;
  const std::size_t n = s.points.size() - 1;
  s.sort();
  while (true) {
    if (s.values[n] - s.values[0] < tol) return true;
    if (iterations >= max_iter) return false;
    ++iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(s.points[0].size());
    for (std::size_t i = 0; i < n; ++i) centroid += s.points[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + reflect * (centroid - s.points[n]);
    const double fr = guarded(f, xr);
    if (fr < s.values[0]) {
      const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
      const double fe = guarded(f, xe);
      if (fe < fr) {
        s.points[n] = xe;
        s.values[n] = fe;
      } else {
        s.points[n] = xr;
        s.values[n] = fr;
      }
    } else if (fr < s.values[n - 1]) {
      s.points[n] = xr;
      s.values[n] = fr;
    } else {
      const bool outside = fr < s.values[n];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                         : Eigen::VectorXd(centroid + contract * (s.points[n] - centroid));
      const double fc = guarded(f, xc);
      if (fc < (outside ? fr : s.values[n])) {
        s.points[n] = xc;
        s.values[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s.points[i] = s.points[0] + shrink * (s.points[i] - s.points[0]);
          s.values[i] = guarded(f, s.points[i]);
        }
      }
    }
    s.sort();
  }
}

}  // namespace

Optimum nelder_mead(const Objective& f, const Eigen::VectorXd& start, const NelderMeadOptions& options) {
  if (start.size() < 1) throw Error(ErrorCode::BadStart, "nelder_mead: empty start vector");
  const double f0 = f(start);
  if (!std::isfinite(f0)) throw Error(ErrorCode::BadStart, "nelder_mead: objective is not finite at the start");
  const int max_iter = options.max_iter > 0 ? options.max_iter : 5000 * static_cast<int>(start.size());

  Optimum best;
  best.location = start;
  best.value = f0;
  Simplex s = initial_simplex(f, start, f0);
  bool converged = run(f, s, options.tol, max_iter, best.iterations);
  for (int r = 0; converged && r < options.restarts; ++r) {
    const double before = s.values[0];
    s = initial_simplex(f, s.points[0], s.values[0]);
    converged = run(f, s, options.tol, max_iter, best.iterations);
    if (before - s.values[0] < options.tol) break;
  }
  best.location = s.points[0];
  best.value = s.values[0];
  best.converged = converged;
  return best;
}

double brent_root(const ScalarFunction& f, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0) == (fb > 0)) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    throw Error(ErrorCode::BracketFailure, "brent_root: f(" + std::to_string(lo) + ") and f(" +
                                               std::to_string(hi) + ") do not bracket a root");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 1000; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * (tol > 0.0 ? tol : 1e-12 * std::max(1.0, std::abs(b)));
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (m > 0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb)) throw Error(ErrorCode::BracketFailure, "brent_root: non-finite value inside bracket");
  }
  return b;
}

Eigen::MatrixXd hessian_central(const Objective& f, const Eigen::VectorXd& x) {
  const auto n = x.size();
  auto eval = [&](const Eigen::VectorXd& p) {
    const double v = f(p);
    if (!std::isfinite(v)) throw Error(ErrorCode::StencilFailure, "hessian_central: non-finite value on stencil");
    return v;
  };
  const double f0 = eval(x);
  const double base = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  Eigen::VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = base * std::max(1.0, std::abs(x[i]));

  auto differences = [&](double scale) {
    Eigen::MatrixXd h(n, n);
    const Eigen::VectorXd s = step * scale;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd p = x, m = x;
      p[i] += s[i];
      m[i] -= s[i];
      h(i, i) = (eval(p) - 2.0 * f0 + eval(m)) / (s[i] * s[i]);
      for (Eigen::Index j = 0; j < i; ++j) {
        Eigen::VectorXd pp = p, pm = p, mp = m, mm = m;
        pp[j] += s[j];
        pm[j] -= s[j];
        mp[j] += s[j];
        mm[j] -= s[j];
        h(i, j) = h(j, i) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * s[i] * s[j]);
      }
    }
    return h;
  };
  const Eigen::MatrixXd coarse = differences(1.0);
  const Eigen::MatrixXd fine = differences(0.5);
  const Eigen::MatrixXd h = (4.0 * fine - coarse) / 3.0;
  return 0.5 * (h + h.transpose());
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "log_gamma: argument must be positive");
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // re-entrant; std::lgamma writes signgam
#else
  return std::lgamma(x);
#endif
}

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) throw Error(ErrorCode::DomainError, "log_sum_exp: empty input");
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.array() - top).exp().sum());
}

}  // namespace slgf
