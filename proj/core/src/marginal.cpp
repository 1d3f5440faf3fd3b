#include "slgf/marginal.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "slgf/error.hpp"
#include "slgf/model_space.hpp"
#include "slgf/numerics.hpp"
#include "slgf/tabular.hpp"

namespace slgf {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;
constexpr double kRankTolerance = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double logistic(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// log pi(g) for g ~ InvGamma(1/2, N/2), plus the log g Jacobian, at u = log g.
double log_g_prior(double u, double n) {
  return 0.5 * std::log(n / 2.0) - 0.5 * kLogPi - 0.5 * u - 0.5 * n * std::exp(-u);
}

MarginalEvaluation unstable(MarginalEvaluation e, std::string reason) {
  e.stable = false;
  e.reason = std::move(reason);
  return e;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

struct Side {
  Eigen::VectorXd mode;
  double log_integral = 0.0;
  double log_det = 0.0;
  std::string failure;  // empty on success
};

// Laplace approximation of log ∫ exp(logf).
Side laplace(const Objective& logf, const Eigen::VectorXd& start) {
  Side side;
  Optimum opt;
  try {
    opt = nelder_mead([&](const Eigen::VectorXd& x) { return -logf(x); }, start);
  } catch (const Error& e) {
    side.failure = e.what();
    return side;
  }
  side.mode = opt.location;
  if (!opt.converged) {
    side.failure = "optimizer did not converge";
    return side;
  }
  Eigen::MatrixXd h;
  try {
    h = -hessian_central(logf, opt.location);
  } catch (const Error& e) {
    side.failure = e.what();
    return side;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    side.failure = "Hessian is not positive definite";
    return side;
  }
  side.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  side.log_integral = -opt.value + 0.5 * static_cast<double>(start.size()) * kLog2Pi - 0.5 * side.log_det;
  if (!std::isfinite(side.log_integral)) side.failure = "non-finite Laplace approximation";
  return side;
}

// Per-group cross products of the kept design (intercept first) and the
// mean-centred response.
struct GroupStats {
  double n = 0.0;
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  double yy = 0.0;
};

struct HetProblem {
  std::array<GroupStats, 2> stats;
  bool flipped = false;  // internal group k is caller group k ^ flipped
  Eigen::Vector2d start_gamma;
  Eigen::Index p_full = 0;
  std::array<Eigen::Index, 2> other_rank{};  // rank of X on the other group's rows
  double n = 0.0;
};

HetProblem het_problem(const DesignMatrix& design, const Eigen::VectorXd& y, const std::vector<int>& groups) {
  const Eigen::MatrixXd x = design.kept();
  const Eigen::Index n = x.rows();
  if (static_cast<std::size_t>(n) != groups.size() || y.size() != n) {
    throw Error(ErrorCode::ConfigError, "variance groups do not match the design rows");
  }
  HetProblem prob;
  prob.flipped = n > 0 && groups.front() == 1;
  prob.p_full = x.cols();
  prob.n = static_cast<double>(n);

  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd resid = yc - x * x.colPivHouseholderQr().solve(yc);

  std::array<std::vector<Eigen::Index>, 2> rows;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int g = groups[static_cast<std::size_t>(i)];
    if (g != 0 && g != 1) throw Error(ErrorCode::ConfigError, "variance group ids must be 0 or 1");
    rows[static_cast<std::size_t>(g ^ static_cast<int>(prob.flipped))].push_back(i);
  }
  const double overall = resid.squaredNorm() / static_cast<double>(n);
  for (std::size_t k = 0; k < 2; ++k) {
    if (rows[k].empty()) throw Error(ErrorCode::DegenerateDesign, "a variance group has no observations");
    const Eigen::MatrixXd xk = x(rows[k], Eigen::all);
    const Eigen::VectorXd yk = yc(rows[k]);
    GroupStats& s = prob.stats[k];
    s.n = static_cast<double>(rows[k].size());
    s.xtx = xk.transpose() * xk;
    s.xty = xk.transpose() * yk;
    s.yy = yk.squaredNorm();

    double var = resid(rows[k]).squaredNorm() / s.n;
    if (!(var > 0.0) || !std::isfinite(var)) var = overall;
    if (!(var > 0.0) || !std::isfinite(var)) var = 1.0;
    prob.start_gamma[static_cast<Eigen::Index>(k)] = -std::log(var);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xk);
    qr.setThreshold(kRankTolerance);
    prob.other_rank[1 - k] = qr.rank();
  }
  return prob;
}

// Back to the caller's group order.
void unflip(MarginalEvaluation& e, const HetProblem& prob) {
  if (!prob.flipped) return;
  auto swap_head = [](Eigen::VectorXd& v) {
    if (v.size() >= 2) std::swap(v[0], v[1]);
  };
  swap_head(e.mode);
  swap_head(e.mode_powered);
  if (e.map_variances.size() == 2) std::swap(e.map_variances[0], e.map_variances[1]);
}

double flat_het_log_integrand(const HetProblem& prob, const Eigen::VectorXd& gamma, double b) {
  const double phi1 = std::exp(gamma[0]), phi2 = std::exp(gamma[1]);
  const auto& s1 = prob.stats[0];
  const auto& s2 = prob.stats[1];
  const Eigen::MatrixXd a = phi1 * s1.xtx + phi2 * s2.xtx;
  const Eigen::VectorXd c = phi1 * s1.xty + phi2 * s2.xty;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double rss = std::max(0.0, phi1 * s1.yy + phi2 * s2.yy - c.dot(llt.solve(c)));
  const double p = static_cast<double>(prob.p_full);
  return 0.5 * (p - prob.n * b) * kLog2Pi - 0.5 * p * std::log(b) + 0.5 * b * (s1.n * gamma[0] + s2.n * gamma[1]) -
         0.5 * log_det - 0.5 * b * rss;
}

double zs_het_log_integrand(const HetProblem& prob, const Eigen::VectorXd& theta, double b) {
  const double phi1 = std::exp(theta[0]), phi2 = std::exp(theta[1]);
  const auto& s1 = prob.stats[0];
  const auto& s2 = prob.stats[1];
  const Eigen::Index p = prob.p_full - 1;
  const double s = s1.n * phi1 + s2.n * phi2;
  const double t = phi1 * s1.xty[0] + phi2 * s2.xty[0];
  double quad = phi1 * s1.yy + phi2 * s2.yy - t * t / s;
  double extra = 0.0;
  if (p > 0) {
    const double u = theta[2];
    const Eigen::VectorXd v = phi1 * s1.xtx.col(0).tail(p) + phi2 * s2.xtx.col(0).tail(p);
    const Eigen::MatrixXd m = phi1 * s1.xtx.bottomRightCorner(p, p) + phi2 * s2.xtx.bottomRightCorner(p, p) -
                              v * v.transpose() / s;
    const Eigen::VectorXd c = phi1 * s1.xty.tail(p) + phi2 * s2.xty.tail(p) - v * (t / s);
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return kNegInf;
    const double explained = c.dot(llt.solve(c));
    quad -= logistic(u + std::log(b)) * explained;
    extra = -0.5 * static_cast<double>(p) * softplus(u + std::log(b)) + log_g_prior(u, prob.n);
  }
  quad = std::max(0.0, quad);
  return -0.5 * (prob.n * b - 1.0) * kLog2Pi - 0.5 * std::log(b * s) +
         0.5 * b * (s1.n * theta[0] + s2.n * theta[1]) - 0.5 * b * quad + extra;
}

void check_fit(const RegressionSummary& fit) {
  if (!(fit.ss_resid > 0.0)) {
    throw Error(ErrorCode::DegenerateFit, "residual sum of squares is zero; the model interpolates the data");
  }
}

}  // namespace

MarginalEvaluation logq_flat_hom(const RegressionSummary& fit, double b) {
  check_fit(fit);
  const double n = static_cast<double>(fit.n);
  const double p = static_cast<double>(fit.p);
  MarginalEvaluation e;
  e.map_variances = {fit.ss_resid / n};
  if (!(n * b > p)) {
    return unstable(std::move(e), "N*b = " + fmt(n * b) + " does not exceed P = " + fmt(p));
  }
  e.log_qb = -0.5 * n * (1.0 - b) * (kLogPi + std::log(fit.ss_resid)) + 0.5 * n * b * std::log(b) +
             log_gamma(0.5 * (n - p)) - log_gamma(0.5 * (n * b - p));
  e.stable = std::isfinite(e.log_qb);
  if (!e.stable) e.reason = "non-finite closed form";
  return e;
}

MarginalEvaluation logq_zs_hom(const RegressionSummary& fit, double b) {
  check_fit(fit);
  const double n = static_cast<double>(fit.n);
  const double p = static_cast<double>(fit.p) - 1.0;
  const double log_1mr2 = std::log(fit.ss_resid / fit.ss_total);
  MarginalEvaluation e;
  if (!(n * b > 1.0)) return unstable(std::move(e), "N*b = " + fmt(n * b) + " does not exceed 1");

  // Powered marginal given g, with g integrated by Laplace on u = log g.
  struct Solve {
    double u = 0.0, log_integral = 0.0, log_det = 0.0;
    std::string failure;
  };
  auto side = [&](double bb) {
    Solve out;
    const double big = 0.5 * (n * bb - 1.0);
    const double small = 0.5 * (n * bb - 1.0 - p);
    const double base = log_gamma(big) - big * (kLogPi + std::log(bb * fit.ss_total)) - 0.5 * std::log(bb * n);
    if (p == 0.0) {
      out.log_integral = base;
      return out;
    }
    const double lb = std::log(bb);
    auto slope = [&](double u) {
      return small * logistic(u + lb) - big * logistic(u + lb + log_1mr2) - 0.5 + 0.5 * n * std::exp(-u);
    };
    const double lo = std::log(1e-8);
    double hi = std::log(1e12);
    while (slope(hi) > 0.0 && hi < 700.0) hi += 10.0;
    try {
      out.u = brent_root(slope, lo, hi);
    } catch (const Error& err) {
      out.failure = err.what();
      return out;
    }
    const double u = out.u;
    const double s1 = logistic(u + lb), s2 = logistic(u + lb + log_1mr2);
    const double curvature = small * s1 * (1.0 - s1) - big * s2 * (1.0 - s2) - 0.5 * n * std::exp(-u);
    if (!(curvature < 0.0)) {
      out.failure = "curvature at the g mode is not negative";
      return out;
    }
    out.log_det = std::log(-curvature);
    const double height = base + small * softplus(u + lb) - big * softplus(u + lb + log_1mr2) + log_g_prior(u, n);
    out.log_integral = height + 0.5 * kLog2Pi - 0.5 * out.log_det;
    if (!std::isfinite(out.log_integral)) out.failure = "non-finite Laplace approximation";
    return out;
  };

  const Solve full = side(1.0);
  const Solve powered = side(b);
  double shrink = 1.0;
  if (p > 0.0) {
    e.mode = Eigen::VectorXd::Constant(1, full.u);
    e.mode_powered = Eigen::VectorXd::Constant(1, powered.u);
    e.log_det = full.log_det;
    e.log_det_powered = powered.log_det;
    const double g = std::exp(full.u);
    e.map_g = g;
    shrink = (1.0 + g * std::exp(log_1mr2)) / (1.0 + g);
  }
  e.map_variances = {fit.ss_total * shrink / (n - 1.0)};
  if (!full.failure.empty()) return unstable(std::move(e), full.failure);
  if (!powered.failure.empty()) return unstable(std::move(e), powered.failure);
  e.log_qb = full.log_integral - powered.log_integral;
  e.stable = std::isfinite(e.log_qb);
  if (!e.stable) e.reason = "non-finite marginal";
  return e;
}

MarginalEvaluation logq_flat_het(const DesignMatrix& design, const Eigen::VectorXd& y,
                                 const std::vector<int>& groups, double b) {
  const HetProblem prob = het_problem(design, y, groups);
  MarginalEvaluation e;
  const auto full = laplace([&](const Eigen::VectorXd& g) { return flat_het_log_integrand(prob, g, 1.0); },
                            prob.start_gamma);
  const auto powered = laplace([&](const Eigen::VectorXd& g) { return flat_het_log_integrand(prob, g, b); },
                               prob.start_gamma);
  e.mode = full.mode;
  e.mode_powered = powered.mode;
  e.log_det = full.log_det;
  e.log_det_powered = powered.log_det;
  if (full.mode.size() == 2) e.map_variances = {std::exp(-full.mode[0]), std::exp(-full.mode[1])};

  std::string failure;
  for (std::size_t k = 0; k < 2 && failure.empty(); ++k) {
    const double deficit = static_cast<double>(prob.p_full - prob.other_rank[k]);
    if (!(b * prob.stats[k].n > deficit)) {
      failure = "b*n for a variance group (" + fmt(b * prob.stats[k].n) + ") does not exceed the rank deficit " +
                fmt(deficit) + " of the other group";
    }
  }
  if (failure.empty()) failure = !full.failure.empty() ? full.failure : powered.failure;
  if (failure.empty()) {
    e.log_qb = full.log_integral - powered.log_integral;
    e.stable = std::isfinite(e.log_qb);
    if (!e.stable) failure = "non-finite marginal";
  }
  e.reason = failure;
  unflip(e, prob);
  return e;
}

MarginalEvaluation logq_zs_het(const DesignMatrix& design, const Eigen::VectorXd& y,
                               const std::vector<int>& groups, double b) {
  const HetProblem prob = het_problem(design, y, groups);
  MarginalEvaluation e;
  const bool has_g = prob.p_full > 1;
  Eigen::VectorXd start(has_g ? 3 : 2);
  start.head(2) = prob.start_gamma;
  if (has_g) start[2] = std::log(prob.n);

  std::string failure;
  if (!(prob.n * b > 1.0)) failure = "N*b = " + fmt(prob.n * b) + " does not exceed 1";
  Side full, powered;
  if (failure.empty()) {
    full = laplace([&](const Eigen::VectorXd& t) { return zs_het_log_integrand(prob, t, 1.0); }, start);
    powered = laplace([&](const Eigen::VectorXd& t) { return zs_het_log_integrand(prob, t, b); }, start);
    failure = !full.failure.empty() ? full.failure : powered.failure;
  }
  e.mode = full.mode;
  e.mode_powered = powered.mode;
  e.log_det = full.log_det;
  e.log_det_powered = powered.log_det;
  if (full.mode.size() >= 2) e.map_variances = {std::exp(-full.mode[0]), std::exp(-full.mode[1])};
  if (has_g && full.mode.size() == 3) e.map_g = std::exp(full.mode[2]);
  if (failure.empty()) {
    e.log_qb = full.log_integral - powered.log_integral;
    e.stable = std::isfinite(e.log_qb);
    if (!e.stable) failure = "non-finite marginal";
  }
  e.reason = failure;
  unflip(e, prob);
  return e;
}

PreparedModel prepare_model(const ModelSpace& space, std::size_t index, const Dataset& data) {
  const CandidateModel& m = space.models.at(index);
  const ModelClass& cls = space.class_of(m);
  PreparedModel out;
  out.design = build_design(data, cls.formula, m.scheme_beta ? &*m.scheme_beta : nullptr);
  out.y = data.response();
  try {
    out.fit = ols_fit(out.design, out.y);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    throw Error(ErrorCode::TrainingFractionExhausted,
                "model " + std::to_string(m.model_index) + " (" + cls.formula.text + "): " + e.what() +
                    "; no training fraction can make it stable");
  }
  if (cls.heteroscedastic) out.variance_groups = m.scheme_sigma->row_groups(data.factor(m.scheme_sigma->factor()));
  return out;
}

MarginalEvaluation evaluate_model(const PreparedModel& model, PriorKind prior, double b) {
  if (model.variance_groups) {
    return prior == PriorKind::Flat ? logq_flat_het(model.design, model.y, *model.variance_groups, b)
                                    : logq_zs_het(model.design, model.y, *model.variance_groups, b);
  }
  return prior == PriorKind::Flat ? logq_flat_hom(model.fit, b) : logq_zs_hom(model.fit, b);
}

namespace {

// Runs task(i) for i in [0, count) on up to `threads` workers; rethrows the
// first failure by index.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

EvaluationRun evaluate_all(const ModelSpace& space, const Dataset& data, FbfConfig config, unsigned threads) {
  const auto n = static_cast<int>(data.rows());
  config.n = data.rows();
  if (config.m0 < 1 || config.m0 > n) {
    throw Error(ErrorCode::ConfigError,
                "m0 = " + std::to_string(config.m0) + " must lie in [1, " + std::to_string(n) + "]");
  }
  EvaluationRun run;
  run.models.resize(space.models.size());
  parallel_for(space.models.size(), threads, [&](std::size_t i) { run.models[i] = prepare_model(space, i, data); });

  run.evaluations.resize(space.models.size());
  for (run.m0 = config.m0; run.m0 < n; ++run.m0) {
    config.m0 = run.m0;
    run.b = config.b();
    parallel_for(space.models.size(), threads,
                 [&](std::size_t i) { run.evaluations[i] = evaluate_model(run.models[i], config.prior, run.b); });
    const bool all_stable = std::all_of(run.evaluations.begin(), run.evaluations.end(),
                                        [](const MarginalEvaluation& e) { return e.stable; });
    if (all_stable) return run;
  }
  std::string detail;
  for (std::size_t i = 0; i < run.evaluations.size(); ++i) {
    if (!run.evaluations[i].stable) {
      const auto& m = space.models[i];
      detail = "model " + std::to_string(m.model_index) + " (" + space.class_of(m).formula.text +
               ") is still unstable: " + run.evaluations[i].reason;
      break;
    }
  }
  throw Error(ErrorCode::TrainingFractionExhausted,
              "m0 reached N = " + std::to_string(n) + " without all models stabilizing" +
                  (detail.empty() ? std::string() : "; " + detail) + ". Specify a different set of models");
}

}  // namespace slgf
