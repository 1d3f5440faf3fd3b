#ifndef SLGF_MARGINAL_HPP
#define SLGF_MARGINAL_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slgf/formula.hpp"

namespace slgf {

class Dataset;
struct ModelSpace;

enum class PriorKind { Flat, ZellnerSiow };

struct FbfConfig {
  int m0 = 1;  // minimal training sample size
  PriorKind prior = PriorKind::Flat;
  std::size_t n = 0;

  double b() const { return static_cast<double>(m0) / static_cast<double>(n); }
};

// Fractional marginal likelihood log q^b(Y | m) of one model.
//
// Modes are on the optimization scale: log precisions per variance group and
// log g. With group-based variances, group k in modes and map_variances is
// group k of the caller's membership vector.
struct MarginalEvaluation {
  double log_qb = 0.0;
  Eigen::VectorXd mode;          // unpowered integrand
  Eigen::VectorXd mode_powered;  // integrand raised to b
  double log_det = 0.0;          // log |negative Hessian| at mode
  double log_det_powered = 0.0;
  std::vector<double> map_variances;
  std::optional<double> map_g;
  bool stable = false;
  std::string reason;  // why an evaluation is unstable
};

// Closed form, flat prior, one variance. Throws DegenerateFit when SSResid = 0.
MarginalEvaluation logq_flat_hom(const RegressionSummary& fit, double b);

// Flat prior, variance groups given as 0/1 per row. 2-D Laplace over the log
// precisions with the coefficients integrated out.
MarginalEvaluation logq_flat_het(const DesignMatrix& design, const Eigen::VectorXd& y,
                                 const std::vector<int>& groups, double b);

// Zellner-Siow prior, one variance: 1-D Laplace over log g. Throws
// DegenerateFit when SSResid = 0.
MarginalEvaluation logq_zs_hom(const RegressionSummary& fit, double b);

// Zellner-Siow prior with variance groups: 3-D Laplace over the two log
// precisions and log g (2-D for intercept-only models).
MarginalEvaluation logq_zs_het(const DesignMatrix& design, const Eigen::VectorXd& y,
                               const std::vector<int>& groups, double b);

// The b-independent pieces of one candidate model.
struct PreparedModel {
  DesignMatrix design;
  Eigen::VectorXd y;
  RegressionSummary fit;
  std::optional<std::vector<int>> variance_groups;
};

PreparedModel prepare_model(const ModelSpace& space, std::size_t model, const Dataset& data);

MarginalEvaluation evaluate_model(const PreparedModel& model, PriorKind prior, double b);

struct EvaluationRun {
  std::vector<PreparedModel> models;
  std::vector<MarginalEvaluation> evaluations;
  int m0 = 0;
  double b = 0.0;
};

// Evaluates every model at a shared b = m0/N. While any model is unstable m0
// grows by one and all models are re-evaluated; m0 = N throws
// TrainingFractionExhausted. threads = 0 uses the hardware concurrency.
EvaluationRun evaluate_all(const ModelSpace& space, const Dataset& data, FbfConfig config,
                           unsigned threads = 0);

}  // namespace slgf

#endif  // SLGF_MARGINAL_HPP
