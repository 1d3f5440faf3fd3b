#include "slgf/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "slgf/error.hpp"
#include "slgf/model_space.hpp"
#include "slgf/numerics.hpp"

namespace slgf {

std::vector<RankedModel> compute_posteriors(const std::vector<MarginalEvaluation>& evaluations,
                                            const ModelSpace& space) {
  if (evaluations.size() != space.models.size() || evaluations.empty()) {
    throw Error(ErrorCode::ConfigError, "one evaluation per model is required");
  }
  const auto n = static_cast<Eigen::Index>(evaluations.size());
  Eigen::VectorXd log_marginal(n), log_weight(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = evaluations[static_cast<std::size_t>(i)];
    if (!e.stable) {
      throw Error(ErrorCode::ConfigError,
                  "model " + std::to_string(i + 1) + " has an unstable marginal likelihood: " + e.reason);
    }
    log_marginal[i] = e.log_qb;
  }
  const Eigen::VectorXd shifted = log_marginal.array() - log_marginal.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    log_weight[i] = shifted[i] + std::log(space.models[static_cast<std::size_t>(i)].prior);
  }
  const double total = log_sum_exp(log_weight);

  std::vector<RankedModel> out;
  out.reserve(evaluations.size());
  for (std::size_t i = 0; i < space.models.size(); ++i) {
    const auto& m = space.models[i];
    const auto& cls = space.class_of(m);
    RankedModel r;
    r.model_index = m.model_index;
    r.formula = cls.formula.text;
    r.heteroscedastic = cls.heteroscedastic;
    if (m.scheme_beta) r.scheme_beta = m.scheme_beta->label();
    if (m.scheme_sigma) r.scheme_sigma = m.scheme_sigma->label();
    r.log_marginal = log_marginal[static_cast<Eigen::Index>(i)];
    r.prior = m.prior;
    r.posterior = std::exp(log_weight[static_cast<Eigen::Index>(i)] - total);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedModel& a, const RankedModel& b) { return a.posterior > b.posterior; });
  double running = 0.0;
  for (auto& r : out) {
    running += r.posterior;
    r.cumulative = running;
  }
  return out;
}

namespace {

std::vector<SchemeProbability> aggregate(const std::vector<RankedModel>& ranked,
                                         const std::string RankedModel::*field) {
  std::vector<const RankedModel*> by_index;
  for (const auto& r : ranked) by_index.push_back(&r);
  std::sort(by_index.begin(), by_index.end(),
            [](const RankedModel* a, const RankedModel* b) { return a->model_index < b->model_index; });
  std::vector<SchemeProbability> out;
  std::map<std::string, std::size_t> slot;
  for (const RankedModel* r : by_index) {
    const std::string& key = r->*field;
    auto [it, inserted] = slot.try_emplace(key, out.size());
    if (inserted) out.push_back({key, 0.0});
    out[it->second].probability += r->posterior;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SchemeProbability& a, const SchemeProbability& b) { return a.probability > b.probability; });
  return out;
}

}  // namespace

std::pair<std::vector<SchemeProbability>, std::vector<SchemeProbability>> aggregate_scheme_probabilities(
    const std::vector<RankedModel>& ranked) {
  return {aggregate(ranked, &RankedModel::scheme_beta), aggregate(ranked, &RankedModel::scheme_sigma)};
}

ModelEstimates map_estimates(const CandidateModel& model, const MarginalEvaluation& evaluation,
                             const RegressionSummary& fit) {
  ModelEstimates out;
  out.model_index = model.model_index;
  out.coefficient_labels = fit.labels;
  out.coefficients = fit.coefficients;
  if (model.scheme_sigma && evaluation.map_variances.size() == 2) {
    for (int k = 0; k < 2; ++k) {
      out.variances.emplace_back(model.scheme_sigma->group_label(k),
                                 evaluation.map_variances[static_cast<std::size_t>(k)]);
    }
  } else if (!evaluation.map_variances.empty()) {
    out.variances.emplace_back("sigma2", evaluation.map_variances.front());
  }
  out.g = evaluation.map_g;
  return out;
}

SelectionReport run_selection(const ModelSpace& space, const Dataset& data, const FbfConfig& config,
                              unsigned threads) {
  const EvaluationRun run = evaluate_all(space, data, config, threads);
  SelectionReport report;
  report.models = compute_posteriors(run.evaluations, space);
  std::tie(report.scheme_probabilities_beta, report.scheme_probabilities_sigma) =
      aggregate_scheme_probabilities(report.models);
  for (std::size_t i = 0; i < space.models.size(); ++i) {
    report.estimates.push_back(map_estimates(space.models[i], run.evaluations[i], run.models[i].fit));
  }
  report.m0 = run.m0;
  report.b = run.b;
  return report;
}

}  // namespace slgf
