#ifndef SLGF_POSTERIOR_HPP
#define SLGF_POSTERIOR_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slgf/marginal.hpp"

namespace slgf {

struct ModelSpace;
struct CandidateModel;

inline constexpr const char* kNoScheme = "None";

struct RankedModel {
  int model_index = 0;
  std::string formula;
  bool heteroscedastic = false;
  std::string scheme_beta = kNoScheme;
  std::string scheme_sigma = kNoScheme;
  double log_marginal = 0.0;  // log q^b before max-rescaling
  double prior = 0.0;
  double posterior = 0.0;
  double cumulative = 0.0;
};

struct SchemeProbability {
  std::string scheme;
  double probability = 0.0;
};

struct ModelEstimates {
  int model_index = 0;
  std::vector<std::string> coefficient_labels;
  std::vector<std::optional<double>> coefficients;  // nullopt for aliased columns
  std::vector<std::pair<std::string, double>> variances;
  std::optional<double> g;
};

struct SelectionReport {
  std::vector<RankedModel> models;  // descending posterior, ties by model index
  std::vector<SchemeProbability> scheme_probabilities_beta;
  std::vector<SchemeProbability> scheme_probabilities_sigma;
  std::vector<ModelEstimates> estimates;  // indexed by model_index - 1
  int m0 = 0;
  double b = 0.0;
};

// Throws ConfigError when an evaluation is unstable.
std::vector<RankedModel> compute_posteriors(const std::vector<MarginalEvaluation>& evaluations,
                                            const ModelSpace& space);

// Posterior mass per regression and per variance scheme, with a "None" row
// for models without one. Sorted by descending probability.
std::pair<std::vector<SchemeProbability>, std::vector<SchemeProbability>> aggregate_scheme_probabilities(
    const std::vector<RankedModel>& ranked);

ModelEstimates map_estimates(const CandidateModel& model, const MarginalEvaluation& evaluation,
                             const RegressionSummary& fit);

// Model space -> marginals -> posteriors -> estimates.
SelectionReport run_selection(const ModelSpace& space, const Dataset& data, const FbfConfig& config,
                              unsigned threads = 0);

}  // namespace slgf

#endif  // SLGF_POSTERIOR_HPP
