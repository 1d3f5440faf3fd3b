#ifndef SLGF_MODEL_SPACE_HPP
#define SLGF_MODEL_SPACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "slgf/formula.hpp"
#include "slgf/scheme.hpp"

namespace slgf {

class Dataset;

struct ModelSpaceConfig {
  std::vector<std::string> formulas;
  std::vector<int> het;  // 1 adds a group-based variance class for the formula
  std::optional<std::string> lgf_beta;
  std::optional<std::string> lgf_sigma;
  bool same_scheme = false;
  int min_levels_beta = 1;
  int min_levels_sigma = 1;
};

struct ModelClass {
  int class_id = 0;  // 1-based
  TermList formula;
  bool heteroscedastic = false;
};

struct CandidateModel {
  int model_index = 0;  // 1-based position in ModelSpace::models
  int class_id = 0;
  std::optional<GroupingScheme> scheme_beta;
  std::optional<GroupingScheme> scheme_sigma;
  double prior = 0.0;
};

struct ModelSpace {
  std::vector<ModelClass> classes;
  std::vector<CandidateModel> models;
  ModelSpaceConfig config;

  const ModelClass& class_of(const CandidateModel& m) const {
    return classes.at(static_cast<std::size_t>(m.class_id - 1));
  }
};

// Classes follow the user's formula order, homoscedastic before
// heteroscedastic. With distinct regression and variance schemes a class holds
// the cross product, variance scheme outermost. Each class gets prior
// 1/|classes|, split evenly across its models. Throws ConfigError.
ModelSpace build_model_space(const ModelSpaceConfig& config, const Dataset& data);

}  // namespace slgf

#endif  // SLGF_MODEL_SPACE_HPP
