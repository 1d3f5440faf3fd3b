#include "slgf/model_space.hpp"

#include <algorithm>

#include "slgf/error.hpp"
#include "slgf/tabular.hpp"

namespace slgf {

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

std::vector<GroupingScheme> schemes_for(const Dataset& data, const std::string& factor, int min_levels,
                                        const char* flag, const char* min_flag) {
  if (!data.has_column(factor)) config_error(std::string(flag) + ": no column named '" + factor + "'");
  const Column& c = data.column(factor);
  if (!c.is_factor()) config_error(std::string(flag) + ": column '" + factor + "' is not a factor");
  try {
    return enumerate_schemes(factor, c.levels(), min_levels);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidMinLevels) throw;
    throw Error(ErrorCode::InvalidMinLevels, std::string(min_flag) + ": " + e.what());
  }
}

}  // namespace

ModelSpace build_model_space(const ModelSpaceConfig& config, const Dataset& data) {
  if (config.formulas.empty()) config_error("at least one model formula is required");
  if (config.het.size() != config.formulas.size()) {
    config_error("het has " + std::to_string(config.het.size()) + " entries but there are " +
                 std::to_string(config.formulas.size()) + " formulas");
  }
  if (config.same_scheme) {
    if (!config.lgf_beta || !config.lgf_sigma || *config.lgf_beta != *config.lgf_sigma) {
      config_error("same_scheme requires lgf_beta and lgf_sigma to name the same factor (got '" +
                   config.lgf_beta.value_or("") + "' and '" + config.lgf_sigma.value_or("") + "')");
    }
  }

  std::vector<TermList> formulas;
  for (std::size_t i = 0; i < config.formulas.size(); ++i) {
    TermList t = parse_formula(config.formulas[i]);
    if (t.response != data.response_name()) {
      config_error("formula '" + t.text + "' models '" + t.response + "' but the response is '" +
                   data.response_name() + "'");
    }
    for (const Term& term : t.terms) {
      for (const auto& v : term.variables) {
        if (v != kGroupToken && !data.has_column(v)) {
          throw Error(ErrorCode::NamedColumnAbsent,
                      "formula '" + t.text + "' refers to unknown column '" + v + "'");
        }
      }
    }
    if (t.uses_group && !config.lgf_beta) {
      config_error("formula '" + t.text + "' uses 'group' but lgf_beta is not set");
    }
    if (config.het[i] != 0 && config.het[i] != 1) config_error("het flags must be 0 or 1");
    if (config.het[i] == 1 && !config.lgf_sigma) {
      config_error("formula '" + t.text + "' is marked heteroscedastic but lgf_sigma is not set");
    }
    for (const auto& previous : formulas) {
      if (previous.terms.size() == t.terms.size() &&
          std::is_permutation(previous.terms.begin(), previous.terms.end(), t.terms.begin())) {
        config_error("formulas '" + previous.text + "' and '" + t.text + "' describe the same model");
      }
    }
    formulas.push_back(std::move(t));
  }

  const bool any_group = std::any_of(formulas.begin(), formulas.end(), [](const TermList& t) { return t.uses_group; });
  const bool any_het = std::any_of(config.het.begin(), config.het.end(), [](int h) { return h == 1; });

  std::vector<GroupingScheme> beta_schemes, sigma_schemes, shared_schemes;
  if (any_group) beta_schemes = schemes_for(data, *config.lgf_beta, config.min_levels_beta, "lgf_beta", "min_levels_beta");
  if (any_het) sigma_schemes = schemes_for(data, *config.lgf_sigma, config.min_levels_sigma, "lgf_sigma", "min_levels_sigma");
  if (config.same_scheme && any_group && any_het) {
    shared_schemes = schemes_for(data, *config.lgf_beta,
                                 std::max(config.min_levels_beta, config.min_levels_sigma), "lgf_beta",
                                 config.min_levels_beta >= config.min_levels_sigma ? "min_levels_beta" : "min_levels_sigma");
  }

  ModelSpace space;
  space.config = config;
  std::vector<std::vector<CandidateModel>> per_class;

  auto add_class = [&](const TermList& formula, bool het) {
    ModelClass c;
    c.class_id = static_cast<int>(space.classes.size()) + 1;
    c.formula = formula;
    c.heteroscedastic = het;

    std::vector<CandidateModel> models;
    auto model = [&](std::optional<GroupingScheme> beta, std::optional<GroupingScheme> sigma) {
      CandidateModel m;
      m.class_id = c.class_id;
      m.scheme_beta = std::move(beta);
      m.scheme_sigma = std::move(sigma);
      models.push_back(std::move(m));
    };
    if (!formula.uses_group && !het) {
      model(std::nullopt, std::nullopt);
    } else if (formula.uses_group && !het) {
      for (const auto& s : beta_schemes) model(s, std::nullopt);
    } else if (!formula.uses_group && het) {
      for (const auto& s : sigma_schemes) model(std::nullopt, s);
    } else if (config.same_scheme) {
      for (const auto& s : shared_schemes) model(s, s);
    } else {
      for (const auto& sigma : sigma_schemes) {
        for (const auto& beta : beta_schemes) model(beta, sigma);
      }
    }
    space.classes.push_back(std::move(c));
    per_class.push_back(std::move(models));
  };

  for (std::size_t i = 0; i < formulas.size(); ++i) {
    add_class(formulas[i], false);
    if (config.het[i] == 1) add_class(formulas[i], true);
  }

  const double class_prior = 1.0 / static_cast<double>(space.classes.size());
  for (auto& models : per_class) {
    const double prior = class_prior / static_cast<double>(models.size());
    for (auto& m : models) {
      m.prior = prior;
      m.model_index = static_cast<int>(space.models.size()) + 1;
      space.models.push_back(std::move(m));
    }
  }
  return space;
}

}  // namespace slgf
