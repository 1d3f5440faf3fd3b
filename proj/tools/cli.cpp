#include "cli.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slgf/error.hpp"
#include "slgf/model_space.hpp"
#include "slgf/tabular.hpp"

namespace slgf::cli {

namespace {

constexpr std::string_view kHetSuffix = ":het";

[[noreturn]] void flag_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

std::string sig7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

// "A*B" names a derived factor when no such column exists.
std::optional<std::pair<std::string, std::string>> split_product(const std::string& name) {
  const auto star = name.find('*');
  if (star == std::string::npos || star == 0 || star + 1 == name.size()) return std::nullopt;
  if (name.find('*', star + 1) != std::string::npos) return std::nullopt;
  return std::make_pair(name.substr(0, star), name.substr(star + 1));
}

std::vector<std::string> header_of(const std::string& path) {
  std::ifstream in(path);
  if (!in) flag_error("--data: cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::vector<std::string> out;
  std::string cell;
  std::istringstream cells(line);
  while (std::getline(cells, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
    out.push_back(cell);
  }
  return out;
}

Dataset load(const RunConfig& c) {
  const auto header = header_of(c.data);
  auto present = [&](const std::string& n) { return std::find(header.begin(), header.end(), n) != header.end(); };

  std::set<std::string> factors(c.factors.begin(), c.factors.end());
  std::vector<std::pair<std::string, std::string>> derived;
  for (const auto& [flag, name] : {std::pair{"--lgf-beta", c.lgf_beta}, std::pair{"--lgf-sigma", c.lgf_sigma}}) {
    if (!name) continue;
    if (present(*name)) {
      factors.insert(*name);
      continue;
    }
    const auto parts = split_product(*name);
    if (!parts || !present(parts->first) || !present(parts->second)) {
      flag_error(std::string(flag) + ": no column named '" + *name + "' in " + c.data);
    }
    factors.insert(parts->first);
    factors.insert(parts->second);
    if (std::find(derived.begin(), derived.end(), *parts) == derived.end()) derived.push_back(*parts);
  }
  for (const auto& f : c.factors) {
    if (!present(f)) flag_error("--factor: no column named '" + f + "' in " + c.data);
  }
  if (!present(c.response)) flag_error("--response: no column named '" + c.response + "' in " + c.data);

  Dataset d = load_csv(c.data, c.response, factors);
  for (const auto& [a, b] : derived) d = derive_interaction_factor(d, a, b, "*");
  return d;
}

// Core messages use configuration field names; report them as flags.
std::string as_flags(std::string message) {
  static const std::pair<const char*, const char*> names[] = {{"min_levels_beta", "--min-levels-beta"},
                                                              {"min_levels_sigma", "--min-levels-sigma"},
                                                              {"same_scheme", "--same-scheme"},
                                                              {"lgf_beta", "--lgf-beta"},
                                                              {"lgf_sigma", "--lgf-sigma"}};
  for (const auto& [from, to] : names) {
    for (auto at = message.find(from); at != std::string::npos; at = message.find(from, at + std::strlen(to))) {
      message.replace(at, std::strlen(from), to);
    }
  }
  return message;
}

void validate(const RunConfig& c) {
  if (c.models.empty()) flag_error("--model: at least one model formula is required");
  if (c.m0 < 1) flag_error("--m0: must be a positive integer");
  if (c.same_scheme && (!c.lgf_beta || !c.lgf_sigma || *c.lgf_beta != *c.lgf_sigma)) {
    flag_error("--same-scheme requires --lgf-beta and --lgf-sigma to name the same factor (got '" +
               c.lgf_beta.value_or("") + "' and '" + c.lgf_sigma.value_or("") + "')");
  }
  for (const auto& [formula, het] : c.models) {
    if (het && !c.lgf_sigma) flag_error("--model '" + formula + ":het' needs --lgf-sigma");
  }
  for (const auto& s : c.show_estimates) {
    if (s < 1) flag_error("--show-estimates: model indices start at 1");
  }
}

}  // namespace

std::pair<std::string, bool> parse_model_flag(const std::string& text) {
  if (text.size() > kHetSuffix.size() && text.compare(text.size() - kHetSuffix.size(), kHetSuffix.size(), kHetSuffix) == 0) {
    return {text.substr(0, text.size() - kHetSuffix.size()), true};
  }
  return {text, false};
}

SelectionReport analyse(const RunConfig& c) {
  validate(c);
  const Dataset data = load(c);

  ModelSpaceConfig ms;
  for (const auto& [formula, het] : c.models) {
    ms.formulas.push_back(formula);
    ms.het.push_back(het ? 1 : 0);
  }
  ms.lgf_beta = c.lgf_beta;
  ms.lgf_sigma = c.lgf_sigma;
  ms.same_scheme = c.same_scheme;
  ms.min_levels_beta = c.min_levels_beta;
  ms.min_levels_sigma = c.min_levels_sigma;
  const ModelSpace space = [&] {
    try {
      return build_model_space(ms, data);
    } catch (const Error& e) {
      throw Error(e.code(), as_flags(e.what()));
    }
  }();

  FbfConfig fbf;
  fbf.m0 = c.m0;
  fbf.prior = c.prior;
  fbf.n = data.rows();
  if (c.m0 > static_cast<int>(data.rows())) {
    flag_error("--m0: " + std::to_string(c.m0) + " exceeds the number of rows (" + std::to_string(data.rows()) + ")");
  }
  SelectionReport report = run_selection(space, data, fbf, c.threads);
  for (int idx : c.show_estimates) {
    if (idx > static_cast<int>(report.estimates.size())) {
      flag_error("--show-estimates: model " + std::to_string(idx) + " does not exist (" +
                 std::to_string(report.estimates.size()) + " models)");
    }
  }
  return report;
}

std::string render_table(const SelectionReport& r, const std::vector<int>& show_estimates) {
  std::ostringstream out;
  out << "Model\tScheme.beta\tScheme.Sigma\tLog-Marginal\tModPrior\tFModProb\tCumulative\n";
  for (const auto& m : r.models) {
    out << m.formula << '\t' << m.scheme_beta << '\t' << m.scheme_sigma << '\t'
        << sig7(m.log_marginal) << '\t' << sig7(m.prior) << '\t' << sig7(m.posterior) << '\t' << sig7(m.cumulative)
        << '\n';
  }
  out << "\nScheme.beta\tProbability\n";
  for (const auto& s : r.scheme_probabilities_beta) out << s.scheme << '\t' << sig7(s.probability) << '\n';
  out << "\nScheme.Sigma\tProbability\n";
  for (const auto& s : r.scheme_probabilities_sigma) out << s.scheme << '\t' << sig7(s.probability) << '\n';

  for (int idx : show_estimates) {
    const auto& e = r.estimates.at(static_cast<std::size_t>(idx - 1));
    const auto it = std::find_if(r.models.begin(), r.models.end(), [&](const RankedModel& m) { return m.model_index == idx; });
    out << "\nEstimates\t" << idx << '\t' << it->formula << '\t' << it->scheme_beta << '\t' << it->scheme_sigma << '\n';
    out << "Coefficient\tEstimate\n";
    for (std::size_t j = 0; j < e.coefficient_labels.size(); ++j) {
      out << e.coefficient_labels[j] << '\t' << (e.coefficients[j] ? sig7(*e.coefficients[j]) : "NA") << '\n';
    }
    out << "Variance\tEstimate\n";
    for (const auto& [label, v] : e.variances) out << label << '\t' << sig7(v) << '\n';
    if (e.g) out << "g\t" << sig7(*e.g) << '\n';
  }
  out << "\nm0\t" << r.m0 << "\nb\t" << sig7(r.b) << '\n';
  return out.str();
}

std::string render_json(const SelectionReport& r) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["models"] = json::array();
  for (const auto& m : r.models) {
    doc["models"].push_back({{"index", m.model_index},
                             {"model", m.formula},
                             {"heteroscedastic", m.heteroscedastic},
                             {"scheme_beta", m.scheme_beta},
                             {"scheme_Sigma", m.scheme_sigma},
                             {"log_marginal", m.log_marginal},
                             {"prior", m.prior},
                             {"posterior", m.posterior},
                             {"cumulative", m.cumulative}});
  }
  auto table = [](const std::vector<SchemeProbability>& rows) {
    json out = json::array();
    for (const auto& s : rows) out.push_back({{"scheme", s.scheme}, {"probability", s.probability}});
    return out;
  };
  doc["scheme_probabilities_beta"] = table(r.scheme_probabilities_beta);
  doc["scheme_probabilities_Sigma"] = table(r.scheme_probabilities_sigma);
  json coefficients = json::object(), variances = json::object(), gs = json::object();
  for (const auto& e : r.estimates) {
    const std::string key = std::to_string(e.model_index);
    json c = json::object();
    for (std::size_t j = 0; j < e.coefficient_labels.size(); ++j) {
      c[e.coefficient_labels[j]] = e.coefficients[j] ? json(*e.coefficients[j]) : json(nullptr);
    }
    coefficients[key] = std::move(c);
    json v = json::object();
    for (const auto& [label, value] : e.variances) v[label] = value;
    variances[key] = std::move(v);
    if (e.g) gs[key] = *e.g;
  }
  doc["coefficients"] = std::move(coefficients);
  doc["variances"] = std::move(variances);
  doc["gs"] = std::move(gs);
  doc["m0_final"] = r.m0;
  doc["b_final"] = r.b;
  return doc.dump(2) + "\n";
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model selection over latent two-group structures in a factor's levels"};
  RunConfig c;
  std::vector<std::string> model_flags;
  std::string prior = "flat", format = "table", lgf_beta, lgf_sigma, out_path;

  app.add_option("--data", c.data, "CSV file with a header row")->required();
  app.add_option("--response", c.response, "Numeric response column")->required();
  app.add_option("--lgf-beta", lgf_beta, "Factor whose levels split into groups for regression effects ('A*B' derives A x B)");
  app.add_option("--lgf-sigma", lgf_sigma, "Factor whose levels split into groups for error variances ('A*B' derives A x B)");
  app.add_flag("--same-scheme", c.same_scheme, "Use one scheme for both effects and variances");
  app.add_option("--min-levels-beta", c.min_levels_beta, "Smallest number of levels in a regression group");
  app.add_option("--min-levels-sigma", c.min_levels_sigma, "Smallest number of levels in a variance group");
  app.add_option("--model", model_flags, "Model formula, suffix ':het' adds group-based variances (repeatable)")
      ->required();
  app.add_option("--prior", prior, "flat or zs")->check(CLI::IsMember({"flat", "zs"}));
  app.add_option("--m0", c.m0, "Minimal training sample size")->required();
  app.add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--show-estimates", c.show_estimates, "Print MAP estimates for this model index (repeatable)");
  app.add_option("--factor", c.factors, "Treat this column as a factor (repeatable)");
  app.add_option("--threads", c.threads, "Worker threads for model evaluation, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "slgf: error: " << e.what() << '\n';
    return 2;
  }

  if (!lgf_beta.empty()) c.lgf_beta = lgf_beta;
  if (!lgf_sigma.empty()) c.lgf_sigma = lgf_sigma;
  if (!out_path.empty()) c.out = out_path;
  c.prior = prior == "zs" ? PriorKind::ZellnerSiow : PriorKind::Flat;
  c.format = format == "json" ? Format::Json : Format::Table;
  for (const auto& m : model_flags) c.models.push_back(parse_model_flag(m));

  try {
    const SelectionReport report = analyse(c);
    const std::string text = c.format == Format::Json ? render_json(report) : render_table(report, c.show_estimates);
    if (c.out) {
      std::ofstream file(*c.out);
      if (!file || !(file << text)) {
        err << "slgf: error: --out: cannot write '" << *c.out << "'\n";
        return 1;
      }
    } else {
      out << text;
    }
    return 0;
  } catch (const Error& e) {
    err << "slgf: error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::InvalidMinLevels:
      case ErrorCode::FormulaParseFailure:
      case ErrorCode::NamedColumnAbsent:
      case ErrorCode::ReservedNameCollision:
        return 2;
      case ErrorCode::TrainingFractionExhausted:
        return 3;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    err << "slgf: error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace slgf::cli
