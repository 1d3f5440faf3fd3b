#include "slgf/formula.hpp"

#include <algorithm>
#include <cctype>

#include "slgf/error.hpp"
#include "slgf/scheme.hpp"
#include "slgf/tabular.hpp"

namespace slgf {

namespace {

constexpr double kAliasTolerance = 1e-10;

[[noreturn]] void fail_parse(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::FormulaParseFailure, "cannot parse formula '" + std::string(text) + "': " + why);
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

struct Token {
  enum Kind { Name, Tilde, Plus, Star, Colon } kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '~') {
      out.push_back({Token::Tilde, "~"});
      ++i;
    } else if (c == '+') {
      out.push_back({Token::Plus, "+"});
      ++i;
    } else if (c == '*') {
      out.push_back({Token::Star, "*"});
      ++i;
    } else if (c == ':') {
      out.push_back({Token::Colon, ":"});
      ++i;
    } else if (is_name_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      out.push_back({Token::Name, std::string(text.substr(i, j - i))});
      i = j;
    } else {
      fail_parse(text, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

// Coded columns of one variable inside one term.
struct Coding {
  std::vector<Eigen::VectorXd> columns;
  std::vector<std::string> labels;
};

// A factor-like view over either a dataset factor or the scheme-derived group.
struct FactorView {
  std::string name;
  std::vector<int> codes;
  std::vector<std::string> levels;
};

FactorView group_factor(const Dataset& data, const GroupingScheme& scheme) {
  const auto rows = scheme.row_groups(data.factor(scheme.factor()));
  const int indicated = scheme.indicated_group();
  FactorView v;
  v.name = std::string(kGroupToken);
  v.levels = {scheme.group_label(1 - indicated), scheme.group_label(indicated)};
  v.codes.reserve(rows.size());
  for (int g : rows) v.codes.push_back(g == indicated ? 1 : 0);
  return v;
}

Coding code_factor(const FactorView& f, bool contrasts, Eigen::Index n) {
  Coding out;
  const std::size_t first = contrasts ? 1 : 0;
  for (std::size_t level = first; level < f.levels.size(); ++level) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (f.codes[static_cast<std::size_t>(i)] == static_cast<int>(level)) col[i] = 1.0;
    }
    out.columns.push_back(std::move(col));
    out.labels.push_back(f.name + f.levels[level]);
  }
  return out;
}

// Sequential Gram-Schmidt with reorthogonalisation: a column is aliased when its
// component orthogonal to the kept columns is negligible.
std::vector<std::size_t> independent_columns(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd basis(n, x.cols());
  std::vector<std::size_t> kept;
  double largest = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd v = x.col(j);
    const auto k = static_cast<Eigen::Index>(kept.size());
    for (int pass = 0; pass < 2 && k > 0; ++pass) {
      v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
    }
    const double norm = v.norm();
    if (norm > kAliasTolerance * std::max(largest, 1e-300) && norm > 0.0) {
      largest = std::max(largest, norm);
      basis.col(k) = v / norm;
      kept.push_back(static_cast<std::size_t>(j));
    }
  }
  return kept;
}

}  // namespace

bool Term::contains(std::string_view name) const {
  return std::find(variables.begin(), variables.end(), name) != variables.end();
}

std::string Term::label() const {
  std::string out;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i) out += ':';
    out += variables[i];
  }
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.variables.size() != b.variables.size()) return false;
  return std::is_permutation(a.variables.begin(), a.variables.end(), b.variables.begin());
}

bool TermList::has_main_effect(std::string_view name) const {
  return std::any_of(terms.begin(), terms.end(), [&](const Term& t) {
    return t.order() == 1 && t.variables.front() == name;
  });
}

TermList parse_formula(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.size() < 3 || tokens[0].kind != Token::Name || tokens[1].kind != Token::Tilde) {
    fail_parse(text, "expected 'response ~ terms'");
  }

  TermList out;
  out.response = tokens[0].text;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.text.push_back(c);
  }

  if (tokens.size() == 3 && tokens[2].kind == Token::Name && tokens[2].text == "1") return out;

  std::vector<Term> main_effects;
  std::vector<Term> interactions;
  auto add = [&](Term t) {
    for (const auto& v : t.variables) {
      if (v == "1") fail_parse(text, "'1' may only appear alone on the right-hand side");
      if (v == out.response) fail_parse(text, "response '" + v + "' appears on the right-hand side");
    }
    auto& bucket = t.order() == 1 ? main_effects : interactions;
    if (std::find(bucket.begin(), bucket.end(), t) == bucket.end()) bucket.push_back(std::move(t));
  };

  std::size_t i = 2;
  while (true) {
    if (i >= tokens.size() || tokens[i].kind != Token::Name) fail_parse(text, "expected a variable name");
    const std::string a = tokens[i].text;
    ++i;
    if (i < tokens.size() && (tokens[i].kind == Token::Star || tokens[i].kind == Token::Colon)) {
      const bool star = tokens[i].kind == Token::Star;
      ++i;
      if (i >= tokens.size() || tokens[i].kind != Token::Name) {
        fail_parse(text, "expected a variable name after '" + std::string(star ? "*" : ":") + "'");
      }
      const std::string b = tokens[i].text;
      ++i;
      if (a == b) fail_parse(text, "variable '" + a + "' interacts with itself");
      if (star) {
        add(Term{{a}});
        add(Term{{b}});
      }
      add(Term{{a, b}});
    } else {
      add(Term{{a}});
    }
    if (i == tokens.size()) break;
    if (tokens[i].kind != Token::Plus) fail_parse(text, "expected '+' between terms");
    ++i;
  }

  out.terms = std::move(main_effects);
  out.terms.insert(out.terms.end(), interactions.begin(), interactions.end());
  out.uses_group = std::any_of(out.terms.begin(), out.terms.end(),
                               [](const Term& t) { return t.contains(kGroupToken); });
  return out;
}

Eigen::MatrixXd DesignMatrix::kept() const {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(kept_columns.size()));
  for (std::size_t j = 0; j < kept_columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(kept_columns[j]));
  }
  return out;
}

DesignMatrix build_design(const Dataset& data, const TermList& terms, const GroupingScheme* beta_scheme) {
  if (terms.response != data.response_name()) {
    throw Error(ErrorCode::ConfigError, "formula response '" + terms.response +
                                            "' differs from the dataset response '" +
                                            data.response_name() + "'");
  }
  if (terms.uses_group && beta_scheme == nullptr) {
    throw Error(ErrorCode::ConfigError,
                "formula '" + terms.text + "' uses 'group' but no regression grouping scheme was given");
  }

  const auto n = static_cast<Eigen::Index>(data.rows());
  std::optional<FactorView> group;
  if (terms.uses_group) group = group_factor(data, *beta_scheme);

  auto code_variable = [&](const std::string& name, bool contrasts) -> Coding {
    if (name == kGroupToken) return code_factor(*group, contrasts, n);
    const Column& c = data.column(name);
    if (!c.is_factor()) {
      const auto& v = c.values();
      return Coding{{Eigen::Map<const Eigen::VectorXd>(v.data(), n)}, {name}};
    }
    std::vector<std::size_t> counts(c.level_count(), 0);
    for (int code : c.codes()) ++counts[static_cast<std::size_t>(code)];
    if (std::find(counts.begin(), counts.end(), 0u) != counts.end()) {
      throw Error(ErrorCode::DegenerateDesign, "factor '" + name + "' has an unobserved level");
    }
    return code_factor(FactorView{name, c.codes(), c.levels()}, contrasts, n);
  };

  std::vector<Eigen::VectorXd> columns{Eigen::VectorXd::Ones(n)};
  std::vector<std::string> labels{"(Intercept)"};

  for (const Term& term : terms.terms) {
    if (term.order() == 1) {
      Coding c = code_variable(term.variables.front(), true);
      for (std::size_t j = 0; j < c.columns.size(); ++j) {
        columns.push_back(std::move(c.columns[j]));
        labels.push_back(std::move(c.labels[j]));
      }
      continue;
    }
    const std::string& a = term.variables[0];
    const std::string& b = term.variables[1];
    const Coding ca = code_variable(a, terms.has_main_effect(b));
    const Coding cb = code_variable(b, terms.has_main_effect(a));
    for (std::size_t jb = 0; jb < cb.columns.size(); ++jb) {
      for (std::size_t ja = 0; ja < ca.columns.size(); ++ja) {
        columns.push_back(ca.columns[ja].cwiseProduct(cb.columns[jb]));
        labels.push_back(ca.labels[ja] + ":" + cb.labels[jb]);
      }
    }
  }

  DesignMatrix out;
  out.x.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.x.col(static_cast<Eigen::Index>(j)) = columns[j];
  out.column_labels = std::move(labels);
  out.kept_columns = independent_columns(out.x);
  return out;
}

RegressionSummary ols_fit(const DesignMatrix& design, const Eigen::VectorXd& y) {
  const auto n = static_cast<std::size_t>(design.x.rows());
  const std::size_t p = design.rank();
  if (static_cast<std::size_t>(y.size()) != n) {
    throw Error(ErrorCode::ConfigError, "response length does not match the design matrix");
  }
  if (n <= p) {
    throw Error(ErrorCode::InsufficientData, "model has " + std::to_string(p) +
                                                 " estimable coefficients but only " +
                                                 std::to_string(n) + " observations");
  }

  const Eigen::MatrixXd xk = design.kept();
  const Eigen::VectorXd beta = xk.colPivHouseholderQr().solve(y);

  RegressionSummary out;
  out.labels = design.column_labels;
  out.coefficients.assign(design.column_labels.size(), std::nullopt);
  for (std::size_t j = 0; j < p; ++j) out.coefficients[design.kept_columns[j]] = beta[static_cast<Eigen::Index>(j)];
  out.fitted = xk * beta;
  out.ss_resid = (y - out.fitted).squaredNorm();
  out.ss_total = (y.array() - y.mean()).matrix().squaredNorm();
  out.ss_resid = std::min(out.ss_resid, out.ss_total);
  out.r2 = out.ss_total > 0.0 ? 1.0 - out.ss_resid / out.ss_total : 0.0;
  out.n = n;
  out.p = p;
  return out;
}

}  // namespace slgf
