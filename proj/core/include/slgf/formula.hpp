#ifndef SLGF_FORMULA_HPP
#define SLGF_FORMULA_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace slgf {

class Dataset;
class GroupingScheme;

// Placeholder variable substituted by a grouping scheme's two groups.
inline constexpr std::string_view kGroupToken = "group";

// A main effect (one variable) or a two-way interaction.
struct Term {
  std::vector<std::string> variables;

  std::size_t order() const noexcept { return variables.size(); }
  bool contains(std::string_view name) const;
  std::string label() const;

  friend bool operator==(const Term& a, const Term& b);
};

struct TermList {
  std::string response;
  bool intercept = true;
  std::vector<Term> terms;  // main effects first, then interactions
  bool uses_group = false;
  std::string text;         // formula with whitespace removed

  bool has_main_effect(std::string_view name) const;
};

// Grammar: resp ~ rhs;  rhs := 1 | term (+ term)*;  term := name | name*name | name:name.
// a*b expands to a + b + a:b. Throws FormulaParseFailure.
TermList parse_formula(std::string_view text);

struct DesignMatrix {
  Eigen::MatrixXd x;                       // N x P_full, column 0 is the intercept
  std::vector<std::string> column_labels;  // P_full labels
  std::vector<std::size_t> kept_columns;   // linearly independent columns, ascending

  std::size_t rank() const noexcept { return kept_columns.size(); }
  Eigen::MatrixXd kept() const;
};

// Treatment coding with the first level as reference. Within an interaction a
// factor is contrast-coded when the term's other variable is present as a main
// effect, and indicator-coded otherwise. `group` becomes a two-level factor
// whose reference level is the group holding the factor's smallest level.
// Columns within the span of earlier columns (relative tolerance 1e-10 of the
// largest pivot) are left out of kept_columns.
DesignMatrix build_design(const Dataset& data, const TermList& terms,
                          const GroupingScheme* beta_scheme = nullptr);

struct RegressionSummary {
  std::vector<std::string> labels;
  std::vector<std::optional<double>> coefficients;  // nullopt for aliased columns
  Eigen::VectorXd fitted;
  double ss_resid = 0.0;
  double ss_total = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // estimable coefficients, intercept included
};

// Least squares on the kept columns. Throws InsufficientData when N <= P.
RegressionSummary ols_fit(const DesignMatrix& design, const Eigen::VectorXd& y);

}  // namespace slgf

#endif  // SLGF_FORMULA_HPP
