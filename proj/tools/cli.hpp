#ifndef SLGF_TOOLS_CLI_HPP
#define SLGF_TOOLS_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slgf/marginal.hpp"
#include "slgf/posterior.hpp"

namespace slgf::cli {

enum class Format { Table, Json };

struct RunConfig {
  std::string data;
  std::string response;
  std::optional<std::string> lgf_beta;
  std::optional<std::string> lgf_sigma;
  bool same_scheme = false;
  int min_levels_beta = 1;
  int min_levels_sigma = 1;
  std::vector<std::pair<std::string, bool>> models;  // formula, heteroscedastic
  PriorKind prior = PriorKind::Flat;
  int m0 = 0;
  Format format = Format::Table;
  std::optional<std::string> out;
  std::vector<int> show_estimates;
  std::vector<std::string> factors;  // extra factor columns
  unsigned threads = 0;
};

// "FORMULA" or "FORMULA:het".
std::pair<std::string, bool> parse_model_flag(const std::string& text);

// Throws slgf::Error; the message names the offending flag.
SelectionReport analyse(const RunConfig& config);

std::string render_table(const SelectionReport& report, const std::vector<int>& show_estimates);
std::string render_json(const SelectionReport& report);

// Parses argv, runs, writes the report. Returns the process exit status;
// diagnostics go to `err` as a single line.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slgf::cli

#endif  // SLGF_TOOLS_CLI_HPP
