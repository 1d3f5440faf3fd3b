#include "slgf/scheme.hpp"

#include <algorithm>

#include "slgf/error.hpp"
#include "slgf/tabular.hpp"

namespace slgf {

GroupingScheme::GroupingScheme(std::string factor, std::vector<std::string> levels,
                               std::vector<std::size_t> members)
    : factor_(std::move(factor)), levels_(std::move(levels)) {
  const std::size_t k = levels_.size();
  std::vector<bool> in_members(k, false);
  for (std::size_t m : members) {
    if (m >= k) throw Error(ErrorCode::ConfigError, "scheme member index out of range");
    in_members[m] = true;
  }
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < k; ++i) (in_members[i] ? a : b).push_back(i);
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::ConfigError, "a grouping scheme needs two nonempty groups");
  }
  const bool a_first = a.size() < b.size() || (a.size() == b.size() && a.front() != 0);
  first_ = a_first ? std::move(a) : std::move(b);
  second_ = a_first ? std::move(b) : std::move(a);
  in_first_.assign(k, false);
  for (std::size_t i : first_) in_first_[i] = true;
}

std::string GroupingScheme::group_label(int which) const {
  std::string out = "{";
  const auto& g = group(which);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ',';
    out += levels_[g[i]];
  }
  return out + '}';
}

std::vector<int> GroupingScheme::row_groups(const Column& factor_column) const {
  if (factor_column.levels() != levels_) {
    throw Error(ErrorCode::KindMismatch,
                "column '" + factor_column.name() + "' does not match the levels of scheme " + label());
  }
  std::vector<int> out;
  out.reserve(factor_column.size());
  for (int code : factor_column.codes()) out.push_back(group_of_level(static_cast<std::size_t>(code)));
  return out;
}

std::vector<GroupingScheme> enumerate_schemes(const std::string& factor,
                                              const std::vector<std::string>& levels,
                                              int min_levels) {
  const int k = static_cast<int>(levels.size());
  if (k < 2) {
    throw Error(ErrorCode::InvalidMinLevels,
                "factor '" + factor + "' needs at least two levels to form grouping schemes");
  }
  if (min_levels < 1 || min_levels > k / 2) {
    throw Error(ErrorCode::InvalidMinLevels,
                "minimum group size " + std::to_string(min_levels) + " for factor '" + factor +
                    "' must lie in [1, " + std::to_string(k / 2) + "]");
  }

  std::vector<GroupingScheme> out;
  for (int size = min_levels; size <= k / 2; ++size) {
    std::vector<std::size_t> comb(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) comb[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    while (true) {
      // With equal halves, keep only the half holding level 0; the other one is
      // its complement and was (or will be) produced already.
      if (2 * size != k || comb.front() == 0) out.emplace_back(factor, levels, comb);

      int i = size - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == static_cast<std::size_t>(k - size + i)) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return out;
}

}  // namespace slgf
