#ifndef SLGF_SCHEME_HPP
#define SLGF_SCHEME_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace slgf {

class Column;

// An unordered partition of a factor's levels into two nonempty groups.
//
// Group 0 is the "printed first" group: the smaller of the two, or, when both
// have the same size, the one without the lexicographically smallest level.
// Labels render as "{a,b}{c,d,e}".
class GroupingScheme {
 public:
  GroupingScheme(std::string factor, std::vector<std::string> levels,
                 std::vector<std::size_t> members);

  const std::string& factor() const noexcept { return factor_; }
  const std::vector<std::string>& levels() const noexcept { return levels_; }
  const std::vector<std::size_t>& group(int which) const { return which == 0 ? first_ : second_; }

  int group_of_level(std::size_t level) const { return in_first_.at(level) ? 0 : 1; }
  // The group that does not contain level 0; it gets the 1 in treatment coding.
  int indicated_group() const noexcept { return in_first_.front() ? 1 : 0; }

  std::string group_label(int which) const;
  std::string label() const { return group_label(0) + group_label(1); }

  // 0/1 group id for every row of the factor column.
  std::vector<int> row_groups(const Column& factor_column) const;

  friend bool operator==(const GroupingScheme& a, const GroupingScheme& b) {
    return a.factor_ == b.factor_ && a.levels_ == b.levels_ && a.first_ == b.first_;
  }

 private:
  std::string factor_;
  std::vector<std::string> levels_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> second_;
  std::vector<bool> in_first_;
};

// Every two-group partition of `levels` whose smaller group has at least
// min_levels levels, each once. Ordered by size of the smaller group, then by
// the lexicographic combination order of its level indices.
std::vector<GroupingScheme> enumerate_schemes(const std::string& factor,
                                              const std::vector<std::string>& levels,
                                              int min_levels);

}  // namespace slgf

#endif  // SLGF_SCHEME_HPP
