#ifndef SLGF_TABULAR_HPP
#define SLGF_TABULAR_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace slgf {

enum class ColumnKind { Numeric, Factor };

// A named column of N entries. Factor columns store integer codes into a
// lexicographically sorted level list.
class Column {
 public:
  static Column numeric(std::string name, std::vector<double> values);
  static Column factor(std::string name, const std::vector<std::string>& labels);

  const std::string& name() const noexcept { return name_; }
  ColumnKind kind() const noexcept { return kind_; }
  bool is_factor() const noexcept { return kind_ == ColumnKind::Factor; }
  std::size_t size() const noexcept;

  // Numeric access; throws KindMismatch on a factor column.
  const std::vector<double>& values() const;

  // Factor access; each throws KindMismatch on a numeric column.
  const std::vector<int>& codes() const;
  const std::vector<std::string>& levels() const;
  std::size_t level_count() const { return levels().size(); }
  const std::string& label(std::size_t row) const;

 private:
  Column() = default;

  std::string name_;
  ColumnKind kind_ = ColumnKind::Numeric;
  std::vector<double> values_;
  std::vector<int> codes_;
  std::vector<std::string> levels_;
};

// Immutable table with a numeric response column.
class Dataset {
 public:
  Dataset(std::vector<Column> columns, std::string response_name);

  std::size_t rows() const noexcept { return rows_; }
  const std::string& response_name() const noexcept { return response_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }

  bool has_column(std::string_view name) const noexcept;
  // Throws NamedColumnAbsent.
  const Column& column(std::string_view name) const;
  // Throws NamedColumnAbsent or KindMismatch.
  const Column& factor(std::string_view name) const;

  Eigen::VectorXd response() const;

 private:
  std::vector<Column> columns_;
  std::string response_;
  std::size_t rows_ = 0;
};

// Reads an RFC-4180 CSV with a header row. Columns in factor_names become
// factors; every other column must parse as finite decimals.
Dataset load_csv(const std::filesystem::path& path, const std::string& response,
                 const std::set<std::string>& factor_names);
Dataset read_csv(std::istream& in, const std::string& response,
                 const std::set<std::string>& factor_names);

// Adds the factor f1 + sep + f2 whose labels are the pasted row labels.
Dataset derive_interaction_factor(const Dataset& data, const std::string& f1,
                                  const std::string& f2, const std::string& sep);

}  // namespace slgf

#endif  // SLGF_TABULAR_HPP
