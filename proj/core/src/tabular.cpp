#include "slgf/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "slgf/error.hpp"

namespace slgf {

namespace {

constexpr std::string_view kReservedToken = "group";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool parse_finite(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Splits a CSV document into records. Quoted fields may contain commas,
// newlines and doubled quotes.
std::vector<std::vector<std::string>> split_records(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    const bool blank = record.size() == 1 && record.front().empty() && !field_started;
    if (!blank) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseFailure, "unterminated quoted field in CSV input");
  if (!field.empty() || !record.empty() || field_started) end_record();
  return records;
}

}  // namespace

Column Column::numeric(std::string name, std::vector<double> values) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::Numeric;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::ParseFailure, "column '" + c.name_ + "' contains a non-finite value");
    }
  }
  c.values_ = std::move(values);
  return c;
}

Column Column::factor(std::string name, const std::vector<std::string>& labels) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::Factor;
  c.levels_ = labels;
  std::sort(c.levels_.begin(), c.levels_.end());
  c.levels_.erase(std::unique(c.levels_.begin(), c.levels_.end()), c.levels_.end());
  c.codes_.reserve(labels.size());
  for (const auto& label : labels) {
    const auto it = std::lower_bound(c.levels_.begin(), c.levels_.end(), label);
    c.codes_.push_back(static_cast<int>(it - c.levels_.begin()));
  }
  return c;
}

std::size_t Column::size() const noexcept {
  return kind_ == ColumnKind::Factor ? codes_.size() : values_.size();
}

const std::vector<double>& Column::values() const {
  if (kind_ != ColumnKind::Numeric) {
    throw Error(ErrorCode::KindMismatch, "column '" + name_ + "' is a factor, not numeric");
  }
  return values_;
}

const std::vector<int>& Column::codes() const {
  if (kind_ != ColumnKind::Factor) {
    throw Error(ErrorCode::KindMismatch, "column '" + name_ + "' is numeric, not a factor");
  }
  return codes_;
}

const std::vector<std::string>& Column::levels() const {
  if (kind_ != ColumnKind::Factor) {
    throw Error(ErrorCode::KindMismatch, "column '" + name_ + "' is numeric, not a factor");
  }
  return levels_;
}

const std::string& Column::label(std::size_t row) const {
  return levels()[static_cast<std::size_t>(codes_.at(row))];
}

Dataset::Dataset(std::vector<Column> columns, std::string response_name)
    : columns_(std::move(columns)), response_(std::move(response_name)) {
  if (columns_.empty()) throw Error(ErrorCode::ParseFailure, "dataset has no columns");
  rows_ = columns_.front().size();
  if (rows_ == 0) throw Error(ErrorCode::ParseFailure, "dataset has no rows");

  std::set<std::string_view> seen;
  for (const auto& c : columns_) {
    if (c.name().find(kReservedToken) != std::string::npos) {
      throw Error(ErrorCode::ReservedNameCollision,
                  "column name '" + c.name() + "' contains the reserved string \"group\"");
    }
    if (!seen.insert(c.name()).second) {
      throw Error(ErrorCode::ReservedNameCollision, "duplicate column name '" + c.name() + "'");
    }
    if (c.size() != rows_) {
      throw Error(ErrorCode::ParseFailure, "column '" + c.name() + "' has " +
                                               std::to_string(c.size()) + " entries, expected " +
                                               std::to_string(rows_));
    }
  }
  const Column& y = column(response_);
  if (y.is_factor()) {
    throw Error(ErrorCode::KindMismatch, "response '" + response_ + "' must be numeric");
  }
}

bool Dataset::has_column(std::string_view name) const noexcept {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name() == name; });
}

const Column& Dataset::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name() == name) return c;
  }
  throw Error(ErrorCode::NamedColumnAbsent, "no column named '" + std::string(name) + "'");
}

const Column& Dataset::factor(std::string_view name) const {
  const Column& c = column(name);
  if (!c.is_factor()) {
    throw Error(ErrorCode::KindMismatch, "column '" + c.name() + "' is not a factor");
  }
  return c;
}

Eigen::VectorXd Dataset::response() const {
  const auto& v = column(response_).values();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Dataset read_csv(std::istream& in, const std::string& response,
                 const std::set<std::string>& factor_names) {
  auto records = split_records(in);
  if (records.empty()) throw Error(ErrorCode::ParseFailure, "CSV input has no header row");

  std::vector<std::string> header;
  for (const auto& h : records.front()) header.emplace_back(trim(h));
  const std::size_t width = header.size();
  const std::size_t n = records.size() - 1;
  if (n == 0) throw Error(ErrorCode::ParseFailure, "CSV input has no data rows");

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::ParseFailure, "CSV row " + std::to_string(r + 1) + " has " +
                                               std::to_string(records[r].size()) +
                                               " fields, expected " + std::to_string(width));
    }
  }

  auto find = [&](const std::string& name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  if (!find(response)) {
    throw Error(ErrorCode::NamedColumnAbsent, "response column '" + response + "' not in header");
  }
  for (const auto& f : factor_names) {
    if (!find(f)) throw Error(ErrorCode::NamedColumnAbsent, "factor column '" + f + "' not in header");
  }
  for (const auto& h : header) {
    if (h.find(kReservedToken) != std::string::npos) {
      throw Error(ErrorCode::ReservedNameCollision,
                  "column name '" + h + "' contains the reserved string \"group\"");
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    const std::string& name = header[c];
    if (factor_names.count(name) != 0) {
      if (name == response) {
        throw Error(ErrorCode::KindMismatch, "response '" + response + "' cannot be a factor");
      }
      std::vector<std::string> labels;
      labels.reserve(n);
      for (std::size_t r = 1; r <= n; ++r) {
        std::string label(trim(records[r][c]));
        if (label.empty() || label == "NA") {
          throw Error(ErrorCode::ParseFailure, "missing value in factor '" + name + "' at row " +
                                                   std::to_string(r + 1));
        }
        labels.push_back(std::move(label));
      }
      columns.push_back(Column::factor(name, labels));
    } else {
      std::vector<double> values(n);
      for (std::size_t r = 1; r <= n; ++r) {
        if (!parse_finite(records[r][c], values[r - 1])) {
          throw Error(ErrorCode::ParseFailure,
                      "column '" + name + "' row " + std::to_string(r + 1) + ": '" + records[r][c] +
                          "' is not a finite number (declare the column as a factor?)");
        }
      }
      columns.push_back(Column::numeric(name, std::move(values)));
    }
  }
  return Dataset(std::move(columns), response);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response,
                 const std::set<std::string>& factor_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseFailure, "cannot open '" + path.string() + "'");
  return read_csv(in, response, factor_names);
}

Dataset derive_interaction_factor(const Dataset& data, const std::string& f1,
                                  const std::string& f2, const std::string& sep) {
  const Column& a = data.factor(f1);
  const Column& b = data.factor(f2);
  std::string name = f1 + sep + f2;
  if (data.has_column(name)) {
    throw Error(ErrorCode::ReservedNameCollision, "column '" + name + "' already exists");
  }
  std::vector<std::string> labels;
  labels.reserve(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) labels.push_back(a.label(i) + sep + b.label(i));

  std::vector<Column> columns = data.columns();
  columns.push_back(Column::factor(std::move(name), labels));
  return Dataset(std::move(columns), data.response_name());
}

}  // namespace slgf
