#ifndef SLGF_TESTS_SUPPORT_HPP
#define SLGF_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "slgf/tabular.hpp"

namespace slgf::test {

inline std::filesystem::path data_dir() { return SLGF_DATA_DIR; }

// One-way layout: factor "f" with the given level labels, `reps` rows per
// level, response "y" drawn around per-level means and sds.
inline Dataset one_way(const std::vector<std::string>& levels, int reps, const std::vector<double>& means,
                       const std::vector<double>& sds, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::string> labels;
  std::vector<double> y;
  for (int r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      labels.push_back(levels[k]);
      y.push_back(means[k] + sds[k] * z(rng));
    }
  }
  return Dataset({Column::numeric("y", y), Column::factor("f", labels)}, "y");
}

// Two crossed factors, one row per cell: "heads" (6 levels) by "time"
// (5 levels), response "weight". Head 5 carries an extra time-dependent shift.
inline Dataset two_way(unsigned seed, double noise = 0.05) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::string> heads, time;
  std::vector<double> weight;
  for (int t = 1; t <= 5; ++t) {
    for (int h = 1; h <= 6; ++h) {
      heads.push_back(std::to_string(h));
      time.push_back(std::to_string(t));
      double mu = 10.0 + 0.1 * h + 0.2 * t;
      if (h == 5) mu += 0.3 * t;
      weight.push_back(mu + noise * z(rng));
    }
  }
  return Dataset({Column::numeric("weight", weight), Column::factor("time", time), Column::factor("heads", heads)},
                 "weight");
}

// Writes `d` as CSV with full-precision numbers.
inline void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  const auto& cols = d.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].name();
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << ',';
      if (cols[j].is_factor()) {
        out << cols[j].label(i);
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", cols[j].values()[i]);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace slgf::test

#endif  // SLGF_TESTS_SUPPORT_HPP
