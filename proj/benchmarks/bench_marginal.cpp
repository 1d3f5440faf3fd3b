#include <random>

#include <benchmark/benchmark.h>

#include "slgf/marginal.hpp"
#include "slgf/model_space.hpp"
#include "slgf/numerics.hpp"
#include "slgf/posterior.hpp"
#include "slgf/tabular.hpp"

namespace {

using namespace slgf;

// One-way layout with `levels` levels, `reps` rows each; the last two levels
// are shifted and noisier.
Dataset layout(int levels, int reps, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::string> labels;
  std::vector<double> y;
  for (int r = 0; r < reps; ++r) {
    for (int k = 0; k < levels; ++k) {
      const bool odd = k >= levels - 2;
      labels.push_back(std::to_string(k + 1));
      y.push_back((odd ? 1.0 : 0.0) + (odd ? 2.0 : 0.5) * z(rng));
    }
  }
  return Dataset({Column::numeric("y", y), Column::factor("f", labels)}, "y");
}

PreparedModel prepared(const std::string& formula, bool het) {
  static const Dataset data = layout(5, 12);
  ModelSpaceConfig c;
  c.formulas = {formula};
  c.het = {het ? 1 : 0};
  c.lgf_beta = c.lgf_sigma = "f";
  const ModelSpace space = build_model_space(c, data);
  return prepare_model(space, space.models.size() - 1, data);
}

void BM_FlatHom(benchmark::State& state) {
  const auto m = prepared("y~f", false);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_model(m, PriorKind::Flat, 0.2).log_qb);
}
BENCHMARK(BM_FlatHom);

void BM_ZsHom(benchmark::State& state) {
  const auto m = prepared("y~f", false);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_model(m, PriorKind::ZellnerSiow, 0.2).log_qb);
}
BENCHMARK(BM_ZsHom);

void BM_FlatHet(benchmark::State& state) {
  const auto m = prepared("y~f", true);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_model(m, PriorKind::Flat, 0.2).log_qb);
}
BENCHMARK(BM_FlatHet);

void BM_ZsHet(benchmark::State& state) {
  const auto m = prepared("y~f", true);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_model(m, PriorKind::ZellnerSiow, 0.2).log_qb);
}
BENCHMARK(BM_ZsHet);

// Full selection over y~1, y~f, y~group, all with het variants; argument is the level count.
void BM_Selection(benchmark::State& state) {
  const Dataset data = layout(static_cast<int>(state.range(0)), 8);
  ModelSpaceConfig c;
  c.formulas = {"y~1", "y~f", "y~group"};
  c.het = {1, 1, 1};
  c.lgf_beta = c.lgf_sigma = "f";
  c.same_scheme = true;
  const ModelSpace space = build_model_space(c, data);
  FbfConfig cfg;
  cfg.m0 = static_cast<int>(state.range(0)) + 2;
  cfg.prior = state.range(1) ? PriorKind::ZellnerSiow : PriorKind::Flat;
  for (auto _ : state) benchmark::DoNotOptimize(run_selection(space, data, cfg, 0).models.size());
  state.counters["models"] = static_cast<double>(space.models.size());
}
BENCHMARK(BM_Selection)->Args({5, 0})->Args({5, 1})->Args({8, 0})->Unit(benchmark::kMillisecond);

void BM_NelderMeadRosenbrock(benchmark::State& state) {
  const Objective f = [](const Eigen::VectorXd& x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  for (auto _ : state) benchmark::DoNotOptimize(nelder_mead(f, Eigen::Vector2d(-1.2, 1.0)).value);
}
BENCHMARK(BM_NelderMeadRosenbrock);

}  // namespace

BENCHMARK_MAIN();
