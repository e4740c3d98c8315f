#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/error.hpp"
#include "hdbench/eval/metrics.hpp"
#include "hdbench/eval/report.hpp"
#include "hdbench/random.hpp"

namespace hdbench::eval {

enum class Task { classification, regression };

// What a trainer returns for the test rows. Classification fills `scores`
// (higher means class 1) and `labels`; regression fills `values`.
struct Predictions {
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<double> values;
};

using Trainer = std::function<Predictions(const DenseDataset& train, const DenseDataset& test)>;

struct CvResult {
  std::vector<EvalReport> folds;
  EvalReport average;
  std::vector<std::vector<std::size_t>> test_indices;
};

inline std::vector<int> int_labels(const DenseDataset& ds) {
  std::vector<int> y(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) y[i] = static_cast<int>(ds.label(i));
  return y;
}

inline EvalReport evaluate(const DenseDataset& test, const Predictions& p, Task task) {
  EvalReport r;
  if (task == Task::classification) {
    const auto y = int_labels(test);
    const auto ca = confusion_and_accuracy(y, p.labels);
    r.accuracy = ca.accuracy;
    r.confusion = ca.confusion;
    const auto prf = macro_prf(y, p.labels, 2);
    r.macro_precision = prf.precision;
    r.macro_recall = prf.recall;
    r.macro_f1 = prf.f1;
    const bool both = ca.confusion[0][0] + ca.confusion[0][1] > 0 && ca.confusion[1][0] + ca.confusion[1][1] > 0;
    if (both) r.auc_roc = auc_roc(y, p.scores);
  } else {
    const auto m = regression_metrics(test.labels(), p.values);
    r.rmse = m.rmse;
    r.mae = m.mae;
    r.r2 = m.r2;
  }
  return r;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return folds;
}

inline bool training_folds_cover_classes(const DenseDataset& ds, const std::vector<std::vector<std::size_t>>& folds) {
  std::array<std::size_t, 2> total{};
  for (double y : ds.labels()) ++total[y > 0.5 ? 1 : 0];
  for (const auto& test : folds) {
    std::array<std::size_t, 2> held{};
    for (auto i : test) ++held[ds.label(i) > 0.5 ? 1 : 0];
    if (total[0] == held[0] || total[1] == held[1]) return false;
  }
  return true;
}

}  // namespace detail

/// Seeded k-fold cross-validation. Folds differ in size by at most one and
/// every row is tested exactly once. For classification the shuffle is
/// redrawn (up to 100 times) until every training fold holds both classes.
inline CvResult kfold_cv(const DenseDataset& ds, std::size_t k, const Trainer& trainer, std::uint64_t seed,
                         Task task = Task::classification) {
  require(k >= 2, "kfold_cv: k must be at least 2");
  if (k > ds.size()) throw ConfigError("kfold_cv: k exceeds row count");
  if (task == Task::classification && !ds.is_binary()) throw DataError("classification needs binary labels");

  std::vector<std::vector<std::size_t>> folds;
  constexpr std::uint64_t kMaxAttempts = 100;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == kMaxAttempts) {
      throw DataError("kfold_cv: no shuffle among 100 leaves both classes in every training fold");
    }
    folds = detail::make_folds(ds.size(), k, stream_seed(seed, 0xCF, attempt));
    if (task == Task::regression || detail::training_folds_cover_classes(ds, folds)) break;
  }

  CvResult out;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx;
    train_idx.reserve(ds.size() - folds[f].size());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    const DenseDataset train = ds.subset(train_idx);
    const DenseDataset test = ds.subset(folds[f]);
    const auto start = std::chrono::steady_clock::now();
    const Predictions p = trainer(train, test);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EvalReport r = evaluate(test, p, task);
    r.wall_clock_s = secs;
    out.folds.push_back(r);
  }
  out.average = average_reports(out.folds);
  out.test_indices = std::move(folds);
  return out;
}

// ---------------------------------------------------------------------------
// Pair-assignment protocol

struct PlanInstance {
  char id = 'A';
  std::array<std::string, 2> algorithms;
  std::size_t partition = 0;
};

struct AssignmentPlan {
  std::vector<PlanInstance> instances;
};

/// Five evaluation instances A..E, each pairing two algorithms on one
/// partition. `algorithms` binds, in order, the roles
/// (logistic regression, random forest, MLP, boosted trees, SVM); the pairs are
///   A:(LR,RF) B:(MLP,LR) C:(XGB,MLP) D:(SVM,XGB) E:(SVM,RF)
/// so every algorithm is evaluated on exactly two partitions.
inline AssignmentPlan build_assignment_plan(const std::vector<std::string>& algorithms,
                                            const std::vector<std::size_t>& partitions) {
  if (algorithms.size() != 5) throw ConfigError("assignment plan needs exactly 5 algorithms");
  if (partitions.size() != 5) throw ConfigError("assignment plan needs exactly 5 partitions");
  static constexpr std::array<std::array<std::size_t, 2>, 5> kPairs = {{{0, 1}, {2, 0}, {3, 2}, {4, 3}, {4, 1}}};
  AssignmentPlan plan;
  for (std::size_t i = 0; i < 5; ++i) {
    plan.instances.push_back(PlanInstance{static_cast<char>('A' + i),
                                          {algorithms[kPairs[i][0]], algorithms[kPairs[i][1]]},
                                          partitions[i]});
  }
  return plan;
}

inline std::vector<std::string> default_plan_algorithms() { return {"logreg", "rf", "mlp", "xgb", "svm"}; }

inline nlohmann::json to_json(const AssignmentPlan& plan) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& inst : plan.instances) {
    out.push_back({{"instance", std::string(1, inst.id)}, {"algorithms", inst.algorithms}, {"partition", inst.partition}});
  }
  return out;
}

struct InstanceResult {
  char instance = 'A';
  std::string algorithm;
  std::size_t partition = 0;
  CvResult cv;
};

struct PlanResult {
  std::vector<InstanceResult> instances;
  std::map<std::string, EvalReport> per_algorithm;
  std::vector<std::string> skipped;  // algorithms with no bound trainer
};

/// Runs k-fold CV for every (instance, algorithm) pair. Instance i uses CV
/// seed stream i, so a partition swap only affects the instances involved.
/// Per-algorithm reports average the two instance averages (wall clock
/// included). Algorithms without a trainer are skipped and listed.
inline PlanResult run_plan(const AssignmentPlan& plan, const std::map<std::size_t, DenseDataset>& datasets,
                           const std::map<std::string, Trainer>& trainers, std::uint64_t seed, std::size_t k = 5) {
  if (plan.instances.size() != 5) throw ConfigError("plan must have five instances");
  PlanResult out;
  std::map<std::string, std::vector<EvalReport>> collected;
  for (std::size_t i = 0; i < plan.instances.size(); ++i) {
    const auto& inst = plan.instances[i];
    auto data = datasets.find(inst.partition);
    if (data == datasets.end()) throw ConfigError("no dataset for partition " + std::to_string(inst.partition));
    for (const auto& algo : inst.algorithms) {
      auto tr = trainers.find(algo);
      if (tr == trainers.end()) {
        if (std::find(out.skipped.begin(), out.skipped.end(), algo) == out.skipped.end()) out.skipped.push_back(algo);
        continue;
      }
      auto cv = kfold_cv(data->second, k, tr->second, stream_seed(seed, i, 0));
      collected[algo].push_back(cv.average);
      out.instances.push_back({inst.id, algo, inst.partition, std::move(cv)});
    }
  }
  for (auto& [algo, reports] : collected) {
    EvalReport avg = average_reports(reports);
    avg.wall_clock_s /= static_cast<double>(reports.size());
    out.per_algorithm[algo] = avg;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid search

using ParamGrid = std::map<std::string, std::vector<double>>;
using ParamSet = std::map<std::string, double>;
using TrainerFactory = std::function<Trainer(const ParamSet&)>;

struct GridPoint {
  ParamSet params;
  EvalReport report;
  double score = 0.0;
};

struct GridResult {
  ParamSet best;
  std::size_t best_index = 0;
  std::vector<GridPoint> points;
};

// Cartesian product, parameter names in lexicographic order with the first
// name varying slowest.
inline std::vector<ParamSet> expand_grid(const ParamGrid& grid) {
  if (grid.empty()) throw ConfigError("grid is empty");
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw ConfigError("grid parameter '" + name + "' has no values");
  }
  std::vector<ParamSet> out;
  std::vector<std::size_t> pos(grid.size(), 0);
  while (true) {
    ParamSet p;
    std::size_t i = 0;
    for (const auto& [name, values] : grid) p[name] = values[pos[i++]];
    out.push_back(std::move(p));
    std::size_t d = grid.size();
    auto it = grid.rbegin();
    for (; d > 0; --d, ++it) {
      if (++pos[d - 1] < it->second.size()) break;
      pos[d - 1] = 0;
    }
    if (d == 0) break;
  }
  return out;
}

/// Scores every combination by mean k-fold RMSE (regression, lower wins) or
/// mean AUC (classification, higher wins); the earliest combination wins ties.
inline GridResult grid_search(const ParamGrid& grid, std::size_t k, const DenseDataset& ds,
                              const TrainerFactory& factory, std::uint64_t seed, Task task) {
  GridResult out;
  for (auto& params : expand_grid(grid)) {
    const auto cv = kfold_cv(ds, k, factory(params), seed, task);
    const auto& metric = task == Task::regression ? cv.average.rmse : cv.average.auc_roc;
    if (!metric) throw DataError("grid point produced no score");
    out.points.push_back({std::move(params), cv.average, *metric});
  }
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const double s = out.points[i].score, b = out.points[out.best_index].score;
    if (task == Task::regression ? s < b : s > b) out.best_index = i;
  }
  out.best = out.points[out.best_index].params;
  return out;
}

}  // namespace hdbench::eval
