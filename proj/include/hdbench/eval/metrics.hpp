#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdbench/error.hpp"

namespace hdbench::eval {

// confusion[actual][predicted]
using Confusion = std::array<std::array<std::size_t, 2>, 2>;

struct ConfusionAndAccuracy {
  Confusion confusion{};
  double accuracy = 0.0;
};

inline ConfusionAndAccuracy confusion_and_accuracy(std::span<const int> labels, std::span<const int> predictions) {
  if (labels.size() != predictions.size()) throw DataError("labels and predictions differ in length");
  if (labels.empty()) throw DataError("no rows to evaluate");
  ConfusionAndAccuracy out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], p = predictions[i];
    if ((y != 0 && y != 1) || (p != 0 && p != 1)) throw DataError("confusion matrix needs binary labels");
    ++out.confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(p)];
  }
  out.accuracy = static_cast<double>(out.confusion[0][0] + out.confusion[1][1]) / static_cast<double>(labels.size());
  return out;
}

struct MacroPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Unweighted means over all `num_classes` classes, absent ones included;
/// every 0/0 is taken as 0.
inline MacroPrf macro_prf(std::span<const int> labels, std::span<const int> predictions, std::size_t num_classes) {
  if (labels.size() != predictions.size()) throw DataError("labels and predictions differ in length");
  require(num_classes >= 1, "num_classes must be >= 1");
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], p = predictions[i];
    if (y < 0 || p < 0 || static_cast<std::size_t>(y) >= num_classes || static_cast<std::size_t>(p) >= num_classes) {
      throw DataError("class index out of range");
    }
    if (y == p) {
      ++tp[static_cast<std::size_t>(y)];
    } else {
      ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(y)];
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  MacroPrf out;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double p = ratio(tp[c], tp[c] + fp[c]);
    const double r = ratio(tp[c], tp[c] + fn[c]);
    out.precision += p;
    out.recall += r;
    out.f1 += (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  const auto k = static_cast<double>(num_classes);
  out.precision /= k;
  out.recall /= k;
  out.f1 /= k;
  return out;
}

/// Mann-Whitney AUC with average ranks for ties:
/// (R_pos - n_pos(n_pos+1)/2) / (n_pos n_neg).
inline double auc_roc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DataError("labels and scores differ in length");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("auc_roc needs binary labels");
    if (!std::isfinite(scores[i])) throw DataError("auc_roc needs finite scores");
    n_pos += labels[i] == 1 ? 1 : 0;
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc_roc is undefined with a single class");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j share their average
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;  // absent when the targets have zero variance
};

inline RegressionMetrics regression_metrics(std::span<const double> targets, std::span<const double> predictions) {
  if (targets.size() != predictions.size()) throw DataError("targets and predictions differ in length");
  if (targets.size() < 2) throw DataError("regression metrics need at least 2 rows");
  const double n = static_cast<double>(targets.size());
  const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double ss_res = 0.0, abs_sum = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double e = targets[i] - predictions[i];
    ss_res += e * e;
    abs_sum += std::abs(e);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  RegressionMetrics out{std::sqrt(ss_res / n), abs_sum / n, std::nullopt};
  if (ss_tot > 0.0) out.r2 = 1.0 - ss_res / ss_tot;
  return out;
}

// R^2 alone; zero target variance is an error here.
inline double r_squared(std::span<const double> targets, std::span<const double> predictions) {
  const auto m = regression_metrics(targets, predictions);
  if (!m.r2) throw DataError("r2 is undefined for targets with zero variance");
  return *m.r2;
}

}  // namespace hdbench::eval
