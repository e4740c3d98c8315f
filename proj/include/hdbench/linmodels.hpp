#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdbench/bytes.hpp"
#include "hdbench/dataio/dense.hpp"
#include "hdbench/error.hpp"
#include "hdbench/random.hpp"
#include "json.hpp"

namespace hdbench {

enum class LinearKind { logistic, svm };

inline std::string to_string(LinearKind k) { return k == LinearKind::logistic ? "logistic" : "svm"; }

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LinearKind kind = LinearKind::logistic;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

// Per-example loss multipliers for label 0 and label 1.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  double of(double label01) const { return label01 > 0.5 ? positive : negative; }
  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

struct SgdConfig {
  double lambda = 1e-4;
  // Pegasos: total single-example iterations. Logistic: passes over the data.
  std::size_t epochs_or_iters = 10;
  std::size_t batch_size = 32;
  // Logistic only; Pegasos uses 1/(lambda t).
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::optional<ClassWeights> class_weights;
  // Pegasos ball projection onto ||w|| <= 1/sqrt(lambda).
  bool project = true;

  double weight_of(double label01) const { return class_weights ? class_weights->of(label01) : 1.0; }

  void validate() const {
    require(lambda > 0.0 && std::isfinite(lambda), "lambda must be > 0");
    require(epochs_or_iters > 0, "epochs_or_iters must be > 0");
    require(batch_size > 0, "batch_size must be > 0");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be > 0");
    if (class_weights) {
      require(class_weights->negative > 0.0 && class_weights->positive > 0.0, "class weights must be > 0");
    }
  }
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline void require_binary(const DenseDataset& ds) {
  if (ds.empty()) throw DataError("training set is empty");
  if (!ds.is_binary()) throw DataError("labels must be binary {0,1}");
}

}  // namespace detail

inline double raw_margin(const LinearModel& m, std::span<const double> x) { return detail::dot(m.weights, x) + m.bias; }

// <w,x>+b per row (svm), or its sigmoid (logistic).
inline std::vector<double> decision_scores(const LinearModel& model, const DenseDataset& ds) {
  if (ds.num_features() != model.weights.size()) {
    throw DataError("feature width " + std::to_string(ds.num_features()) + " does not match model width " +
                    std::to_string(model.weights.size()));
  }
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double z = raw_margin(model, ds.row(i));
    out[i] = model.kind == LinearKind::logistic ? detail::sigmoid(z) : z;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

/// Full-data objective: mean weighted cross-entropy + lambda/2 ||w||^2.
inline double logistic_objective(const LinearModel& m, const DenseDataset& ds, const SgdConfig& cfg) {
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double z = raw_margin(m, ds.row(i));
    const double y = ds.label(i);
    loss += cfg.weight_of(y) * (detail::softplus(z) - y * z);
  }
  const double reg = 0.5 * cfg.lambda * detail::dot(m.weights, m.weights);
  return loss / static_cast<double>(ds.size()) + reg;
}

// Gradient of logistic_objective; last entry is d/d bias.
inline std::vector<double> logistic_gradient(const LinearModel& m, const DenseDataset& ds, const SgdConfig& cfg) {
  const std::size_t f = ds.num_features();
  std::vector<double> g(f + 1, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.row(i);
    const double y = ds.label(i);
    const double r = cfg.weight_of(y) * (detail::sigmoid(raw_margin(m, x)) - y);
    for (std::size_t j = 0; j < f; ++j) g[j] += r * x[j];
    g[f] += r;
  }
  const double n = static_cast<double>(ds.size());
  for (auto& v : g) v /= n;
  for (std::size_t j = 0; j < f; ++j) g[j] += cfg.lambda * m.weights[j];
  return g;
}

/// One seeded pass of mini-batch gradient descent.
///
/// The data term takes a plain gradient step; the L2 term is applied as its
/// exact proximal step w <- w / (1 + lr*lambda), which is stable for any lambda.
/// Summation within a batch runs in batch order, so results are reproducible.
inline void logistic_epoch(LinearModel& model, const DenseDataset& ds, const SgdConfig& cfg, std::uint64_t epoch_seed) {
  const std::size_t n = ds.size();
  const std::size_t f = ds.num_features();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(epoch_seed);
  rng.shuffle(std::span(order));

  std::vector<double> grad(f);
  const double shrink = 1.0 / (1.0 + cfg.learning_rate * cfg.lambda);
  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    const std::size_t end = std::min(n, start + cfg.batch_size);
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const auto x = ds.row(order[k]);
      const double y = ds.label(order[k]);
      const double r = cfg.weight_of(y) * (detail::sigmoid(raw_margin(model, x)) - y);
      for (std::size_t j = 0; j < f; ++j) grad[j] += r * x[j];
      grad_bias += r;
    }
    const double step = cfg.learning_rate / static_cast<double>(end - start);
    for (std::size_t j = 0; j < f; ++j) model.weights[j] = (model.weights[j] - step * grad[j]) * shrink;
    model.bias -= step * grad_bias;
  }
}

inline LinearModel train_logistic(const DenseDataset& ds, const SgdConfig& cfg) {
  cfg.validate();
  detail::require_binary(ds);
  LinearModel model{std::vector<double>(ds.num_features(), 0.0), 0.0, LinearKind::logistic};
  for (std::size_t epoch = 0; epoch < cfg.epochs_or_iters; ++epoch) {
    logistic_epoch(model, ds, cfg, stream_seed(cfg.seed, 0, epoch));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Pegasos primal SVM

/// lambda/2 ||w||^2 + mean_i c_i max(0, 1 - y_i(<w,x_i>+b)), y in {-1,+1}.
inline double svm_primal_objective(const LinearModel& m, const DenseDataset& ds, const SgdConfig& cfg) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double y = ds.label(i) > 0.5 ? 1.0 : -1.0;
    hinge += cfg.weight_of(ds.label(i)) * std::max(0.0, 1.0 - y * raw_margin(m, ds.row(i)));
  }
  return 0.5 * cfg.lambda * detail::dot(m.weights, m.weights) + hinge / static_cast<double>(ds.size());
}

// Called after every Pegasos iteration with the post-projection model.
using PegasosHook = std::function<void(const LinearModel&, std::uint64_t t)>;

/// Runs iterations t_start+1 .. t_start+steps, drawing example indices from a
/// generator seeded with `chunk_seed`.
inline void pegasos_steps(LinearModel& model, const DenseDataset& ds, const SgdConfig& cfg, std::uint64_t t_start,
                          std::size_t steps, std::uint64_t chunk_seed, const PegasosHook& hook = {}) {
  const std::size_t f = ds.num_features();
  const double radius = 1.0 / std::sqrt(cfg.lambda);
  Rng rng(chunk_seed);
  auto& w = model.weights;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::uint64_t t = t_start + s + 1;
    const std::size_t i = rng.below(ds.size());
    const auto x = ds.row(i);
    const double y = ds.label(i) > 0.5 ? 1.0 : -1.0;
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const bool violated = y * raw_margin(model, x) < 1.0;
    const double decay = 1.0 - eta * cfg.lambda;
    if (violated) {
      const double push = eta * cfg.weight_of(ds.label(i)) * y;
      for (std::size_t j = 0; j < f; ++j) w[j] = decay * w[j] + push * x[j];
      model.bias += push;
    } else {
      for (auto& v : w) v *= decay;
    }
    if (cfg.project) {
      const double norm = std::sqrt(detail::dot(w, w));
      if (norm > radius) {
        const double scale = radius / norm;
        for (auto& v : w) v *= scale;
      }
    }
    if (hook) hook(model, t);
  }
}

/// Pegasos with T = cfg.epochs_or_iters single-example iterations.
///
/// Iterations are drawn in chunks of one pass (n steps); chunk e uses the
/// stream seed (cfg.seed, 0, e). The distributed harness replays exactly this
/// schedule, one chunk per round.
inline LinearModel train_pegasos(const DenseDataset& ds, const SgdConfig& cfg, const PegasosHook& hook = {}) {
  cfg.validate();
  detail::require_binary(ds);
  LinearModel model{std::vector<double>(ds.num_features(), 0.0), 0.0, LinearKind::svm};
  const std::uint64_t total = cfg.epochs_or_iters;
  const std::uint64_t n = ds.size();
  for (std::uint64_t chunk = 0; chunk * n < total; ++chunk) {
    const std::uint64_t done = chunk * n;
    pegasos_steps(model, ds, cfg, done, static_cast<std::size_t>(std::min(n, total - done)),
                  stream_seed(cfg.seed, 0, chunk), hook);
  }
  return model;
}

// One local pass of the selected trainer, as run by a distributed worker in
// `round`. Logistic: one epoch. SVM: n Pegasos iterations continuing the
// global step count round * n.
inline void local_epoch(LinearModel& model, const DenseDataset& ds, const SgdConfig& cfg, std::uint64_t worker_id,
                        std::uint64_t round) {
  const auto seed = stream_seed(cfg.seed, worker_id, round);
  if (model.kind == LinearKind::logistic) {
    logistic_epoch(model, ds, cfg, seed);
  } else {
    pegasos_steps(model, ds, cfg, round * ds.size(), ds.size(), seed);
  }
}

// ---------------------------------------------------------------------------
// Artifacts

inline nlohmann::json config_to_json(const SgdConfig& cfg) {
  nlohmann::json j{{"lambda", cfg.lambda},
                   {"epochs_or_iters", cfg.epochs_or_iters},
                   {"batch_size", cfg.batch_size},
                   {"learning_rate", cfg.learning_rate},
                   {"project", cfg.project}};
  j["class_weights"] = cfg.class_weights
                           ? nlohmann::json::array({cfg.class_weights->negative, cfg.class_weights->positive})
                           : nlohmann::json(nullptr);
  return j;
}

inline SgdConfig sgd_config_from_json(const nlohmann::json& j, std::uint64_t seed) {
  SgdConfig cfg;
  cfg.lambda = j.at("lambda").get<double>();
  cfg.epochs_or_iters = j.at("epochs_or_iters").get<std::size_t>();
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.project = j.value("project", true);
  if (j.contains("class_weights") && !j["class_weights"].is_null()) {
    cfg.class_weights = ClassWeights{j["class_weights"].at(0).get<double>(), j["class_weights"].at(1).get<double>()};
  }
  cfg.seed = seed;
  return cfg;
}

inline nlohmann::json to_artifact(const LinearModel& model, const SgdConfig& cfg) {
  return {{"kind", to_string(model.kind)},
          {"num_features", model.weights.size()},
          {"weights_b64", bytes::f64_vector_to_base64(model.weights)},
          {"bias", model.bias},
          {"config", config_to_json(cfg)},
          {"seed", cfg.seed}};
}

inline LinearModel linear_model_from_artifact(const nlohmann::json& j) {
  try {
    LinearModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "logistic") {
      m.kind = LinearKind::logistic;
    } else if (kind == "svm") {
      m.kind = LinearKind::svm;
    } else {
      throw DataError("not a linear model artifact: kind '" + kind + "'");
    }
    m.weights = bytes::f64_vector_from_base64(j.at("weights_b64").get<std::string>());
    if (m.weights.size() != j.at("num_features").get<std::size_t>()) {
      throw DataError("weights_b64 length does not match num_features");
    }
    m.bias = j.at("bias").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed linear model artifact: ") + e.what());
  }
}

}  // namespace hdbench
