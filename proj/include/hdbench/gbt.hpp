#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hdbench/error.hpp"
#include "json.hpp"

namespace hdbench::gbt {

struct GbtConfig {
  std::size_t max_depth = 10;
  double eta = 0.05;
  std::size_t num_round = 300;
  double min_child_weight = 5.0;
  double lambda = 1.5;
  double gamma = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    require(max_depth >= 1, "max_depth must be >= 1");
    require(eta > 0.0 && eta <= 1.0, "eta must be in (0,1]");
    require(num_round >= 1, "num_round must be >= 1");
    require(min_child_weight >= 0.0, "min_child_weight must be >= 0");
    require(lambda >= 0.0, "lambda must be >= 0");
    require(gamma >= 0.0, "gamma must be >= 0");
  }
};

// Flat binary tree. Leaves have feature == -1. `value` holds the threshold
// for internal nodes and the eta-scaled leaf weight for leaves.
struct Node {
  int feature = -1;
  double value = 0.0;
  int left = -1;
  int right = -1;
  double hessian_sum = 0.0;  // training hessian mass reaching the node
  double gain = 0.0;         // split gain for internal nodes

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = x[static_cast<std::size_t>(n.feature)] <= n.value ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }

  std::size_t depth() const { return depth_from(0); }

private:
  std::size_t depth_from(int i) const {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }
};

struct GbtModel {
  std::size_t num_features = 0;
  double base_score = 0.0;
  std::vector<Tree> trees;
};

/// Row-major feature matrix view.
struct MatrixView {
  std::span<const double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return values.subspan(r * cols, cols); }
};

// Split objective pieces for squared error with lambda-regularized leaves.
inline double structure_score(double g, double h, double lambda) { return g * g / (h + lambda); }

inline double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma) {
  return 0.5 * (structure_score(gl, hl, lambda) + structure_score(gr, hr, lambda) -
                structure_score(gl + gr, hl + hr, lambda)) -
         gamma;
}

// Threshold strictly between lo < hi such that lo <= t < hi.
inline double midpoint(double lo, double hi) {
  const double t = lo + (hi - lo) / 2.0;
  return t < hi ? t : lo;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  double g_left = 0.0, h_left = 0.0;

  bool valid() const { return feature >= 0; }
};

namespace detail {

struct Builder {
  const MatrixView& x;
  const GbtConfig& cfg;
  const std::vector<std::vector<std::uint32_t>>& sorted;  // per feature, rows in ascending value order
  const std::vector<bool>& varying;                       // feature not constant over the training set
  std::span<const double> grad;

  // Node membership per row; -1 once a row settles in a finished leaf.
  std::vector<int> node_of;

  struct Open {
    int node;
    double g, h;
  };

  Tree grow(std::size_t n) {
    Tree tree;
    node_of.assign(n, 0);
    double g0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) g0 += grad[i];
    tree.nodes.push_back(Node{-1, 0.0, -1, -1, static_cast<double>(n), 0.0});
    std::vector<Open> frontier{{0, g0, static_cast<double>(n)}};

    for (std::size_t depth = 0; !frontier.empty(); ++depth) {
      std::vector<SplitCandidate> best(tree.nodes.size());
      if (depth < cfg.max_depth) find_splits(frontier, tree.nodes.size(), best);
      std::vector<Open> next;
      for (const auto& open : frontier) {
        const auto& cand = best[static_cast<std::size_t>(open.node)];
        if (!cand.valid()) {
          auto& leaf = tree.nodes[static_cast<std::size_t>(open.node)];
          leaf.value = cfg.eta * (-open.g / (open.h + cfg.lambda)) + 0.0;
          continue;
        }
        const int left = static_cast<int>(tree.nodes.size());
        const int right = left + 1;
        const double gr = open.g - cand.g_left;
        const double hr = open.h - cand.h_left;
        tree.nodes.push_back(Node{-1, 0.0, -1, -1, cand.h_left, 0.0});
        tree.nodes.push_back(Node{-1, 0.0, -1, -1, hr, 0.0});
        auto& node = tree.nodes[static_cast<std::size_t>(open.node)];
        node.feature = cand.feature;
        node.value = cand.threshold;
        node.left = left;
        node.right = right;
        node.gain = cand.gain;
        next.push_back({left, cand.g_left, cand.h_left});
        next.push_back({right, gr, hr});
      }
      // Route rows of split nodes to their children; rows in new leaves retire.
      for (std::size_t i = 0; i < n; ++i) {
        const int nd = node_of[i];
        if (nd < 0) continue;
        const auto& node = tree.nodes[static_cast<std::size_t>(nd)];
        if (node.is_leaf()) {
          node_of[i] = -1;
        } else {
          node_of[i] = x.at(i, static_cast<std::size_t>(node.feature)) <= node.value ? node.left : node.right;
        }
      }
      frontier = std::move(next);
    }
    return tree;
  }

  // One sweep per feature over the presorted order evaluates every open
  // node at once (exact greedy: every boundary between distinct values).
  // Features ascend and thresholds ascend within a feature; only a strictly
  // larger gain replaces the incumbent, giving the (gain, feature, threshold)
  // tie-break.
  void find_splits(const std::vector<Open>& frontier, std::size_t num_nodes, std::vector<SplitCandidate>& best) {
    std::vector<double> total_g(num_nodes, 0.0), total_h(num_nodes, 0.0);
    std::vector<char> open(num_nodes, 0);
    for (const auto& o : frontier) {
      total_g[static_cast<std::size_t>(o.node)] = o.g;
      total_h[static_cast<std::size_t>(o.node)] = o.h;
      open[static_cast<std::size_t>(o.node)] = 1;
    }
    std::vector<double> acc_g(num_nodes), acc_h(num_nodes), last_value(num_nodes);
    std::vector<char> started(num_nodes);
    for (std::size_t f = 0; f < x.cols; ++f) {
      if (!varying[f]) continue;
      std::fill(acc_g.begin(), acc_g.end(), 0.0);
      std::fill(acc_h.begin(), acc_h.end(), 0.0);
      std::fill(started.begin(), started.end(), 0);
      for (std::uint32_t row : sorted[f]) {
        const int nd = node_of[row];
        if (nd < 0) continue;
        const auto k = static_cast<std::size_t>(nd);
        if (!open[k]) continue;
        const double v = x.at(row, f);
        if (started[k] && v > last_value[k]) {
          consider(k, f, last_value[k], v, acc_g[k], acc_h[k], total_g[k], total_h[k], best);
        }
        acc_g[k] += grad[row];
        acc_h[k] += 1.0;
        last_value[k] = v;
        started[k] = 1;
      }
    }
  }

  void consider(std::size_t k, std::size_t f, double lo, double hi, double gl, double hl, double g, double h,
                std::vector<SplitCandidate>& best) const {
    const double hr = h - hl;
    if (hl < cfg.min_child_weight || hr < cfg.min_child_weight) return;
    const double gain = split_gain(gl, hl, g - gl, hr, cfg.lambda, cfg.gamma);
    if (!(gain > 0.0)) return;
    auto& b = best[k];
    if (!b.valid() || gain > b.gain) b = SplitCandidate{gain, static_cast<int>(f), midpoint(lo, hi), gl, hl};
  }
};

}  // namespace detail

// Per-round hook with the training predictions after that round.
using RoundHook = std::function<void(std::size_t round, std::span<const double> predictions)>;

/// Squared-error boosting with exact greedy splits.
///
/// g_i = pred_i - y_i, h_i = 1; gain is the lambda-regularized structure score
/// difference minus gamma; a split needs gain > 0 and hessian mass >=
/// min_child_weight on both sides; leaves store eta * (-G/(H+lambda)).
inline GbtModel fit(const MatrixView& x, std::span<const double> targets, const GbtConfig& cfg,
                    std::vector<double>* final_predictions = nullptr, const RoundHook& hook = {}) {
  cfg.validate();
  const std::size_t n = x.rows;
  if (n < 2) throw DataError("gbt fit needs at least 2 rows");
  if (targets.size() != n) throw DataError("target count does not match row count");
  if (x.values.size() != n * x.cols) throw DataError("feature matrix size does not match rows*cols");
  for (double v : x.values) {
    if (std::isnan(v)) throw DataError("NaN in gbt features");
  }
  for (double v : targets) {
    if (std::isnan(v)) throw DataError("NaN in gbt targets");
  }

  std::vector<std::vector<std::uint32_t>> sorted(x.cols);
  std::vector<bool> varying(x.cols, false);
  for (std::size_t f = 0; f < x.cols; ++f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x.at(a, f) < x.at(b, f); });
    varying[f] = x.at(order.front(), f) < x.at(order.back(), f);
  }

  GbtModel model;
  model.num_features = x.cols;
  model.base_score = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);
  std::vector<double> pred(n, model.base_score);
  std::vector<double> grad(n);
  for (std::size_t round = 0; round < cfg.num_round; ++round) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - targets[i];
    detail::Builder builder{x, cfg, sorted, varying, grad, {}};
    model.trees.push_back(builder.grow(n));
    const Tree& tree = model.trees.back();
    for (std::size_t i = 0; i < n; ++i) pred[i] += tree.predict(x.row(i));
    if (hook) hook(round, pred);
  }
  if (final_predictions) *final_predictions = pred;
  return model;
}

// base_score + sum of stored (already eta-scaled) leaf values, x <= t goes left.
inline std::vector<double> predict(const GbtModel& model, const MatrixView& x) {
  if (x.cols != model.num_features) {
    throw DataError("feature width " + std::to_string(x.cols) + " does not match model width " +
                    std::to_string(model.num_features));
  }
  std::vector<double> out(x.rows, model.base_score);
  for (const auto& tree : model.trees) {
    for (std::size_t i = 0; i < x.rows; ++i) out[i] += tree.predict(x.row(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts: preorder nodes {"f","t","l","r"} or {"w"}.

inline nlohmann::json tree_to_json(const Tree& tree, int i = 0) {
  const auto& n = tree.nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) return {{"w", n.value}};
  return {{"f", n.feature}, {"t", n.value}, {"l", tree_to_json(tree, n.left)}, {"r", tree_to_json(tree, n.right)}};
}

inline int tree_from_json(const nlohmann::json& j, Tree& tree) {
  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("w")) {
    tree.nodes.back().value = j.at("w").get<double>();
    return idx;
  }
  const int feature = j.at("f").get<int>();
  if (feature < 0) throw DataError("negative feature index in tree artifact");
  const double threshold = j.at("t").get<double>();
  const int left = tree_from_json(j.at("l"), tree);
  const int right = tree_from_json(j.at("r"), tree);
  auto& n = tree.nodes[static_cast<std::size_t>(idx)];
  n.feature = feature;
  n.value = threshold;
  n.left = left;
  n.right = right;
  return idx;
}

inline nlohmann::json to_artifact(const GbtModel& m, const GbtConfig& cfg) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
  return {{"kind", "gbt"},
          {"num_features", m.num_features},
          {"base_score", m.base_score},
          {"trees", trees},
          {"config",
           {{"max_depth", cfg.max_depth},
            {"eta", cfg.eta},
            {"num_round", cfg.num_round},
            {"min_child_weight", cfg.min_child_weight},
            {"lambda", cfg.lambda},
            {"gamma", cfg.gamma}}},
          {"seed", cfg.seed}};
}

inline GbtModel gbt_model_from_artifact(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "gbt") throw DataError("not a gbt artifact");
    GbtModel m;
    m.num_features = j.at("num_features").get<std::size_t>();
    m.base_score = j.at("base_score").get<double>();
    for (const auto& t : j.at("trees")) {
      Tree tree;
      tree_from_json(t, tree);
      for (const auto& n : tree.nodes) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= m.num_features) {
          throw DataError("tree references feature beyond num_features");
        }
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed gbt artifact: ") + e.what());
  }
}

}  // namespace hdbench::gbt
