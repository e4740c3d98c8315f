#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hdbench/bytes.hpp"
#include "hdbench/dataio/dense.hpp"
#include "hdbench/error.hpp"
#include "hdbench/linmodels.hpp"
#include "hdbench/random.hpp"
#include "json.hpp"

namespace hdbench::mlp {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct MlpArchitecture {
  std::size_t input_size = 2000;
  std::size_t hidden_size = 128;
  std::size_t num_hidden_blocks = 2;
  std::size_t output_size = 2;
  // Drop probability; survivors are scaled by 1/(1-p).
  double dropout_p = 0.8;

  void validate() const {
    require(input_size >= 1 && hidden_size >= 1 && output_size >= 1, "MLP sizes must be >= 1");
    require(dropout_p >= 0.0 && dropout_p < 1.0, "dropout_p must be in [0,1)");
  }
};

struct MlpTrainConfig {
  double learning_rate = 1e-5;
  double weight_decay = 1e-4;
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
  std::uint64_t seed = 0;
  std::optional<ClassWeights> class_weights;

  void validate() const {
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(weight_decay >= 0.0, "weight_decay must be >= 0");
    require(epochs >= 1, "epochs must be >= 1");
    require(batch_size >= 2, "batch_size must be >= 2 (batch normalization needs two rows)");
    require(adam_beta1 > 0.0 && adam_beta1 < 1.0, "adam_beta1 must be in (0,1)");
    require(adam_beta2 > 0.0 && adam_beta2 < 1.0, "adam_beta2 must be in (0,1)");
    require(adam_eps > 0.0, "adam_eps must be > 0");
    require(bn_momentum > 0.0 && bn_momentum <= 1.0, "bn_momentum must be in (0,1]");
    require(bn_eps > 0.0, "bn_eps must be > 0");
  }
};

enum class Mode { train, eval };

// FC -> BN -> ReLU -> Dropout. `weight` is out x in.
struct HiddenBlock {
  Eigen::MatrixXd weight;
  Vector bias;
  Vector bn_scale;
  Vector bn_shift;
  Vector running_mean;
  Vector running_var;
};

struct MlpModel {
  MlpArchitecture arch;
  std::vector<HiddenBlock> blocks;
  Eigen::MatrixXd out_weight;
  Vector out_bias;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
  Mode mode = Mode::train;
};

/// Seeded uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases, BN scale 1
/// shift 0, running statistics (0, 1).
inline MlpModel init_model(const MlpArchitecture& arch, std::uint64_t seed, double bn_momentum = 0.1,
                           double bn_eps = 1e-5) {
  arch.validate();
  Rng rng(seed);
  auto glorot = [&rng](std::size_t rows, std::size_t cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    }
    return w;
  };
  MlpModel m;
  m.arch = arch;
  m.bn_momentum = bn_momentum;
  m.bn_eps = bn_eps;
  std::size_t fan_in = arch.input_size;
  const auto h = static_cast<Eigen::Index>(arch.hidden_size);
  for (std::size_t b = 0; b < arch.num_hidden_blocks; ++b) {
    HiddenBlock blk;
    blk.weight = glorot(arch.hidden_size, fan_in);
    blk.bias = Vector::Zero(h);
    blk.bn_scale = Vector::Ones(h);
    blk.bn_shift = Vector::Zero(h);
    blk.running_mean = Vector::Zero(h);
    blk.running_var = Vector::Ones(h);
    m.blocks.push_back(std::move(blk));
    fan_in = arch.hidden_size;
  }
  m.out_weight = glorot(arch.output_size, fan_in);
  m.out_bias = Vector::Zero(static_cast<Eigen::Index>(arch.output_size));
  return m;
}

// Per-block intermediates of a train-mode pass, kept for backpropagation.
struct BlockTrace {
  Matrix input;
  Matrix normalized;  // x-hat: post-BN, before scale/shift
  Vector inv_std;
  Matrix pre_relu;    // scale * x-hat + shift
  Matrix mask;        // dropout multipliers (0 or 1/(1-p))
};

struct ForwardTrace {
  std::vector<BlockTrace> blocks;
  Matrix last_hidden;
};

namespace detail {

inline void check_width(const MlpModel& m, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != m.arch.input_size) {
    throw DataError("batch width " + std::to_string(x.cols()) + " does not match input_size " +
                    std::to_string(m.arch.input_size));
  }
  if (x.rows() < 1) throw DataError("empty batch");
}

}  // namespace detail

/// Eval-mode forward pass: running BN statistics, dropout is the identity.
/// Pure; safe to call concurrently on a shared model.
inline Matrix forward(const MlpModel& m, const Matrix& x) {
  detail::check_width(m, x);
  Matrix h = x;
  for (const auto& blk : m.blocks) {
    Matrix z = (h * blk.weight.transpose()).rowwise() + blk.bias.transpose();
    const Vector inv_std = (blk.running_var.array() + m.bn_eps).rsqrt();
    z = ((z.rowwise() - blk.running_mean.transpose()).array().rowwise() * inv_std.transpose().array()).matrix();
    z = ((z.array().rowwise() * blk.bn_scale.transpose().array()).rowwise() + blk.bn_shift.transpose().array())
            .matrix();
    h = z.cwiseMax(0.0);
  }
  return (h * m.out_weight.transpose()).rowwise() + m.out_bias.transpose();
}

// Which statistics a train-mode pass normalizes with. `running` freezes BN
// (no update) and keeps dropout active.
enum class BnStats { batch, running };

/// Train-mode forward pass: batch statistics (and running-statistic update),
/// seeded dropout masks. Requires at least two rows unless BN is frozen.
inline Matrix forward_train(MlpModel& m, const Matrix& x, Rng& rng, ForwardTrace* trace = nullptr,
                            BnStats stats = BnStats::batch) {
  detail::check_width(m, x);
  if (stats == BnStats::batch && x.rows() < 2) throw DataError("train-mode forward needs a batch of at least 2 rows");
  const auto batch = static_cast<double>(x.rows());
  const double p = m.arch.dropout_p;
  if (trace) trace->blocks.clear();
  Matrix h = x;
  for (auto& blk : m.blocks) {
    BlockTrace bt;
    if (trace) bt.input = h;
    Matrix z = (h * blk.weight.transpose()).rowwise() + blk.bias.transpose();
    Vector mean, var;
    if (stats == BnStats::batch) {
      mean = z.colwise().mean().transpose();
      var = (z.rowwise() - mean.transpose()).array().square().colwise().sum().transpose() / batch;
    } else {
      mean = blk.running_mean;
      var = blk.running_var;
    }
    const Vector inv_std = (var.array() + m.bn_eps).rsqrt();
    Matrix xhat = ((z.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array()).matrix();
    if (stats == BnStats::batch) {
      blk.running_mean = (1.0 - m.bn_momentum) * blk.running_mean + m.bn_momentum * mean;
      blk.running_var = (1.0 - m.bn_momentum) * blk.running_var + m.bn_momentum * (var * (batch / (batch - 1.0)));
    }
    Matrix y =
        ((xhat.array().rowwise() * blk.bn_scale.transpose().array()).rowwise() + blk.bn_shift.transpose().array())
            .matrix();
    Matrix mask(y.rows(), y.cols());
    if (p > 0.0) {
      const double keep_scale = 1.0 / (1.0 - p);
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = rng.uniform() < p ? 0.0 : keep_scale;
      }
    } else {
      mask.setOnes();
    }
    h = y.cwiseMax(0.0).cwiseProduct(mask);
    if (trace) {
      bt.normalized = std::move(xhat);
      bt.inv_std = inv_std;
      bt.pre_relu = std::move(y);
      bt.mask = std::move(mask);
      trace->blocks.push_back(std::move(bt));
    }
  }
  if (trace) trace->last_hidden = h;
  return (h * m.out_weight.transpose()).rowwise() + m.out_bias.transpose();
}

// Row-wise softmax with max subtraction.
inline Matrix softmax(const Matrix& logits) {
  Matrix out = logits.colwise() - logits.rowwise().maxCoeff();
  out = out.array().exp().matrix();
  const Vector sums = out.rowwise().sum();
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) /= sums(r);
  return out;
}

// (1/B) sum_i c_{y_i} * CE_i. With weights, a lone label-0 example under
// (2,1) costs exactly twice its unweighted loss.
inline double cross_entropy(const Matrix& logits, std::span<const int> labels,
                            const std::optional<ClassWeights>& weights) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    const double lse = mx + std::log((logits.row(r).array() - mx).exp().sum());
    const int y = labels[static_cast<std::size_t>(r)];
    const double c = weights ? weights->of(static_cast<double>(y)) : 1.0;
    total += c * (lse - logits(r, y));
  }
  return total / static_cast<double>(logits.rows());
}

struct BlockGradients {
  Eigen::MatrixXd weight;
  Vector bias;
  Vector bn_scale;
  Vector bn_shift;
};

struct MlpGradients {
  std::vector<BlockGradients> blocks;
  Eigen::MatrixXd out_weight;
  Vector out_bias;
};

struct LossAndGradients {
  double loss = 0.0;
  MlpGradients gradients;
};

/// Weighted softmax cross-entropy and its reverse-mode gradients through
/// dropout masks and batch-statistics BN. The model must be in train mode.
inline LossAndGradients loss_and_gradients(MlpModel& m, const Matrix& batch, std::span<const int> labels,
                                           const std::optional<ClassWeights>& weights, Rng& rng) {
  if (m.mode != Mode::train) throw ConfigError("loss_and_gradients requires a model in train mode");
  if (labels.size() != static_cast<std::size_t>(batch.rows())) throw DataError("label count does not match batch");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= m.arch.output_size) throw DataError("label out of range");
  }
  ForwardTrace trace;
  const Matrix logits = forward_train(m, batch, rng, &trace);
  LossAndGradients out;
  out.loss = cross_entropy(logits, labels, weights);

  const auto rows = static_cast<double>(batch.rows());
  Matrix dlogits = softmax(logits);
  for (Eigen::Index r = 0; r < dlogits.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    dlogits(r, y) -= 1.0;
    const double c = weights ? weights->of(static_cast<double>(y)) : 1.0;
    dlogits.row(r) *= c / rows;
  }
  auto& g = out.gradients;
  g.out_weight = dlogits.transpose() * trace.last_hidden;
  g.out_bias = dlogits.colwise().sum().transpose();
  Matrix dh = dlogits * m.out_weight;

  g.blocks.resize(m.blocks.size());
  for (std::size_t b = m.blocks.size(); b-- > 0;) {
    const auto& blk = m.blocks[b];
    const auto& bt = trace.blocks[b];
    Matrix dy = dh.cwiseProduct(bt.mask);
    dy = (bt.pre_relu.array() > 0.0).select(dy, 0.0);
    auto& gb = g.blocks[b];
    gb.bn_scale = dy.cwiseProduct(bt.normalized).colwise().sum().transpose();
    gb.bn_shift = dy.colwise().sum().transpose();
    const Matrix dxhat = (dy.array().rowwise() * blk.bn_scale.transpose().array()).matrix();
    const Eigen::RowVectorXd sum_dxhat = dxhat.colwise().sum();
    const Eigen::RowVectorXd sum_dxhat_xhat = dxhat.cwiseProduct(bt.normalized).colwise().sum();
    Matrix dz = (rows * dxhat).rowwise() - sum_dxhat;
    dz -= (bt.normalized.array().rowwise() * sum_dxhat_xhat.array()).matrix();
    dz = (dz.array().rowwise() * (bt.inv_std.transpose().array() / rows)).matrix();
    gb.weight = dz.transpose() * bt.input;
    gb.bias = dz.colwise().sum().transpose();
    if (b > 0) dh = dz * blk.weight;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flat parameter views, shared by the optimizer and the gradient checks.

struct ParamSlot {
  std::span<double> values;
  bool decayed;  // affine weights receive weight decay; biases and BN do not
};

inline std::vector<ParamSlot> parameter_slots(MlpModel& m) {
  std::vector<ParamSlot> out;
  auto add = [&out](auto& t, bool decayed) { out.push_back({{t.data(), static_cast<std::size_t>(t.size())}, decayed}); };
  for (auto& blk : m.blocks) {
    add(blk.weight, true);
    add(blk.bias, false);
    add(blk.bn_scale, false);
    add(blk.bn_shift, false);
  }
  add(m.out_weight, true);
  add(m.out_bias, false);
  return out;
}

inline std::vector<std::span<double>> gradient_slots(MlpGradients& g) {
  std::vector<std::span<double>> out;
  auto add = [&out](auto& t) { out.push_back({t.data(), static_cast<std::size_t>(t.size())}); };
  for (auto& blk : g.blocks) {
    add(blk.weight);
    add(blk.bias);
    add(blk.bn_scale);
    add(blk.bn_shift);
  }
  add(g.out_weight);
  add(g.out_bias);
  return out;
}

/// Adam with coupled L2: weight_decay * theta is added to the gradient of
/// affine weights before the moment updates.
class Adam {
public:
  Adam(const MlpTrainConfig& cfg, MlpModel& model) : cfg_(cfg) {
    for (const auto& slot : parameter_slots(model)) {
      first_.emplace_back(slot.values.size(), 0.0);
      second_.emplace_back(slot.values.size(), 0.0);
    }
  }

  void step(MlpModel& model, MlpGradients& grads) {
    ++t_;
    const double correction1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double correction2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
    auto params = parameter_slots(model);
    auto gs = gradient_slots(grads);
    for (std::size_t s = 0; s < params.size(); ++s) {
      auto& m1 = first_[s];
      auto& m2 = second_[s];
      const auto theta = params[s].values;
      const auto g = gs[s];
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double gi = g[i] + (params[s].decayed ? cfg_.weight_decay * theta[i] : 0.0);
        m1[i] = cfg_.adam_beta1 * m1[i] + (1.0 - cfg_.adam_beta1) * gi;
        m2[i] = cfg_.adam_beta2 * m2[i] + (1.0 - cfg_.adam_beta2) * gi * gi;
        const double mhat = m1[i] / correction1;
        const double vhat = m2[i] / correction2;
        theta[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
      }
    }
  }

private:
  MlpTrainConfig cfg_;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
  std::uint64_t t_ = 0;
};

// ---------------------------------------------------------------------------
// Training

struct EpochLoss {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochLoss> curve;
};

inline Matrix rows_of(const DenseDataset& ds, std::span<const std::size_t> idx) {
  Matrix x(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(ds.num_features()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto row = ds.row(idx[r]);
    for (std::size_t c = 0; c < row.size(); ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return x;
}

inline std::vector<int> labels_of(const DenseDataset& ds, std::span<const std::size_t> idx) {
  std::vector<int> y(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) y[r] = static_cast<int>(ds.label(idx[r]));
  return y;
}

/// Trains on a seeded 90/10 train/validation split; the validation part only
/// feeds the learning curve. A trailing batch of one row is skipped since
/// batch statistics are undefined for it.
inline TrainResult train(const DenseDataset& ds, const MlpArchitecture& arch, const MlpTrainConfig& cfg) {
  arch.validate();
  cfg.validate();
  if (ds.num_features() != arch.input_size) {
    throw DataError("dataset has " + std::to_string(ds.num_features()) + " features, architecture expects " +
                    std::to_string(arch.input_size));
  }
  for (double y : ds.labels()) {
    if (y < 0.0 || y != std::floor(y) || y >= static_cast<double>(arch.output_size)) {
      throw DataError("labels must be integers in [0, output_size)");
    }
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(stream_seed(cfg.seed, 0, 0));
  split_rng.shuffle(std::span(order));
  const std::size_t val_count = std::max<std::size_t>(1, ds.size() / 10);
  if (val_count >= ds.size()) throw DataError("dataset too small for a train/validation split");
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(val_count));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(val_count), order.end());
  if (cfg.batch_size > train_idx.size()) {
    throw ConfigError("batch_size " + std::to_string(cfg.batch_size) + " exceeds training rows " +
                      std::to_string(train_idx.size()));
  }
  const Matrix val_x = rows_of(ds, val_idx);
  const std::vector<int> val_y = labels_of(ds, val_idx);

  TrainResult result{init_model(arch, stream_seed(cfg.seed, 1, 0), cfg.bn_momentum, cfg.bn_eps), {}};
  MlpModel& model = result.model;
  Adam adam(cfg, model);
  Rng dropout_rng(stream_seed(cfg.seed, 2, 0));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng(stream_seed(cfg.seed, 3, epoch));
    epoch_rng.shuffle(std::span(train_idx));
    model.mode = Mode::train;
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(train_idx.size(), start + cfg.batch_size);
      if (end - start < 2) break;
      const auto idx = std::span(train_idx).subspan(start, end - start);
      const Matrix x = rows_of(ds, idx);
      const std::vector<int> y = labels_of(ds, idx);
      auto lg = loss_and_gradients(model, x, y, cfg.class_weights, dropout_rng);
      adam.step(model, lg.gradients);
      loss_sum += lg.loss * static_cast<double>(idx.size());
      seen += idx.size();
    }
    model.mode = Mode::eval;
    const double val_loss = cross_entropy(forward(model, val_x), val_y, cfg.class_weights);
    result.curve.push_back({loss_sum / static_cast<double>(seen), val_loss});
  }
  model.mode = Mode::eval;
  return result;
}

inline void write_curve_csv(std::ostream& out, std::span<const EpochLoss> curve) {
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) {
    out << e + 1 << ',' << hdbench::detail::shortest(curve[e].train_loss) << ','
        << hdbench::detail::shortest(curve[e].val_loss) << '\n';
  }
}

// Probability of class 1 per row (eval mode).
inline std::vector<double> positive_scores(const MlpModel& m, const DenseDataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  constexpr std::size_t kChunk = 1024;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += kChunk) {
    idx.resize(std::min(kChunk, ds.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const Matrix probs = softmax(forward(m, rows_of(ds, idx)));
    for (Eigen::Index r = 0; r < probs.rows(); ++r) out.push_back(probs(r, probs.cols() > 1 ? 1 : 0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts

namespace detail {

inline nlohmann::json tensor_json(const double* data, Eigen::Index size, Eigen::Index rows, Eigen::Index cols) {
  return {{"rows", rows}, {"cols", cols}, {"b64", bytes::f64_vector_to_base64(std::span<const double>(data, static_cast<std::size_t>(size)))}};
}

template <class T>
nlohmann::json tensor_json(const T& t) {
  return tensor_json(t.data(), t.size(), t.rows(), t.cols());
}

template <class T>
void tensor_from_json(const nlohmann::json& j, T& out) {
  const auto values = bytes::f64_vector_from_base64(j.at("b64").get<std::string>());
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) throw DataError("tensor size mismatch in artifact");
  out.resize(rows, cols);
  std::copy(values.begin(), values.end(), out.data());
}

}  // namespace detail

inline nlohmann::json to_artifact(const MlpModel& m, const MlpTrainConfig& cfg) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& blk : m.blocks) {
    layers.push_back({{"weight", detail::tensor_json(blk.weight)},
                      {"bias", detail::tensor_json(blk.bias)},
                      {"bn_scale", detail::tensor_json(blk.bn_scale)},
                      {"bn_shift", detail::tensor_json(blk.bn_shift)},
                      {"running_mean", detail::tensor_json(blk.running_mean)},
                      {"running_var", detail::tensor_json(blk.running_var)}});
  }
  layers.push_back({{"weight", detail::tensor_json(m.out_weight)}, {"bias", detail::tensor_json(m.out_bias)}});
  nlohmann::json config{{"learning_rate", cfg.learning_rate}, {"weight_decay", cfg.weight_decay},
                        {"epochs", cfg.epochs},               {"batch_size", cfg.batch_size},
                        {"adam_beta1", cfg.adam_beta1},       {"adam_beta2", cfg.adam_beta2},
                        {"adam_eps", cfg.adam_eps},           {"bn_momentum", cfg.bn_momentum},
                        {"bn_eps", cfg.bn_eps}};
  config["class_weights"] = cfg.class_weights
                                ? nlohmann::json::array({cfg.class_weights->negative, cfg.class_weights->positive})
                                : nlohmann::json(nullptr);
  return {{"kind", "mlp"},
          {"num_features", m.arch.input_size},
          {"architecture",
           {{"input_size", m.arch.input_size},
            {"hidden_size", m.arch.hidden_size},
            {"num_hidden_blocks", m.arch.num_hidden_blocks},
            {"output_size", m.arch.output_size},
            {"dropout_p", m.arch.dropout_p}}},
          {"layers", layers},
          {"config", config},
          {"seed", cfg.seed}};
}

inline MlpModel mlp_model_from_artifact(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "mlp") throw DataError("not an mlp artifact");
    const auto& a = j.at("architecture");
    MlpArchitecture arch{a.at("input_size").get<std::size_t>(), a.at("hidden_size").get<std::size_t>(),
                         a.at("num_hidden_blocks").get<std::size_t>(), a.at("output_size").get<std::size_t>(),
                         a.at("dropout_p").get<double>()};
    MlpModel m = init_model(arch, 0, j.at("config").at("bn_momentum").get<double>(),
                            j.at("config").at("bn_eps").get<double>());
    const auto& layers = j.at("layers");
    if (layers.size() != arch.num_hidden_blocks + 1) throw DataError("layer count does not match architecture");
    for (std::size_t b = 0; b < m.blocks.size(); ++b) {
      auto& blk = m.blocks[b];
      const auto& l = layers[b];
      detail::tensor_from_json(l.at("weight"), blk.weight);
      detail::tensor_from_json(l.at("bias"), blk.bias);
      detail::tensor_from_json(l.at("bn_scale"), blk.bn_scale);
      detail::tensor_from_json(l.at("bn_shift"), blk.bn_shift);
      detail::tensor_from_json(l.at("running_mean"), blk.running_mean);
      detail::tensor_from_json(l.at("running_var"), blk.running_var);
    }
    detail::tensor_from_json(layers.back().at("weight"), m.out_weight);
    detail::tensor_from_json(layers.back().at("bias"), m.out_bias);
    m.mode = Mode::eval;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed mlp artifact: ") + e.what());
  }
}

}  // namespace hdbench::mlp
