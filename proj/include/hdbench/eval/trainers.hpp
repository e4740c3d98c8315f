#pragma once

#include "hdbench/eval/cv.hpp"
#include "hdbench/gbt.hpp"
#include "hdbench/linmodels.hpp"
#include "hdbench/mlp.hpp"

namespace hdbench::eval {

// Adapters binding each model family to the cross-validation Trainer shape.

inline Trainer logistic_trainer(SgdConfig cfg) {
  return [cfg](const DenseDataset& train, const DenseDataset& test) {
    const auto model = train_logistic(train, cfg);
    Predictions p;
    p.scores = decision_scores(model, test);
    for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1 : 0);
    return p;
  };
}

inline Trainer svm_trainer(SgdConfig cfg) {
  return [cfg](const DenseDataset& train, const DenseDataset& test) {
    const auto model = train_pegasos(train, cfg);
    Predictions p;
    p.scores = decision_scores(model, test);
    for (double s : p.scores) p.labels.push_back(s >= 0.0 ? 1 : 0);
    return p;
  };
}

// input_size is taken from the training data.
inline Trainer mlp_trainer(mlp::MlpArchitecture arch, mlp::MlpTrainConfig cfg) {
  return [arch, cfg](const DenseDataset& train, const DenseDataset& test) mutable {
    arch.input_size = train.num_features();
    const auto result = mlp::train(train, arch, cfg);
    Predictions p;
    p.scores = mlp::positive_scores(result.model, test);
    for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1 : 0);
    return p;
  };
}

inline gbt::MatrixView view_of(const DenseDataset& ds) { return {ds.values(), ds.size(), ds.num_features()}; }

inline Trainer gbt_regressor(gbt::GbtConfig cfg) {
  return [cfg](const DenseDataset& train, const DenseDataset& test) {
    const auto model = gbt::fit(view_of(train), train.labels(), cfg);
    Predictions p;
    p.values = gbt::predict(model, view_of(test));
    return p;
  };
}

// Squared-error boosting on 0/1 targets; the prediction doubles as the score.
inline Trainer gbt_classifier(gbt::GbtConfig cfg) {
  return [cfg](const DenseDataset& train, const DenseDataset& test) {
    const auto model = gbt::fit(view_of(train), train.labels(), cfg);
    Predictions p;
    p.scores = gbt::predict(model, view_of(test));
    for (double s : p.scores) p.labels.push_back(s >= 0.5 ? 1 : 0);
    return p;
  };
}

inline Trainer constant_trainer(int label) {
  return [label](const DenseDataset&, const DenseDataset& test) {
    Predictions p;
    p.scores.assign(test.size(), static_cast<double>(label));
    p.labels.assign(test.size(), label);
    p.values.assign(test.size(), static_cast<double>(label));
    return p;
  };
}

}  // namespace hdbench::eval
