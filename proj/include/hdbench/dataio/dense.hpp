#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdbench/error.hpp"
#include "hdbench/random.hpp"

namespace hdbench {

// How the first field of a dense record is interpreted.
//   zero_one        labels must be 0 or 1
//   plus_minus_one  labels must be -1 or +1; mapped to 0 and 1
//   continuous      any finite value (regression targets)
enum class LabelMap { zero_one, plus_minus_one, continuous };

/// Row-major labeled dense matrix.
///
/// Storage is one flat buffer so rows can be handed out as spans without
/// per-row allocations; `num_features` is fixed at construction.
class DenseDataset {
public:
  DenseDataset() = default;
  explicit DenseDataset(std::size_t num_features) : num_features_(num_features) {}

  std::size_t num_features() const { return num_features_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const { return labels_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_features_, num_features_};
  }
  std::span<const double> values() const { return values_; }

  void reserve(std::size_t rows) {
    labels_.reserve(rows);
    values_.reserve(rows * num_features_);
  }

  void add_row(double label, std::span<const double> features) {
    if (features.size() != num_features_) {
      throw DataError("row has " + std::to_string(features.size()) + " features, expected " +
                      std::to_string(num_features_));
    }
    labels_.push_back(label);
    values_.insert(values_.end(), features.begin(), features.end());
  }

  DenseDataset subset(std::span<const std::size_t> indices) const {
    DenseDataset out(num_features_);
    out.reserve(indices.size());
    for (std::size_t i : indices) out.add_row(labels_[i], row(i));
    return out;
  }

  bool is_binary() const {
    return std::all_of(labels_.begin(), labels_.end(), [](double y) { return y == 0.0 || y == 1.0; });
  }

  friend bool operator==(const DenseDataset&, const DenseDataset&) = default;

private:
  std::size_t num_features_ = 0;
  std::vector<double> labels_;
  std::vector<double> values_;
};

namespace detail {

inline std::optional<double> parse_double(std::string_view field) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Streaming parser for `label,f1,...,fF` records, one per line.
///
/// Memory use is proportional to the parsed output only. Errors name the
/// 1-based line (and column, for non-numeric fields).
inline DenseDataset parse_dense(std::istream& in, std::size_t num_features, LabelMap label_map) {
  require(num_features >= 1, "num_features must be positive");
  DenseDataset ds(num_features);
  std::vector<double> features(num_features);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest(line);
    std::size_t field_no = 0;
    double label = 0.0;
    const auto prefix = [&] { return "line " + std::to_string(line_no) + ": "; };
    while (true) {
      const auto comma = rest.find(',');
      const auto field = rest.substr(0, comma);
      ++field_no;
      if (field_no > num_features + 1) {
        throw DataError(prefix() + "expected " + std::to_string(num_features + 1) + " fields, found more");
      }
      const auto value = detail::parse_double(field);
      if (!value) {
        throw DataError(prefix() + "column " + std::to_string(field_no) + ": non-numeric field '" +
                        std::string(field) + "'");
      }
      if (field_no == 1) {
        label = *value;
      } else {
        features[field_no - 2] = *value;
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (field_no != num_features + 1) {
      throw DataError(prefix() + "expected " + std::to_string(num_features + 1) + " fields, found " +
                      std::to_string(field_no));
    }
    switch (label_map) {
      case LabelMap::zero_one:
        if (label != 0.0 && label != 1.0) {
          throw DataError(prefix() + "label " + detail::shortest(label) + " is not in {0,1}");
        }
        break;
      case LabelMap::plus_minus_one:
        if (label != -1.0 && label != 1.0) {
          throw DataError(prefix() + "label " + detail::shortest(label) + " is not in {-1,+1}");
        }
        label = label > 0.0 ? 1.0 : 0.0;
        break;
      case LabelMap::continuous:
        break;
    }
    ds.add_row(label, features);
  }
  if (in.bad()) throw DataError("read error after line " + std::to_string(line_no));
  return ds;
}

/// Writes with shortest round-trip float formatting, so
/// `parse_dense(write_dense(ds))` reproduces `ds` bit for bit.
inline void write_dense(std::ostream& out, const DenseDataset& ds) {
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    line = detail::shortest(ds.label(i));
    for (double v : ds.row(i)) {
      line += ',';
      line += detail::shortest(v);
    }
    line += '\n';
    out << line;
  }
}

// Field count of the first record minus the label column; 0 for an empty stream.
inline std::size_t sniff_num_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return 0;
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
}

// Copy with every feature vector scaled to unit L2 norm; all-zero rows stay zero.
inline DenseDataset normalize_rows(const DenseDataset& ds) {
  DenseDataset out(ds.num_features());
  out.reserve(ds.size());
  std::vector<double> x(ds.num_features());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.row(i);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double scale = sq > 0.0 ? 1.0 / std::sqrt(sq) : 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = row[j] * scale;
    out.add_row(ds.label(i), x);
  }
  return out;
}

/// Linear-teacher synthetic dataset.
///
/// A hidden unit vector w* is drawn, features are standard normal, and the
/// label is 1 iff <w*, x> + sigma * eps > 0 with sigma = exp(-separation).
/// The score is symmetric around zero so classes are balanced in expectation.
inline DenseDataset generate_synthetic(std::size_t num_rows, std::size_t num_features, double separation,
                                       std::uint64_t seed) {
  require(num_rows >= 2, "generate_synthetic: num_rows must be at least 2");
  require(num_features >= 1, "generate_synthetic: num_features must be positive");
  require(separation >= 0.0 && std::isfinite(separation), "generate_synthetic: separation must be >= 0");
  Rng rng(seed);
  std::vector<double> teacher(num_features);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& w : teacher) {
      w = rng.normal();
      norm += w * w;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& w : teacher) w /= norm;

  const double noise_scale = std::exp(-separation);
  DenseDataset ds(num_features);
  ds.reserve(num_rows);
  std::vector<double> x(num_features);
  for (std::size_t i = 0; i < num_rows; ++i) {
    double score = 0.0;
    for (std::size_t j = 0; j < num_features; ++j) {
      x[j] = rng.normal();
      score += teacher[j] * x[j];
    }
    score += noise_scale * rng.normal();
    ds.add_row(score > 0.0 ? 1.0 : 0.0, x);
  }
  return ds;
}

}  // namespace hdbench
