#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/error.hpp"
#include "hdbench/random.hpp"
#include "json.hpp"

namespace hdbench {

enum class LabelKind { binary, continuous };

inline std::string to_string(LabelKind k) { return k == LabelKind::binary ? "binary" : "continuous"; }

/// Bookkeeping for a dataset stored as several dense part files.
struct DatasetManifest {
  std::string name;
  std::size_t num_rows = 0;
  std::size_t num_features = 0;
  std::vector<std::string> parts;
  LabelKind label_kind = LabelKind::binary;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["name"] = m.name;
  j["num_rows"] = m.num_rows;
  j["num_features"] = m.num_features;
  j["parts"] = m.parts;
  j["label_kind"] = to_string(m.label_kind);
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> kKeys = {"label_kind", "name", "num_features", "num_rows", "parts", "seed"};
  if (!j.is_object()) throw DataError("manifest must be a JSON object");
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  if (keys != kKeys) {
    throw DataError("manifest keys must be exactly name, num_rows, num_features, parts, label_kind, seed");
  }
  try {
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.num_rows = j.at("num_rows").get<std::size_t>();
    m.num_features = j.at("num_features").get<std::size_t>();
    m.parts = j.at("parts").get<std::vector<std::string>>();
    const auto kind = j.at("label_kind").get<std::string>();
    if (kind == "binary") {
      m.label_kind = LabelKind::binary;
    } else if (kind == "continuous") {
      m.label_kind = LabelKind::continuous;
    } else {
      throw DataError("unknown label_kind '" + kind + "'");
    }
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    if (m.parts.empty()) throw DataError("manifest has no parts");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

struct SplitResult {
  std::vector<DenseDataset> parts;
  DatasetManifest manifest;
};

/// Seeded shuffle, then contiguous slices. The first `rows % k` parts carry
/// one extra row.
inline SplitResult split_parts(const DenseDataset& ds, std::size_t k, std::uint64_t shuffle_seed,
                               const std::string& name = "dataset") {
  require(k >= 2, "split_parts: k must be at least 2");
  if (k > ds.size()) {
    throw ConfigError("split_parts: k=" + std::to_string(k) + " exceeds row count " + std::to_string(ds.size()));
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(shuffle_seed);
  rng.shuffle(std::span(order));

  SplitResult out;
  const std::size_t base = ds.size() / k;
  const std::size_t extra = ds.size() % k;
  std::size_t start = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out.parts.push_back(ds.subset(std::span(order).subspan(start, len)));
    out.manifest.parts.push_back(name + ".part" + std::to_string(p) + ".csv");
    start += len;
  }
  out.manifest.name = name;
  out.manifest.num_rows = ds.size();
  out.manifest.num_features = ds.num_features();
  out.manifest.label_kind = ds.is_binary() ? LabelKind::binary : LabelKind::continuous;
  out.manifest.seed = shuffle_seed;
  return out;
}

inline DenseDataset load_dense_file(const std::filesystem::path& path, std::size_t num_features, LabelMap map) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_dense(in, num_features, map);
}

// Loads every part of a manifest (paths relative to the manifest's directory)
// and checks the declared row total.
inline std::vector<DenseDataset> load_manifest_parts(const DatasetManifest& m, const std::filesystem::path& base_dir) {
  const LabelMap map = m.label_kind == LabelKind::binary ? LabelMap::zero_one : LabelMap::continuous;
  std::vector<DenseDataset> parts;
  std::size_t total = 0;
  for (const auto& rel : m.parts) {
    parts.push_back(load_dense_file(base_dir / rel, m.num_features, map));
    total += parts.back().size();
  }
  if (total != m.num_rows) {
    throw DataError("manifest declares " + std::to_string(m.num_rows) + " rows but parts hold " +
                    std::to_string(total));
  }
  return parts;
}

}  // namespace hdbench
