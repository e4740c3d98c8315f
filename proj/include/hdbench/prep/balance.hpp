#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hdbench/dataio/tabular.hpp"
#include "hdbench/error.hpp"
#include "hdbench/random.hpp"
#include "hdbench/textfeat.hpp"

namespace hdbench::prep {

/// Drops rows whose trimmed, lowercased text repeats an earlier row, and rows
/// with fewer than `min_tokens` tokens. Survivors keep their order.
inline TabularFrame dedupe_spam(const TabularFrame& frame, const std::string& text_column, std::size_t min_tokens) {
  const std::size_t c = frame.index_of(text_column);
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    const std::string body = frame.text(r, c).value_or("");
    if (text::tokenize(body).size() < min_tokens) continue;
    if (!seen.insert(text::lowercase(hdbench::detail::trim(body))).second) continue;
    keep.push_back(r);
  }
  return frame.select_rows(keep);
}

// ---------------------------------------------------------------------------
// Ring undersampling

struct RingConfig {
  std::size_t num_rings = 10;
  std::size_t target_size = 0;
  std::uint64_t seed = 0;
};

struct RingSelection {
  std::vector<std::size_t> indices;      // selected input indices, ascending
  std::vector<std::size_t> ring_of;      // ring of every input index
  std::vector<std::size_t> ring_sizes;
  std::vector<std::size_t> quotas;
};

/// Apportions `seats` proportionally to `sizes`: floors of the exact shares,
/// then one extra seat each for the largest remainders (lower index first on
/// ties). Exact integer arithmetic.
inline std::vector<std::size_t> largest_remainder(std::size_t seats, std::span<const std::size_t> sizes) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> quota(sizes.size(), 0);
  if (total == 0) return quota;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, ring)
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < sizes.size(); ++r) {
    const auto share = static_cast<unsigned __int128>(seats) * sizes[r];
    quota[r] = static_cast<std::size_t>(share / total);
    remainders.emplace_back(static_cast<std::size_t>(share % total), r);
    assigned += quota[r];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < seats; ++k, ++assigned) ++quota[remainders[k].second];
  return quota;
}

namespace detail {

inline std::size_t dimension(const std::vector<double>& v) { return v.size(); }
inline std::size_t dimension(const text::SparseVector& v) { return v.dim; }

inline void accumulate_into(std::vector<double>& acc, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}
inline void accumulate_into(std::vector<double>& acc, const text::SparseVector& v) {
  for (const auto& [i, x] : v.entries) acc[i] += x;
}

inline double squared_distance(const std::vector<double>& c, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - c[i]) * (v[i] - c[i]);
  return s;
}

// ||v - c||^2 = ||c||^2 + sum over nonzeros of (v_i - c_i)^2 - c_i^2
inline double squared_distance(const std::vector<double>& c, const text::SparseVector& v, double centroid_norm2) {
  double s = centroid_norm2;
  for (const auto& [i, x] : v.entries) s += (x - c[i]) * (x - c[i]) - c[i] * c[i];
  return std::max(0.0, s);
}

}  // namespace detail

/// Ring undersampling of one class.
///
/// Points are ranked by distance to the class centroid (index breaks ties),
/// cut into `num_rings` contiguous rings whose sizes differ by at most one,
/// and each ring contributes its largest-remainder share of `target_size`,
/// drawn uniformly without replacement.
template <class Vec>
RingSelection ring_undersample(std::span<const Vec> vectors, const RingConfig& cfg) {
  require(cfg.num_rings >= 1, "num_rings must be >= 1");
  const std::size_t n = vectors.size();
  if (cfg.target_size > n) {
    throw ConfigError("target_size " + std::to_string(cfg.target_size) + " exceeds class size " + std::to_string(n));
  }
  RingSelection out;
  out.ring_of.assign(n, 0);
  out.ring_sizes.assign(cfg.num_rings, 0);
  if (n == 0) {
    out.quotas.assign(cfg.num_rings, 0);
    return out;
  }
  const std::size_t dim = detail::dimension(vectors[0]);
  std::vector<double> centroid(dim, 0.0);
  for (const auto& v : vectors) {
    if (detail::dimension(v) != dim) throw DataError("vectors have differing dimensions");
    detail::accumulate_into(centroid, v);
  }
  for (auto& x : centroid) x /= static_cast<double>(n);

  std::vector<double> dist(n);
  const double centroid_norm2 = std::inner_product(centroid.begin(), centroid.end(), centroid.begin(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Vec, text::SparseVector>) {
      dist[i] = detail::squared_distance(centroid, vectors[i], centroid_norm2);
    } else {
      dist[i] = detail::squared_distance(centroid, vectors[i]);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });

  const std::size_t base = n / cfg.num_rings;
  const std::size_t extra = n % cfg.num_rings;
  std::vector<std::vector<std::size_t>> rings(cfg.num_rings);
  std::size_t pos = 0;
  for (std::size_t r = 0; r < cfg.num_rings; ++r) {
    const std::size_t len = base + (r < extra ? 1 : 0);
    rings[r].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    for (auto i : rings[r]) out.ring_of[i] = r;
    out.ring_sizes[r] = len;
    pos += len;
  }
  out.quotas = largest_remainder(cfg.target_size, out.ring_sizes);

  Rng rng(cfg.seed);
  for (std::size_t r = 0; r < cfg.num_rings; ++r) {
    auto& members = rings[r];
    for (std::size_t k = 0; k < out.quotas[r]; ++k) {
      std::swap(members[k], members[k + rng.below(members.size() - k)]);
      out.indices.push_back(members[k]);
    }
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

// ---------------------------------------------------------------------------
// Class distribution

template <class Label>
struct ClassReport {
  std::vector<std::pair<Label, std::size_t>> counts;  // descending by count, then by label
  std::size_t total = 0;
};

template <class Label>
ClassReport<Label> class_report(std::span<const Label> labels) {
  std::map<Label, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  ClassReport<Label> out;
  out.counts.assign(counts.begin(), counts.end());
  std::stable_sort(out.counts.begin(), out.counts.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  out.total = labels.size();
  return out;
}

}  // namespace hdbench::prep
