#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hdbench/dataio/tabular.hpp"
#include "hdbench/error.hpp"

namespace hdbench::prep {

inline const std::vector<std::string>& default_context_columns() {
  static const std::vector<std::string> kColumns = {"director", "writer", "genre", "actors"};
  return kColumns;
}

/// Contextual-mean imputation plan: per context column, the mean target of
/// every value seen in that column, plus the global mean as the last resort.
struct ImputePlan {
  std::string target_column;
  std::vector<std::string> context_columns;
  std::vector<std::map<std::string, double>> group_means;
  double global_mean = 0.0;
};

// Comma-separated multi-value cell ("Drama, War") -> trimmed, non-empty values.
inline std::vector<std::string> split_values(std::string_view cell) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = cell.find(',');
    const auto v = hdbench::detail::trim(cell.substr(0, comma));
    if (!v.empty()) out.emplace_back(v);
    if (comma == std::string_view::npos) break;
    cell.remove_prefix(comma + 1);
  }
  return out;
}

inline ImputePlan impute_fit(const TabularFrame& frame, const std::string& target,
                             const std::vector<std::string>& contexts = default_context_columns()) {
  const std::size_t t = frame.index_of(target);
  if (frame.columns()[t].kind != ColumnKind::number) throw ConfigError("impute target '" + target + "' must be numeric");
  std::vector<std::size_t> ctx;
  for (const auto& name : contexts) {
    ctx.push_back(frame.index_of(name));
    if (frame.columns()[ctx.back()].kind != ColumnKind::text) {
      throw ConfigError("context column '" + name + "' must be text");
    }
  }
  ImputePlan plan{target, contexts, {}, 0.0};
  std::vector<std::map<std::string, std::pair<double, std::size_t>>> sums(ctx.size());
  double total = 0.0;
  std::size_t present = 0;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    const auto y = frame.number(r, t);
    if (!y) continue;
    total += *y;
    ++present;
    for (std::size_t c = 0; c < ctx.size(); ++c) {
      const auto cell = frame.text(r, ctx[c]);
      if (!cell) continue;
      for (const auto& v : split_values(*cell)) {
        auto& [s, n] = sums[c][v];
        s += *y;
        ++n;
      }
    }
  }
  if (present == 0) throw DataError("impute_fit: every value of '" + target + "' is missing");
  plan.global_mean = total / static_cast<double>(present);
  for (const auto& per_column : sums) {
    auto& means = plan.group_means.emplace_back();
    for (const auto& [value, sn] : per_column) means[value] = sn.first / static_cast<double>(sn.second);
  }
  return plan;
}

/// Fill value for one row: the first context level with at least one known
/// value supplies the mean of its known per-value means.
inline double impute_value(const TabularFrame& frame, std::size_t row, const ImputePlan& plan) {
  for (std::size_t c = 0; c < plan.context_columns.size(); ++c) {
    const auto cell = frame.text(row, frame.index_of(plan.context_columns[c]));
    if (!cell) continue;
    double sum = 0.0;
    std::size_t known = 0;
    for (const auto& v : split_values(*cell)) {
      auto it = plan.group_means[c].find(v);
      if (it == plan.group_means[c].end()) continue;
      sum += it->second;
      ++known;
    }
    if (known > 0) return sum / static_cast<double>(known);
  }
  return plan.global_mean;
}

inline TabularFrame impute_apply(const TabularFrame& frame, const ImputePlan& plan) {
  const std::size_t t = frame.index_of(plan.target_column);
  TabularFrame out = frame;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    if (is_missing(frame.at(r, t))) out.at(r, t) = impute_value(frame, r, plan);
  }
  return out;
}

/// (x - min) / (max - min) over present values; missing stays missing.
inline TabularFrame normalize_year(const TabularFrame& frame, const std::string& column) {
  const std::size_t c = frame.index_of(column);
  if (frame.columns()[c].kind != ColumnKind::number) throw ConfigError("column '" + column + "' must be numeric");
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    if (const auto v = frame.number(r, c)) {
      lo = any ? std::min(lo, *v) : *v;
      hi = any ? std::max(hi, *v) : *v;
      any = true;
    }
  }
  if (!any || lo == hi) throw DataError("normalize_year: column '" + column + "' needs two distinct values");
  TabularFrame out = frame;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    if (const auto v = frame.number(r, c)) out.at(r, c) = (*v - lo) / (hi - lo);
  }
  return out;
}

}  // namespace hdbench::prep
