#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/eval/metrics.hpp"
#include "json.hpp"

namespace hdbench::eval {

/// Metric bundle for one fold, one averaged run, or one grid point.
struct EvalReport {
  std::optional<double> accuracy;
  std::optional<double> macro_precision;
  std::optional<double> macro_recall;
  std::optional<double> macro_f1;
  std::optional<double> auc_roc;
  std::optional<Confusion> confusion;
  std::optional<double> rmse;
  std::optional<double> mae;
  std::optional<double> r2;
  double wall_clock_s = 0.0;
};

namespace detail {

inline nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

inline std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

inline std::string csv_num(const std::optional<double>& v) { return v ? hdbench::detail::shortest(*v) : ""; }

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j{{"accuracy", detail::opt(r.accuracy)},
                   {"macro_precision", detail::opt(r.macro_precision)},
                   {"macro_recall", detail::opt(r.macro_recall)},
                   {"macro_f1", detail::opt(r.macro_f1)},
                   {"auc_roc", detail::opt(r.auc_roc)},
                   {"rmse", detail::opt(r.rmse)},
                   {"mae", detail::opt(r.mae)},
                   {"r2", detail::opt(r.r2)},
                   {"wall_clock_s", r.wall_clock_s}};
  if (r.confusion) {
    const auto& c = *r.confusion;
    j["confusion"] = {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}};
  } else {
    j["confusion"] = nullptr;
  }
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.accuracy = detail::opt_from(j, "accuracy");
  r.macro_precision = detail::opt_from(j, "macro_precision");
  r.macro_recall = detail::opt_from(j, "macro_recall");
  r.macro_f1 = detail::opt_from(j, "macro_f1");
  r.auc_roc = detail::opt_from(j, "auc_roc");
  r.rmse = detail::opt_from(j, "rmse");
  r.mae = detail::opt_from(j, "mae");
  r.r2 = detail::opt_from(j, "r2");
  r.wall_clock_s = j.value("wall_clock_s", 0.0);
  if (j.contains("confusion") && !j["confusion"].is_null()) {
    const auto& c = j["confusion"];
    r.confusion = Confusion{{{c.at(0).at(0).get<std::size_t>(), c.at(0).at(1).get<std::size_t>()},
                             {c.at(1).at(0).get<std::size_t>(), c.at(1).at(1).get<std::size_t>()}}};
  }
  return r;
}

inline constexpr const char* kCsvHeader = "run_id,algo,fold,accuracy,macro_f1,auc_roc,rmse,mae,r2,wall_clock_s";

// One flat CSV row; `fold` is a fold index, a grid point index, or "mean".
inline std::string csv_row(const std::string& run_id, const std::string& algo, const std::string& fold,
                           const EvalReport& r) {
  return run_id + ',' + algo + ',' + fold + ',' + detail::csv_num(r.accuracy) + ',' + detail::csv_num(r.macro_f1) +
         ',' + detail::csv_num(r.auc_roc) + ',' + detail::csv_num(r.rmse) + ',' + detail::csv_num(r.mae) + ',' +
         detail::csv_num(r.r2) + ',' + hdbench::detail::shortest(r.wall_clock_s);
}

/// Unweighted mean of every metric over the reports that carry it;
/// confusion matrices and wall clock are summed.
inline EvalReport average_reports(const std::vector<EvalReport>& reports) {
  EvalReport out;
  auto mean_of = [&](auto member) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : reports) {
      if (const auto& v = r.*member) {
        sum += *v;
        ++n;
      }
    }
    return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
  };
  out.accuracy = mean_of(&EvalReport::accuracy);
  out.macro_precision = mean_of(&EvalReport::macro_precision);
  out.macro_recall = mean_of(&EvalReport::macro_recall);
  out.macro_f1 = mean_of(&EvalReport::macro_f1);
  out.auc_roc = mean_of(&EvalReport::auc_roc);
  out.rmse = mean_of(&EvalReport::rmse);
  out.mae = mean_of(&EvalReport::mae);
  out.r2 = mean_of(&EvalReport::r2);
  for (const auto& r : reports) {
    out.wall_clock_s += r.wall_clock_s;
    if (r.confusion) {
      if (!out.confusion) out.confusion = Confusion{};
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) (*out.confusion)[a][b] += (*r.confusion)[a][b];
      }
    }
  }
  return out;
}

}  // namespace hdbench::eval
