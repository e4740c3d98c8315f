// hdbench command-line entry point.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 data error,
// 3 protocol or runtime error (including an interrupted benchmark).

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>

#include "hdbench/hdbench.hpp"
#include "hdbench/prep/http_transport.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hdbench;

namespace {

std::atomic<bool> g_cancel{false};

extern "C" void on_interrupt(int) { g_cancel.store(true); }

struct Interrupted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Option names whose values are file system paths. In a config file they are
// resolved against the config file's directory.
const std::set<std::string>& path_keys() {
  static const std::set<std::string> keys = {"data",     "manifest", "test",  "out",     "out-dir",  "cluster",
                                             "local",    "record",   "lexicon", "stoplist", "synonyms", "part"};
  return keys;
}

// Output names are kept as given; they resolve against --out-dir.
bool is_input_path(const std::string& key) { return path_keys().count(key) && key != "out"; }

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
  if (!out) throw DataError("write failed for " + p.string());
}

void write_json_file(const fs::path& p, const json& j) { write_text_file(p, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Config overlay

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) return v.dump();
  return v.dump();
}

// Turns `--config FILE` into explicit flags placed right after the
// subcommand, so flags typed on the command line come later and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path || args.empty()) return args;

  json cfg;
  {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file " + *path);
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config file " + *path + ": " + e.what());
    }
  }
  if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
  const fs::path base = fs::absolute(fs::path(*path)).parent_path();

  std::vector<std::string> out{args[0]};
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config" || value.is_null()) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& item : value) text += (text.empty() ? "" : ",") + scalar_text(item);
    } else {
      text = scalar_text(value);
    }
    if (path_keys().count(key) && !text.empty() && fs::path(text).is_relative()) text = (base / text).string();
    out.push_back(flag);
    out.push_back(text);
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

json typed_value(const std::string& v) {
  if (json::accept(v)) {
    auto j = json::parse(v);
    if (j.is_number() || j.is_boolean() || j.is_object()) return j;
  }
  return v;
}

json effective_config(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
      continue;
    }
    std::string v = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
    if (v.empty()) continue;
    if (is_input_path(name)) v = fs::absolute(v).lexically_normal().string();
    j[name] = typed_value(v);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Shared option groups

struct Common {
  std::string config;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::string log_level = "warn";

  fs::path out(const std::string& name) const {
    const fs::path p(name);
    return p.is_absolute() ? p : fs::path(out_dir) / p;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON file whose keys mirror flag names");
  sub->add_option("--seed", c.seed, "Global seed");
  sub->add_option("--out-dir", c.out_dir, "Directory for every output file");
  sub->add_option("--log-level", c.log_level, "debug|info|warn|error|off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));
}

void apply_log_level(const std::string& level) {
  static const std::map<std::string, log::Level> levels = {{"debug", log::Level::debug},
                                                           {"info", log::Level::info},
                                                           {"warn", log::Level::warn},
                                                           {"error", log::Level::error},
                                                           {"off", log::Level::off}};
  log::set_level(levels.at(level));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    const auto b = item.find_last_not_of(' ');
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::optional<ClassWeights> parse_class_weights(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto parts = split_list(s);
  if (parts.size() != 2) throw ConfigError("class-weights needs two values: negative,positive");
  try {
    return ClassWeights{std::stod(parts[0]), std::stod(parts[1])};
  } catch (const std::exception&) {
    throw ConfigError("class-weights values must be numbers");
  }
}

// Dense inputs.
struct DataOpts {
  std::string data;
  std::string manifest;
  std::string test;
  std::string name;
  std::size_t features = 0;
  std::string label_map = "auto";
  double holdout = 0.2;
};

void add_data_options(CLI::App* sub, DataOpts& d, bool with_test) {
  sub->add_option("--data", d.data, "Dense CSV file (label,f1,...,fF)");
  sub->add_option("--manifest", d.manifest, "Manifest of dense part files");
  sub->add_option("--features", d.features, "Feature count (0: infer from the first line)");
  sub->add_option("--label-map", d.label_map, "auto|zero-one|plus-minus-one|continuous")
      ->check(CLI::IsMember({"auto", "zero-one", "plus-minus-one", "continuous"}));
  sub->add_option("--name", d.name, "Dataset name (default: file stem or manifest name)");
  if (with_test) {
    sub->add_option("--test", d.test, "Dense CSV used for evaluation");
    sub->add_option("--holdout", d.holdout, "Held-out fraction when --test is absent");
  }
}

std::size_t infer_features(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (commas == 0) throw DataError(p.string() + ": first record has no features");
    return commas;
  }
  throw DataError(p.string() + " is empty");
}

LabelMap label_map_of(const std::string& s) {
  if (s == "zero-one") return LabelMap::zero_one;
  if (s == "plus-minus-one") return LabelMap::plus_minus_one;
  return LabelMap::continuous;
}

DenseDataset load_dense(const fs::path& p, std::size_t features, const std::string& map) {
  const std::size_t nf = features ? features : infer_features(p);
  return load_dense_file(p, nf, label_map_of(map));
}

struct Loaded {
  DenseDataset data;
  std::optional<DenseDataset> test;
  dist::DatasetIdentity id;
};

Loaded load_data(const DataOpts& d) {
  if (d.data.empty() == d.manifest.empty()) throw ConfigError("give exactly one of --data or --manifest");
  Loaded out;
  if (!d.data.empty()) {
    out.data = load_dense(d.data, d.features, d.label_map);
    out.id = {d.name.empty() ? fs::path(d.data).stem().string() : d.name, out.data.size(), out.data.num_features()};
  } else {
    const auto m = manifest_from_json(read_json_file(d.manifest));
    auto parts = load_manifest_parts(m, fs::path(d.manifest).parent_path());
    out.data = DenseDataset(m.num_features);
    out.data.reserve(m.num_rows);
    for (const auto& part : parts) {
      for (std::size_t i = 0; i < part.size(); ++i) out.data.add_row(part.label(i), part.row(i));
    }
    out.id = {d.name.empty() ? m.name : d.name, m.num_rows, m.num_features};
  }
  if (out.data.empty()) throw DataError("dataset has no rows");
  if (!d.test.empty()) {
    out.test = load_dense(d.test, out.data.num_features(), d.label_map);
  }
  return out;
}

// Seeded shuffle; the first round(fraction * n) rows become the test set.
std::pair<DenseDataset, DenseDataset> holdout_split(const DenseDataset& ds, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, "holdout must be in (0,1)");
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));
  const auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ds.size())));
  if (n_test == 0 || n_test == ds.size()) throw ConfigError("holdout leaves an empty train or test set");
  std::span<const std::size_t> all(order);
  return {ds.subset(all.subspan(n_test)), ds.subset(all.first(n_test))};
}

// Train/test pair: --test if given, else a seeded holdout carve.
std::pair<DenseDataset, DenseDataset> train_test(const Loaded& l, double holdout, std::uint64_t seed) {
  if (l.test) return {l.data, *l.test};
  return holdout_split(l.data, holdout, stream_seed(seed, 0, 1));
}

// ---------------------------------------------------------------------------
// Algorithms

struct AlgoOpts {
  std::string algo = "logistic";
  std::string task = "auto";
  // linear
  double lambda = SgdConfig{}.lambda;
  std::optional<std::size_t> epochs;
  std::size_t iters = 0;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::string class_weights;
  bool no_project = false;
  // mlp
  std::size_t hidden = mlp::MlpArchitecture{}.hidden_size;
  std::size_t blocks = mlp::MlpArchitecture{}.num_hidden_blocks;
  double dropout = mlp::MlpArchitecture{}.dropout_p;
  double weight_decay = mlp::MlpTrainConfig{}.weight_decay;
  // gbt
  std::size_t max_depth = gbt::GbtConfig{}.max_depth;
  double eta = gbt::GbtConfig{}.eta;
  std::size_t num_round = gbt::GbtConfig{}.num_round;
  double min_child_weight = gbt::GbtConfig{}.min_child_weight;
  double gbt_lambda = gbt::GbtConfig{}.lambda;
  double gamma = gbt::GbtConfig{}.gamma;
};

void add_linear_options(CLI::App* sub, AlgoOpts& a) {
  sub->add_option("--lambda", a.lambda, "L2 regularization strength");
  sub->add_option("--epochs", a.epochs, "Passes over the data");
  sub->add_option("--iters", a.iters, "Pegasos iterations (0: epochs x rows)");
  sub->add_option("--batch-size", a.batch_size, "Mini-batch size");
  sub->add_option("--lr", a.lr, "Learning rate");
  sub->add_option("--class-weights", a.class_weights, "Loss multipliers negative,positive");
  sub->add_flag("--no-project", a.no_project, "Skip the Pegasos ball projection");
}

void add_algo_options(CLI::App* sub, AlgoOpts& a, bool with_algo) {
  if (with_algo) {
    sub->add_option("--algo", a.algo, "logistic|logreg|svm|mlp|gbt|xgb")
        ->check(CLI::IsMember({"logistic", "logreg", "svm", "mlp", "gbt", "xgb"}));
  }
  sub->add_option("--task", a.task, "auto|classification|regression")
      ->check(CLI::IsMember({"auto", "classification", "regression"}));
  add_linear_options(sub, a);
  sub->add_option("--hidden", a.hidden, "MLP hidden width");
  sub->add_option("--blocks", a.blocks, "MLP hidden block count");
  sub->add_option("--dropout", a.dropout, "MLP drop probability");
  sub->add_option("--weight-decay", a.weight_decay, "MLP L2 term");
  sub->add_option("--max-depth", a.max_depth, "GBT tree depth");
  sub->add_option("--eta", a.eta, "GBT shrinkage");
  sub->add_option("--num-round", a.num_round, "GBT boosting rounds");
  sub->add_option("--min-child-weight", a.min_child_weight, "GBT minimum hessian per leaf");
  sub->add_option("--gbt-lambda", a.gbt_lambda, "GBT leaf L2 term");
  sub->add_option("--gamma", a.gamma, "GBT split penalty");
}

std::string canonical_algo(const std::string& a) {
  if (a == "logreg" || a == "logistic") return "logistic";
  if (a == "xgb" || a == "gbt") return "gbt";
  if (a == "svm" || a == "mlp") return a;
  throw ConfigError("unknown algorithm '" + a + "'");
}

eval::Task task_of(const AlgoOpts& a, const DenseDataset& ds) {
  if (a.task == "classification") return eval::Task::classification;
  if (a.task == "regression") return eval::Task::regression;
  return ds.is_binary() ? eval::Task::classification : eval::Task::regression;
}

SgdConfig sgd_config(const AlgoOpts& a, std::uint64_t seed, bool svm, std::size_t rows) {
  SgdConfig c;
  c.lambda = a.lambda;
  c.seed = seed;
  c.project = !a.no_project;
  c.class_weights = parse_class_weights(a.class_weights);
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.lr) c.learning_rate = *a.lr;
  const std::size_t epochs = a.epochs.value_or(SgdConfig{}.epochs_or_iters);
  c.epochs_or_iters = svm ? (a.iters ? a.iters : epochs * rows) : epochs;
  c.validate();
  return c;
}

std::pair<mlp::MlpArchitecture, mlp::MlpTrainConfig> mlp_config(const AlgoOpts& a, std::uint64_t seed,
                                                                  std::size_t features) {
  mlp::MlpArchitecture arch;
  arch.input_size = features;
  arch.hidden_size = a.hidden;
  arch.num_hidden_blocks = a.blocks;
  arch.dropout_p = a.dropout;
  mlp::MlpTrainConfig cfg;
  cfg.seed = seed;
  cfg.weight_decay = a.weight_decay;
  cfg.class_weights = parse_class_weights(a.class_weights);
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.lr) cfg.learning_rate = *a.lr;
  arch.validate();
  cfg.validate();
  return {arch, cfg};
}

gbt::GbtConfig gbt_config(const AlgoOpts& a, std::uint64_t seed) {
  gbt::GbtConfig c;
  c.max_depth = a.max_depth;
  c.eta = a.eta;
  c.num_round = a.num_round;
  c.min_child_weight = a.min_child_weight;
  c.lambda = a.gbt_lambda;
  c.gamma = a.gamma;
  c.seed = seed;
  c.validate();
  return c;
}

eval::Trainer make_trainer(const std::string& algo, const AlgoOpts& a, std::uint64_t seed, eval::Task task) {
  const auto name = canonical_algo(algo);
  if (name != "gbt" && task == eval::Task::regression) throw ConfigError(name + " needs binary labels");
  if (name == "logistic") return eval::logistic_trainer(sgd_config(a, seed, false, 0));
  if (name == "svm") {
    return [a, seed](const DenseDataset& train, const DenseDataset& test) {
      return eval::svm_trainer(sgd_config(a, seed, true, train.size()))(train, test);
    };
  }
  if (name == "mlp") {
    auto [arch, cfg] = mlp_config(a, seed, 1);
    return eval::mlp_trainer(arch, cfg);
  }
  const auto cfg = gbt_config(a, seed);
  return task == eval::Task::regression ? eval::gbt_regressor(cfg) : eval::gbt_classifier(cfg);
}

struct FitOutput {
  eval::Predictions predictions;
  json artifact;
  std::vector<mlp::EpochLoss> curve;
  double train_s = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void threshold(eval::Predictions& p, double cut) {
  p.labels.clear();
  for (double s : p.scores) p.labels.push_back(s >= cut ? 1 : 0);
}

FitOutput fit_model(const std::string& algo, const AlgoOpts& a, std::uint64_t seed, eval::Task task,
                    const DenseDataset& train, const DenseDataset& test) {
  const auto name = canonical_algo(algo);
  if (name != "gbt" && task == eval::Task::regression) throw ConfigError(name + " needs binary labels");
  FitOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  if (name == "logistic" || name == "svm") {
    const bool svm = name == "svm";
    const auto cfg = sgd_config(a, seed, svm, train.size());
    const auto model = svm ? train_pegasos(train, cfg) : train_logistic(train, cfg);
    out.train_s = seconds_since(t0);
    out.predictions.scores = decision_scores(model, test);
    threshold(out.predictions, svm ? 0.0 : 0.5);
    out.artifact = to_artifact(model, cfg);
  } else if (name == "mlp") {
    const auto [arch, cfg] = mlp_config(a, seed, train.num_features());
    auto result = mlp::train(train, arch, cfg);
    out.train_s = seconds_since(t0);
    out.predictions.scores = mlp::positive_scores(result.model, test);
    threshold(out.predictions, 0.5);
    out.artifact = mlp::to_artifact(result.model, cfg);
    out.curve = std::move(result.curve);
  } else {
    const auto cfg = gbt_config(a, seed);
    const auto model = gbt::fit(eval::view_of(train), train.labels(), cfg);
    out.train_s = seconds_since(t0);
    const auto pred = gbt::predict(model, eval::view_of(test));
    if (task == eval::Task::regression) {
      out.predictions.values = pred;
    } else {
      out.predictions.scores = pred;
      threshold(out.predictions, 0.5);
    }
    out.artifact = gbt::to_artifact(model, cfg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report files

struct NamedReport {
  std::string fold;
  eval::EvalReport report;
  bool summary = false;  // CSV only
};

void write_reports(const Common& c, const std::string& stem, const std::string& run_id, const std::string& algo,
                   const std::vector<NamedReport>& rows, json doc) {
  std::ostringstream csv;
  csv << eval::kCsvHeader << '\n';
  json folds = json::array();
  for (const auto& r : rows) {
    csv << eval::csv_row(run_id, algo, r.fold, r.report) << '\n';
    if (r.summary) continue;
    json f = eval::to_json(r.report);
    f["fold"] = r.fold;
    folds.push_back(std::move(f));
  }
  doc["run_id"] = run_id;
  doc["algo"] = algo;
  doc["folds"] = std::move(folds);
  write_json_file(c.out(stem + ".json"), doc);
  write_text_file(c.out(stem + ".csv"), csv.str());
}

std::vector<NamedReport> cv_rows(const eval::CvResult& cv) {
  std::vector<NamedReport> rows;
  for (std::size_t i = 0; i < cv.folds.size(); ++i) rows.push_back({std::to_string(i), cv.folds[i]});
  rows.push_back({"mean", cv.average, true});
  return rows;
}

// ---------------------------------------------------------------------------
// gen

// Synthetic film table with the columns the pipeline expects. Ratings follow
// director, genre and description words, so the regression task is learnable.
TabularFrame generate_movies(std::size_t rows, std::uint64_t seed) {
  static const std::vector<std::string> directors = {"Ana Ruiz",  "Ben Cole",  "Cara Diaz", "Dev Patel",
                                                     "Eli Stone", "Fay Moore", "Gus Hart",  "Hana Ito"};
  static const std::vector<std::string> writers = {"Ivy Lane", "Jon Park", "Kai West", "Lia Cruz", "Max Bell"};
  static const std::vector<std::string> genres = {"Drama", "Comedy", "Action", "Horror", "War", "Romance"};
  static const std::vector<std::string> actors = {"Nia Ford", "Oto Berg", "Pia Lund", "Quin Shaw", "Rae Nash",
                                                  "Sam Reed", "Tia Webb", "Uma Kerr", "Vic Hale", "Wes Pratt"};
  static const std::vector<std::string> companies = {"Northlight", "Bluefield", "Redwood Pictures", "Atlas"};
  static const std::vector<std::string> good = {"moving", "brilliant", "tender", "gripping", "beautiful"};
  static const std::vector<std::string> bad = {"dull", "clumsy", "tedious", "messy", "forgettable"};
  static const std::vector<std::string> plain = {"family", "city", "journey", "secret", "night",  "river",
                                                 "war",    "love", "house",   "friend", "summer", "road"};
  const double director_bias[] = {1.2, 0.8, 0.4, 0.0, -0.3, -0.6, -1.0, 0.2};
  const double genre_bias[] = {0.6, -0.2, -0.1, -0.8, 0.7, 0.0};

  Rng rng(seed);
  TabularFrame f({{"title"},
                  {"year", ColumnKind::number},
                  {"genre"},
                  {"duration", ColumnKind::number},
                  {"director"},
                  {"writer"},
                  {"production_company"},
                  {"actors"},
                  {"description"},
                  {"budget"},
                  {"avg_vote", ColumnKind::number}});
  auto pick = [&](const std::vector<std::string>& v) -> std::size_t { return rng.below(v.size()); };
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t d = pick(directors);
    const std::size_t g = pick(genres);
    double score = 6.0 + director_bias[d] + genre_bias[g];
    std::string description;
    for (int w = 0; w < 8; ++w) {
      const double u = rng.uniform();
      std::string word;
      if (u < 0.15) {
        word = good[pick(good)];
        score += 0.4;
      } else if (u < 0.3) {
        word = bad[pick(bad)];
        score -= 0.4;
      } else {
        word = plain[pick(plain)];
      }
      description += (description.empty() ? "" : " ") + word;
    }
    score += 0.3 * rng.normal();
    score = std::clamp(std::round(score * 10.0) / 10.0, 1.0, 10.0);
    const std::string a1 = actors[pick(actors)], a2 = actors[pick(actors)];
    std::vector<Cell> cells{
        std::string("Film ") + std::to_string(r + 1),
        static_cast<double>(1950 + rng.below(71)),
        genres[g] + (rng.uniform() < 0.2 ? ", " + genres[pick(genres)] : std::string()),
        static_cast<double>(80 + rng.below(80)),
        directors[d],
        writers[pick(writers)],
        companies[pick(companies)],
        a1 == a2 ? a1 : a1 + ", " + a2,
        description,
        rng.uniform() < 0.15 ? Cell{} : Cell{"$ " + std::to_string(1000000 + rng.below(90000000))},
        rng.uniform() < 0.1 ? Cell{} : Cell{score},
    };
    if (rng.uniform() < 0.05) cells[5] = Cell{};
    f.add_row(std::move(cells));
  }
  return f;
}

struct GenOpts {
  std::string kind = "dense";
  std::size_t rows = 1000;
  std::size_t features = 50;
  double separation = 4.0;
  std::string out;
};

int run_gen(const Common& c, const GenOpts& g) {
  const auto path = c.out(g.out.empty() ? (g.kind == "movies" ? "movies.csv" : "synthetic.csv") : g.out);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  if (g.kind == "movies") {
    write_tabular(out, generate_movies(g.rows, c.seed));
  } else {
    write_dense(out, generate_synthetic(g.rows, g.features, g.separation, c.seed));
  }
  if (!out) throw DataError("write failed for " + path.string());
  log::info("wrote " + path.string());
  return 0;
}

// ---------------------------------------------------------------------------
// split

struct SplitOpts {
  std::size_t parts = 5;
  double holdout = 0.0;
  std::string out = "manifest.json";
};

int run_split(const Common& c, const DataOpts& d, const SplitOpts& s) {
  auto loaded = load_data(d);
  DenseDataset pool = loaded.data;
  const std::string name = loaded.id.name;
  if (s.holdout > 0.0) {
    auto [train, test] = holdout_split(pool, s.holdout, stream_seed(c.seed, 0, 1));
    std::ofstream out(c.out(name + ".holdout.csv"));
    write_dense(out, test);
    pool = std::move(train);
  }
  const auto split = split_parts(pool, s.parts, c.seed, name);
  for (std::size_t p = 0; p < split.parts.size(); ++p) {
    std::ofstream out(c.out(split.manifest.parts[p]));
    if (!out) throw DataError("cannot write " + split.manifest.parts[p]);
    write_dense(out, split.parts[p]);
  }
  write_json_file(c.out(s.out), to_json(split.manifest));
  return 0;
}

// ---------------------------------------------------------------------------
// train / cv

struct TrainOpts {
  std::string out = "model.json";
};

int run_train(const Common& c, const DataOpts& d, const AlgoOpts& a, const TrainOpts& t) {
  const auto loaded = load_data(d);
  const auto [train, test] = train_test(loaded, d.holdout, c.seed);
  const auto task = task_of(a, train);
  const auto algo = canonical_algo(a.algo);
  auto fit = fit_model(algo, a, c.seed, task, train, test);
  auto report = eval::evaluate(test, fit.predictions, task);
  report.wall_clock_s = fit.train_s;
  write_json_file(c.out(t.out), fit.artifact);
  if (!fit.curve.empty()) {
    std::ostringstream curve;
    mlp::write_curve_csv(curve, fit.curve);
    write_text_file(c.out("curve.csv"), curve.str());
  }
  write_reports(c, "train-report", "train", algo, {{"holdout", report}},
                {{"dataset", loaded.id.name}, {"train_rows", train.size()}, {"test_rows", test.size()}});
  return 0;
}

struct CvOpts {
  std::size_t k = 5;
};

int run_cv(const Common& c, const DataOpts& d, const AlgoOpts& a, const CvOpts& o) {
  const auto loaded = load_data(d);
  const auto task = task_of(a, loaded.data);
  const auto algo = canonical_algo(a.algo);
  const auto cv = eval::kfold_cv(loaded.data, o.k, make_trainer(algo, a, c.seed, task), c.seed, task);
  write_reports(c, "cv-report", "cv", algo, cv_rows(cv),
                {{"dataset", loaded.id.name}, {"k", o.k}, {"average", eval::to_json(cv.average)}});
  return 0;
}

// ---------------------------------------------------------------------------
// plan

struct PlanOpts {
  std::size_t partitions = 5;
  std::string algorithms;
  std::size_t k = 5;
};

int run_plan(const Common& c, const DataOpts& d, const AlgoOpts& a, const PlanOpts& o) {
  const auto algorithms = o.algorithms.empty() ? eval::default_plan_algorithms() : split_list(o.algorithms);
  std::vector<std::size_t> partitions(o.partitions);
  std::iota(partitions.begin(), partitions.end(), std::size_t{0});
  const auto plan = eval::build_assignment_plan(algorithms, partitions);
  const json plan_json = eval::to_json(plan);
  write_json_file(c.out("plan.json"), plan_json);
  std::cout << plan_json.dump(2) << '\n';
  if (d.manifest.empty()) return 0;

  const auto m = manifest_from_json(read_json_file(d.manifest));
  auto parts = load_manifest_parts(m, fs::path(d.manifest).parent_path());
  if (parts.size() != o.partitions) {
    throw ConfigError("manifest has " + std::to_string(parts.size()) + " parts, plan needs " +
                      std::to_string(o.partitions));
  }
  std::map<std::size_t, DenseDataset> datasets;
  for (std::size_t p = 0; p < parts.size(); ++p) datasets.emplace(p, std::move(parts[p]));
  // Random forest has no implementation here; run_plan lists it as skipped.
  std::map<std::string, eval::Trainer> trainers;
  for (const auto& name : algorithms) {
    if (name == "rf") continue;
    trainers.emplace(name, make_trainer(name, a, c.seed, eval::Task::classification));
  }
  const auto result = eval::run_plan(plan, datasets, trainers, c.seed, o.k);

  std::vector<NamedReport> rows;
  json instances = json::array();
  for (const auto& inst : result.instances) {
    rows.push_back({std::string(1, inst.instance) + ":" + inst.algorithm, inst.cv.average});
    instances.push_back({{"instance", std::string(1, inst.instance)},
                         {"algorithm", inst.algorithm},
                         {"partition", inst.partition},
                         {"average", eval::to_json(inst.cv.average)}});
  }
  json per_algorithm = json::object();
  for (const auto& [algo, rep] : result.per_algorithm) {
    rows.push_back({algo + ":mean", rep, true});
    per_algorithm[algo] = eval::to_json(rep);
  }
  write_reports(c, "plan-report", "plan", "all", rows,
                {{"plan", plan_json},
                 {"instances", instances},
                 {"per_algorithm", per_algorithm},
                 {"skipped", result.skipped},
                 {"k", o.k}});
  return 0;
}

// ---------------------------------------------------------------------------
// gridsearch

struct GridOpts {
  std::string grid;
  std::size_t k = 3;
};

eval::ParamGrid default_grid() {
  return {{"max_depth", {6, 10, 12}}, {"eta", {0.03, 0.05, 0.1}}, {"num_round", {300, 500}}, {"min_child_weight", {3, 5}}};
}

eval::ParamGrid parse_grid(const std::string& text) {
  if (text.empty()) return default_grid();
  json j;
  if (fs::exists(text)) {
    j = read_json_file(text);
  } else {
    if (!json::accept(text)) throw ConfigError("--grid is neither a file nor a JSON object");
    j = json::parse(text);
  }
  if (!j.is_object()) throw ConfigError("grid must be a JSON object of value lists");
  eval::ParamGrid grid;
  try {
    for (const auto& [key, values] : j.items()) grid[key] = values.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad grid: ") + e.what());
  }
  return grid;
}

int run_gridsearch(const Common& c, const DataOpts& d, const AlgoOpts& a, const GridOpts& o) {
  const auto loaded = load_data(d);
  const auto task = task_of(a, loaded.data);
  const auto grid = parse_grid(o.grid);
  auto factory = [&](const eval::ParamSet& ps) -> eval::Trainer {
    AlgoOpts p = a;
    for (const auto& [key, v] : ps) {
      if (key == "max_depth") p.max_depth = static_cast<std::size_t>(v);
      else if (key == "eta") p.eta = v;
      else if (key == "num_round") p.num_round = static_cast<std::size_t>(v);
      else if (key == "min_child_weight") p.min_child_weight = v;
      else if (key == "lambda") p.gbt_lambda = v;
      else if (key == "gamma") p.gamma = v;
      else throw ConfigError("unknown grid parameter '" + key + "'");
    }
    return make_trainer("gbt", p, c.seed, task);
  };
  const auto result = eval::grid_search(grid, o.k, loaded.data, factory, c.seed, task);
  std::vector<NamedReport> rows;
  json points = json::array();
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& pt = result.points[i];
    rows.push_back({std::to_string(i), pt.report});
    points.push_back({{"index", i}, {"params", pt.params}, {"score", pt.score}});
  }
  write_reports(c, "grid-report", "grid", "gbt", rows,
                {{"dataset", loaded.id.name},
                 {"k", o.k},
                 {"combinations", result.points.size()},
                 {"points", points},
                 {"best", result.best},
                 {"best_index", result.best_index}});
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline (film ratings)

struct PipelineOpts {
  std::string data;
  std::string target = "avg_vote";
  std::string text_columns;
  std::string numeric_columns = "year,duration,budget";
  std::string currency_columns = "budget";
  std::string year_column = "year";
  std::string contexts;
  std::size_t dim = text::kDefaultHashDim;
  std::size_t min_doc_freq = 3;
  std::string stoplist;
  std::string lexicon;
  std::string sentiment_column = "description";
  double holdout = 0.2;
};

std::vector<std::string> read_header(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw DataError(p.string() + " has no header row");
  for (auto& h : header) h = std::string(detail::trim(h));
  return header;
}

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Names from `wanted` that exist in the header. Explicit lists must match fully.
std::vector<std::string> present(const std::vector<std::string>& header, const std::vector<std::string>& wanted,
                                 bool explicit_list, const char* what) {
  std::vector<std::string> out;
  for (const auto& w : wanted) {
    if (contains(header, w)) {
      out.push_back(w);
    } else if (explicit_list) {
      throw ConfigError(std::string(what) + " column '" + w + "' is not in the header");
    }
  }
  return out;
}

int run_pipeline(const Common& c, const PipelineOpts& o, const AlgoOpts& a) {
  if (o.data.empty()) throw ConfigError("--data is required");
  const auto header = read_header(o.data);
  if (!contains(header, o.target)) throw ConfigError("target column '" + o.target + "' is not in the header");
  const auto currency = present(header, split_list(o.currency_columns), false, "currency");
  const auto numerics = present(header, split_list(o.numeric_columns), false, "numeric");
  const auto text_cols = o.text_columns.empty() ? present(header, text::default_all_text_columns(), false, "text")
                                                : present(header, split_list(o.text_columns), true, "text");
  const auto contexts = o.contexts.empty() ? present(header, prep::default_context_columns(), false, "context")
                                           : present(header, split_list(o.contexts), true, "context");
  if (text_cols.empty()) throw ConfigError("no text columns to vectorize");

  std::vector<ColumnSpec> schema;
  for (const auto& h : header) {
    const bool number = h == o.target || (contains(numerics, h) && !contains(currency, h));
    schema.push_back({h, number ? ColumnKind::number : ColumnKind::text});
  }
  TabularFrame frame = [&] {
    std::ifstream in(o.data);
    return parse_tabular(in, schema);
  }();
  if (frame.num_rows() < 10) throw DataError("pipeline needs at least 10 rows");
  frame = clean_currency(frame, currency);
  if (contains(header, o.year_column) && contains(numerics, o.year_column)) frame = prep::normalize_year(frame, o.year_column);

  const std::size_t target_col = frame.index_of(o.target);
  std::size_t imputed = 0;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) imputed += frame.number(r, target_col) ? 0 : 1;
  frame = prep::impute_apply(frame, prep::impute_fit(frame, o.target, contexts));
  {
    std::ofstream out(c.out("imputed.csv"));
    write_tabular(out, frame);
  }

  // Missing numeric features take the column mean.
  std::vector<std::vector<double>> numeric_values(numerics.size());
  for (std::size_t j = 0; j < numerics.size(); ++j) {
    const std::size_t col = frame.index_of(numerics[j]);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < frame.num_rows(); ++r) {
      if (auto v = frame.number(r, col)) {
        sum += *v;
        ++n;
      }
    }
    const double mean = n ? sum / static_cast<double>(n) : 0.0;
    for (std::size_t r = 0; r < frame.num_rows(); ++r) numeric_values[j].push_back(frame.number(r, col).value_or(mean));
  }

  text::Stoplist stop = text::default_english_stoplist();
  if (!o.stoplist.empty()) {
    std::ifstream in(o.stoplist);
    if (!in) throw DataError("cannot open " + o.stoplist);
    stop = text::read_stoplist(in);
  }
  std::vector<text::SparseVector> tf;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    tf.push_back(text::hashed_tf(text::remove_stopwords(text::tokenize(text::build_all_text(frame, r, text_cols)), stop), o.dim));
  }

  std::vector<std::size_t> order(frame.num_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(stream_seed(c.seed, 0, 1));
  rng.shuffle(std::span(order));
  const auto n_test = static_cast<std::size_t>(std::llround(o.holdout * static_cast<double>(order.size())));
  if (n_test == 0 || n_test >= order.size()) throw ConfigError("holdout leaves an empty train or test set");
  std::vector<text::SparseVector> train_tf;
  for (std::size_t i = n_test; i < order.size(); ++i) train_tf.push_back(tf[order[i]]);
  const auto idf = text::idf_fit(train_tf, o.min_doc_freq);

  DenseDataset all(o.dim + numerics.size());
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    std::vector<std::pair<std::string, double>> nums;
    for (std::size_t j = 0; j < numerics.size(); ++j) nums.emplace_back(numerics[j], numeric_values[j][r]);
    const auto row = text::assemble(text::idf_transform(idf, tf[r]), nums).to_dense();
    all.add_row(*frame.number(r, target_col), row);
  }
  std::span<const std::size_t> idx(order);
  const auto test = all.subset(idx.first(n_test));
  const auto train = all.subset(idx.subspan(n_test));
  auto fit = fit_model("gbt", a, c.seed, eval::Task::regression, train, test);
  auto report = eval::evaluate(test, fit.predictions, eval::Task::regression);
  report.wall_clock_s = fit.train_s;
  write_json_file(c.out("pipeline-model.json"), fit.artifact);

  json doc{{"rows", frame.num_rows()},
           {"imputed_targets", imputed},
           {"text_columns", text_cols},
           {"numeric_columns", numerics},
           {"hash_dim", o.dim},
           {"min_doc_freq", o.min_doc_freq},
           {"train_rows", train.size()},
           {"test_rows", test.size()}};
  if (!o.lexicon.empty()) {
    std::ifstream in(o.lexicon);
    if (!in) throw DataError("cannot open " + o.lexicon);
    const auto lexicon = text::read_lexicon(in);
    const std::size_t col = frame.index_of(o.sentiment_column);
    text::SentimentDistribution dist;
    for (std::size_t r = 0; r < frame.num_rows(); ++r) {
      dist.add(text::sentiment_tag(text::tokenize(frame.text(r, col).value_or("")), lexicon));
    }
    doc["sentiment"] = {{"positive_pct", dist.percent(text::Sentiment::positive)},
                        {"negative_pct", dist.percent(text::Sentiment::negative)},
                        {"neutral_pct", dist.percent(text::Sentiment::neutral)},
                        {"total", dist.total()}};
  }
  write_reports(c, "pipeline-report", "pipeline", "gbt", {{"holdout", report}}, doc);
  return 0;
}

// ---------------------------------------------------------------------------
// balance (review polarity)

struct BalanceOpts {
  std::string data;
  std::string text_column = "review";
  std::string label_column = "label";
  std::size_t min_tokens = 3;
  std::size_t target = 0;
  std::size_t rings = 10;
  std::size_t dim = text::kDefaultHashDim;
  std::string augment = "none";
  std::string synonyms;
  double synonym_rate = 0.5;
  std::size_t factor = 2;
  std::string translator = "127.0.0.1:8080/translate";
  int timeout_ms = 5000;
  std::string out = "balanced.csv";
};

std::unique_ptr<prep::Augmenter> make_augmenter(const BalanceOpts& o) {
  if (o.augment == "synonym") {
    if (o.synonyms.empty()) throw ConfigError("--augment synonym needs --synonyms");
    prep::SynonymAugmenter::SynonymMap map;
    try {
      map = read_json_file(o.synonyms).get<prep::SynonymAugmenter::SynonymMap>();
    } catch (const json::exception& e) {
      throw DataError("synonym file must map words to lists of words: " + std::string(e.what()));
    }
    return std::make_unique<prep::SynonymAugmenter>(std::move(map), o.synonym_rate);
  }
  // host:port/path
  const auto slash = o.translator.find('/');
  const auto hostport = o.translator.substr(0, slash);
  const auto colon = hostport.rfind(':');
  if (colon == std::string::npos) throw ConfigError("--translator must look like host:port/path");
  int port = 0;
  try {
    port = std::stoi(hostport.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--translator has a bad port");
  }
  const std::string path = slash == std::string::npos ? "/" : o.translator.substr(slash);
  return std::make_unique<prep::BacktranslationAugmenter>(
      prep::http_translation_transport(hostport.substr(0, colon), port, path, std::chrono::milliseconds(o.timeout_ms)));
}

json counts_json(const prep::ClassReport<int>& rep) {
  json j = json::array();
  for (const auto& [label, n] : rep.counts) j.push_back({{"label", label}, {"count", n}});
  return j;
}

int run_balance(const Common& c, const BalanceOpts& o) {
  if (o.data.empty()) throw ConfigError("--data is required");
  TabularFrame raw = [&] {
    std::ifstream in(o.data);
    if (!in) throw DataError("cannot open " + o.data);
    return parse_tabular(in, {{o.text_column}, {o.label_column, ColumnKind::number}});
  }();
  const auto frame = prep::dedupe_spam(raw, o.text_column, o.min_tokens);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (std::size_t r = 0; r < frame.num_rows(); ++r) {
    const auto y = frame.number(r, 1);
    if (!y) throw DataError("row " + std::to_string(r + 1) + " has no label");
    texts.push_back(frame.text(r, 0).value_or(""));
    labels.push_back(static_cast<int>(*y));
  }
  const auto before = prep::class_report<int>(labels);
  if (before.counts.empty()) throw DataError("no rows left after spam removal");
  const std::size_t target = o.target ? o.target : before.counts.back().second;

  std::vector<text::SparseVector> tf;
  for (const auto& t : texts) tf.push_back(text::hashed_tf(text::tokenize(t), o.dim));
  const auto idf = text::idf_fit(tf, 1);

  std::unique_ptr<prep::Augmenter> augmenter;
  if (o.augment != "none") augmenter = make_augmenter(o);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<prep::LabeledText> out;
  std::size_t failures = 0;
  std::size_t class_no = 0;
  for (const auto& [label, members] : by_class) {
    if (members.size() > target) {
      std::vector<text::SparseVector> vecs;
      for (auto i : members) vecs.push_back(text::idf_transform(idf, tf[i]));
      const auto sel = prep::ring_undersample<text::SparseVector>(vecs, {o.rings, target, stream_seed(c.seed, class_no, 0)});
      for (auto k : sel.indices) out.push_back({texts[members[k]], label});
    } else if (members.size() < target && augmenter) {
      std::vector<prep::LabeledText> items;
      for (auto i : members) items.push_back({texts[i], label});
      const std::size_t need = (target + members.size() - 1) / members.size();
      auto aug = prep::augment(items, *augmenter, std::min(o.factor, need), stream_seed(c.seed, class_no, 1));
      failures += aug.failures;
      // Every original stays; paraphrases fill up to the target.
      std::size_t extra = target - members.size();
      std::size_t next_original = 0;
      for (const auto& item : aug.items) {
        const bool original = next_original < items.size() && item == items[next_original];
        if (original) {
          ++next_original;
        } else if (extra == 0) {
          continue;
        } else {
          --extra;
        }
        out.push_back(item);
      }
    } else {
      for (auto i : members) out.push_back({texts[i], label});
    }
    ++class_no;
  }

  TabularFrame result({{o.text_column}, {o.label_column, ColumnKind::number}});
  std::vector<int> after_labels;
  for (const auto& item : out) {
    result.add_row({item.text, static_cast<double>(item.label)});
    after_labels.push_back(item.label);
  }
  {
    std::ofstream f(c.out(o.out));
    if (!f) throw DataError("cannot write " + c.out(o.out).string());
    write_tabular(f, result);
  }
  write_json_file(c.out("balance-report.json"),
                  {{"rows_in", raw.num_rows()},
                   {"rows_after_dedupe", frame.num_rows()},
                   {"target_per_class", target},
                   {"before", counts_json(before)},
                   {"after", counts_json(prep::class_report<int>(after_labels))},
                   {"augment", o.augment},
                   {"augment_failures", failures}});
  return 0;
}

// ---------------------------------------------------------------------------
// bench-local

struct BenchLocalOpts {
  std::string algos = "logistic,svm,mlp";
  std::size_t k = 0;
};

std::string pct(const std::optional<double>& v) { return v ? dist::detail::fixed(100.0 * *v, 2) : ""; }

int run_bench_local(const Common& c, const DataOpts& d, const AlgoOpts& a, const BenchLocalOpts& o) {
  const auto loaded = load_data(d);
  if (!loaded.data.is_binary()) throw DataError("bench-local needs binary labels");
  std::ostringstream table;
  table << "algorithm,accuracy_pct,macro_precision_pct,macro_recall_pct,macro_f1_pct,auc_pct,train_time_s\n";
  json results = json::array();
  std::vector<NamedReport> rows;
  bool interrupted = false;

  auto flush = [&] {
    write_text_file(c.out("table2.csv"), table.str());
    write_json_file(c.out("local-results.json"), results);
    write_reports(c, "bench-local-report", "bench-local", "all", rows,
                  {{"dataset", loaded.id.name}, {"mode", o.k ? "cv" : "holdout"}, {"complete", !interrupted}});
  };

  std::optional<std::pair<DenseDataset, DenseDataset>> split;
  if (o.k == 0) split = train_test(loaded, d.holdout, c.seed);
  for (const auto& raw_name : split_list(o.algos)) {
    if (g_cancel.load()) {
      interrupted = true;
      break;
    }
    const auto algo = canonical_algo(raw_name);
    eval::EvalReport rep;
    if (o.k) {
      rep = eval::kfold_cv(loaded.data, o.k, make_trainer(algo, a, c.seed, eval::Task::classification), c.seed).average;
    } else {
      const auto fit = fit_model(algo, a, c.seed, eval::Task::classification, split->first, split->second);
      rep = eval::evaluate(split->second, fit.predictions, eval::Task::classification);
      rep.wall_clock_s = fit.train_s;
    }
    log::info(algo + " done in " + dist::detail::fixed(rep.wall_clock_s, 3) + " s");
    table << algo << ',' << pct(rep.accuracy) << ',' << pct(rep.macro_precision) << ',' << pct(rep.macro_recall) << ','
          << pct(rep.macro_f1) << ',' << pct(rep.auc_roc) << ',' << dist::detail::fixed(rep.wall_clock_s, 3) << '\n';
    results.push_back(dist::to_json(dist::LocalResult{algo, loaded.id, rep.wall_clock_s, rep.auc_roc.value_or(0.0)}));
    rows.push_back({algo, rep});
  }
  interrupted = interrupted || g_cancel.load();
  flush();
  std::cout << table.str();
  if (interrupted) throw Interrupted("interrupted; partial results written");
  return 0;
}

// ---------------------------------------------------------------------------
// distributed benchmark

void write_comparison(const Common& c, const std::string& local_path, const dist::BenchRecord& record) {
  const auto j = read_json_file(local_path);
  if (!j.is_array()) throw DataError(local_path + " must hold a JSON array");
  std::vector<dist::LocalResult> local;
  for (const auto& item : j) local.push_back(dist::local_result_from_json(item));
  const auto cmp = dist::bench_compare(local, record);
  std::ostringstream csv, table;
  dist::write_comparison_csv(csv, cmp);
  dist::write_comparison_table(table, cmp);
  write_text_file(c.out("comparison.csv"), csv.str());
  write_text_file(c.out("comparison.txt"), table.str());
  std::cout << table.str();
}

struct MasterOpts {
  std::string listen = "0.0.0.0:7077";
  std::string cluster;
  std::size_t workers = 0;
  std::string algo = "logistic";
  std::uint32_t rounds = 10;
  double lambda = SgdConfig{}.lambda;
  double lr = SgdConfig{}.learning_rate;
  double round_timeout = 60.0;
  double accept_timeout = 30.0;
  std::string manifest;
  std::string test;
  std::string local;
};

int run_bench_master(const Common& c, const MasterOpts& o, bool listen_given) {
  dist::ClusterSpec spec;
  if (!o.cluster.empty()) {
    spec = dist::cluster_from_json(read_json_file(o.cluster));
    if (listen_given) spec.master_address = o.listen;
  } else {
    if (o.workers == 0) throw ConfigError("give --cluster or --workers");
    spec.master_address = o.listen;
    for (std::size_t i = 0; i < o.workers; ++i) spec.workers.push_back({static_cast<std::uint32_t>(i), 1, ""});
    spec.round_timeout_s = o.round_timeout;
    spec.accept_timeout_s = o.accept_timeout;
    spec.validate();
  }
  if (o.manifest.empty()) throw ConfigError("--manifest is required");
  const auto m = manifest_from_json(read_json_file(o.manifest));

  dist::MasterOptions opt;
  const auto algo = canonical_algo(o.algo);
  if (algo != "logistic" && algo != "svm") throw ConfigError("only logistic and svm run distributed");
  opt.algo = algo == "svm" ? LinearKind::svm : LinearKind::logistic;
  opt.config.lambda = o.lambda;
  opt.config.learning_rate = o.lr;
  opt.config.seed = c.seed;
  opt.rounds = o.rounds;
  opt.dataset = {m.name, m.num_rows, m.num_features};
  std::optional<DenseDataset> holdout;
  if (!o.test.empty()) {
    holdout = load_dense_file(o.test, m.num_features, LabelMap::zero_one);
    opt.holdout = &*holdout;
  }
  opt.cancel = &g_cancel;
  opt.on_listening = [](std::uint16_t port) { std::cout << "listening on port " << port << std::endl; };
  const auto result = dist::run_master(spec, opt);
  write_json_file(c.out("bench-record.json"), dist::to_json(result.record));
  SgdConfig artifact_cfg = opt.config;
  artifact_cfg.epochs_or_iters = o.rounds;
  write_json_file(c.out("model.json"), to_artifact(result.model, artifact_cfg));
  if (!o.local.empty()) write_comparison(c, o.local, result.record);
  if (result.record.cancelled) throw Interrupted("interrupted; partial bench record written");
  return 0;
}

struct WorkerCliOpts {
  std::string connect = "127.0.0.1:7077";
  std::uint32_t id = 0;
  std::string part;
  std::size_t features = 0;
  std::size_t batch_size = SgdConfig{}.batch_size;
  std::string class_weights;
  bool no_project = false;
  int connect_attempts = 40;
  double idle_timeout = 600.0;
};

int run_bench_worker(const WorkerCliOpts& o) {
  if (o.part.empty()) throw ConfigError("--part is required");
  dist::WorkerOptions w;
  w.connect = o.connect;
  w.worker_id = o.id;
  w.part_path = o.part;
  w.num_features = o.features;
  w.batch_size = o.batch_size;
  w.class_weights = parse_class_weights(o.class_weights);
  w.project = !o.no_project;
  w.connect_attempts = o.connect_attempts;
  w.idle_timeout_s = o.idle_timeout;
  return dist::run_worker(w);
}

struct ReportOpts {
  std::string local;
  std::string record;
};

int run_report(const Common& c, const ReportOpts& o) {
  if (o.local.empty() || o.record.empty()) throw ConfigError("--local and --record are required");
  write_comparison(c, o.local, dist::bench_record_from_json(read_json_file(o.record)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"hdbench: data preparation, model training and distributed benchmarking"};
  app.name("hdbench");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  std::map<std::string, Common> common;
  std::map<std::string, std::function<int()>> actions;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    add_common(s, common[name]);
    return s;
  };

  GenOpts gen;
  {
    auto* s = sub("gen", "Generate a synthetic dataset");
    s->add_option("--kind", gen.kind, "dense|movies")->check(CLI::IsMember({"dense", "movies"}));
    s->add_option("--rows", gen.rows, "Row count");
    s->add_option("--features", gen.features, "Feature count (dense)");
    s->add_option("--separation", gen.separation, "Class separation (dense)");
    s->add_option("--out", gen.out, "Output file");
    actions["gen"] = [&] { return run_gen(common["gen"], gen); };
  }

  DataOpts split_data;
  SplitOpts split;
  {
    auto* s = sub("split", "Shuffle a dense file into k parts plus a manifest");
    add_data_options(s, split_data, false);
    s->add_option("--parts", split.parts, "Number of parts");
    s->add_option("--holdout", split.holdout, "Fraction written to NAME.holdout.csv before splitting");
    s->add_option("--out", split.out, "Manifest file name");
    actions["split"] = [&] { return run_split(common["split"], split_data, split); };
  }

  DataOpts train_data;
  AlgoOpts train_algo;
  TrainOpts train;
  {
    auto* s = sub("train", "Train one model and evaluate it on held-out rows");
    add_data_options(s, train_data, true);
    add_algo_options(s, train_algo, true);
    s->add_option("--out", train.out, "Model artifact file name");
    actions["train"] = [&] { return run_train(common["train"], train_data, train_algo, train); };
  }

  DataOpts cv_data;
  AlgoOpts cv_algo;
  CvOpts cv;
  {
    auto* s = sub("cv", "k-fold cross-validation");
    add_data_options(s, cv_data, false);
    add_algo_options(s, cv_algo, true);
    s->add_option("--k", cv.k, "Number of folds");
    actions["cv"] = [&] { return run_cv(common["cv"], cv_data, cv_algo, cv); };
  }

  DataOpts plan_data;
  AlgoOpts plan_algo;
  PlanOpts plan;
  {
    auto* s = sub("plan", "Emit the pair-assignment plan, and run it when --manifest is given");
    s->add_option("--partitions", plan.partitions, "Partition count");
    s->add_option("--algorithms", plan.algorithms, "Five algorithm names in role order");
    s->add_option("--manifest", plan_data.manifest, "Manifest whose parts are the partitions");
    s->add_option("--k", plan.k, "Folds per instance");
    add_algo_options(s, plan_algo, false);
    actions["plan"] = [&] { return run_plan(common["plan"], plan_data, plan_algo, plan); };
  }

  DataOpts grid_data;
  AlgoOpts grid_algo;
  GridOpts grid;
  {
    auto* s = sub("gridsearch", "Boosted-tree grid search by k-fold CV");
    add_data_options(s, grid_data, false);
    add_algo_options(s, grid_algo, false);
    s->add_option("--grid", grid.grid, "JSON object or file: parameter -> value list");
    s->add_option("--k", grid.k, "Number of folds");
    actions["gridsearch"] = [&] { return run_gridsearch(common["gridsearch"], grid_data, grid_algo, grid); };
  }

  PipelineOpts pipe;
  AlgoOpts pipe_algo;
  {
    auto* s = sub("pipeline", "Film table: clean, impute, vectorize, boosted-tree regression");
    s->add_option("--data", pipe.data, "Film CSV with a header row");
    s->add_option("--target", pipe.target, "Rating column");
    s->add_option("--text-columns", pipe.text_columns, "Columns joined into all_text");
    s->add_option("--numeric-columns", pipe.numeric_columns, "Numeric feature columns");
    s->add_option("--currency-columns", pipe.currency_columns, "Columns holding currency strings");
    s->add_option("--year-column", pipe.year_column, "Column min-max scaled to [0,1]");
    s->add_option("--contexts", pipe.contexts, "Imputation context columns in fallback order");
    s->add_option("--dim", pipe.dim, "Hash dimension");
    s->add_option("--min-doc-freq", pipe.min_doc_freq, "IDF minimum document frequency");
    s->add_option("--stoplist", pipe.stoplist, "Stop word file");
    s->add_option("--lexicon", pipe.lexicon, "Sentiment lexicon file");
    s->add_option("--sentiment-column", pipe.sentiment_column, "Column tagged with the lexicon");
    s->add_option("--holdout", pipe.holdout, "Held-out fraction");
    add_algo_options(s, pipe_algo, false);
    actions["pipeline"] = [&] { return run_pipeline(common["pipeline"], pipe, pipe_algo); };
  }

  BalanceOpts bal;
  {
    auto* s = sub("balance", "Review classes: spam removal, ring undersampling, augmentation");
    s->add_option("--data", bal.data, "Review CSV with a header row");
    s->add_option("--text-column", bal.text_column, "Review text column");
    s->add_option("--label-column", bal.label_column, "Integer class column");
    s->add_option("--min-tokens", bal.min_tokens, "Shorter reviews count as spam");
    s->add_option("--target", bal.target, "Rows per class (0: smallest class)");
    s->add_option("--rings", bal.rings, "Ring count");
    s->add_option("--dim", bal.dim, "Hash dimension of the ring embedding");
    s->add_option("--augment", bal.augment, "none|synonym|translate")
        ->check(CLI::IsMember({"none", "synonym", "translate"}));
    s->add_option("--synonyms", bal.synonyms, "JSON word -> synonyms file");
    s->add_option("--synonym-rate", bal.synonym_rate, "Replacement probability per known word");
    s->add_option("--factor", bal.factor, "Maximum augmentation factor");
    s->add_option("--translator", bal.translator, "Translation service host:port/path");
    s->add_option("--timeout-ms", bal.timeout_ms, "Translation request timeout");
    s->add_option("--out", bal.out, "Balanced CSV file name");
    actions["balance"] = [&] { return run_balance(common["balance"], bal); };
  }

  DataOpts bl_data;
  AlgoOpts bl_algo;
  BenchLocalOpts bl;
  {
    auto* s = sub("bench-local", "Single-node benchmark table");
    add_data_options(s, bl_data, true);
    add_algo_options(s, bl_algo, false);
    s->add_option("--algos", bl.algos, "Comma-separated algorithms");
    s->add_option("--k", bl.k, "Use k-fold CV on all rows instead of a holdout (0: holdout)");
    actions["bench-local"] = [&] { return run_bench_local(common["bench-local"], bl_data, bl_algo, bl); };
  }

  MasterOpts mo;
  CLI::Option* listen_opt = nullptr;
  {
    auto* s = sub("bench-master", "Coordinate a distributed linear-model run");
    listen_opt = s->add_option("--listen", mo.listen, "host:port to listen on");
    s->add_option("--cluster", mo.cluster, "Cluster JSON file");
    s->add_option("--workers", mo.workers, "Expect workers 0..N-1 (without --cluster)");
    s->add_option("--algo", mo.algo, "logistic|logreg|svm")->check(CLI::IsMember({"logistic", "logreg", "svm"}));
    s->add_option("--rounds", mo.rounds, "Synchronous rounds");
    s->add_option("--lambda", mo.lambda, "L2 regularization strength");
    s->add_option("--lr", mo.lr, "Learning rate (logistic)");
    s->add_option("--round-timeout", mo.round_timeout, "Seconds per round before retry");
    s->add_option("--accept-timeout", mo.accept_timeout, "Seconds to wait for all workers");
    s->add_option("--manifest", mo.manifest, "Manifest of the partitioned dataset");
    s->add_option("--test", mo.test, "Dense CSV for holdout AUC");
    s->add_option("--local", mo.local, "local-results.json from bench-local");
    actions["bench-master"] = [&] { return run_bench_master(common["bench-master"], mo, listen_opt->count() > 0); };
  }

  WorkerCliOpts wo;
  {
    auto* s = sub("bench-worker", "Serve one data part to a master");
    s->add_option("--connect", wo.connect, "Master host:port");
    s->add_option("--id", wo.id, "Worker id");
    s->add_option("--part", wo.part, "Dense part file");
    s->add_option("--features", wo.features, "Feature count (0: infer)");
    s->add_option("--batch-size", wo.batch_size, "Mini-batch size");
    s->add_option("--class-weights", wo.class_weights, "Loss multipliers negative,positive");
    s->add_flag("--no-project", wo.no_project, "Skip the Pegasos ball projection");
    s->add_option("--connect-attempts", wo.connect_attempts, "Connection attempts before giving up");
    s->add_option("--idle-timeout", wo.idle_timeout, "Seconds to wait for the next master frame");
    actions["bench-worker"] = [&] { return run_bench_worker(wo); };
  }

  ReportOpts ro;
  {
    auto* s = sub("report", "Compare local results with a distributed bench record");
    s->add_option("--local", ro.local, "local-results.json");
    s->add_option("--record", ro.record, "bench-record.json");
    actions["report"] = [&] { return run_report(common["report"], ro); };
  }

  try {
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "hdbench: " << e.what() << '\n';
    return 1;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const Common& c = common[name];
  try {
    apply_log_level(c.log_level);
    fs::create_directories(c.out_dir);
    write_json_file(c.out("effective-config.json"), effective_config(*chosen));
    return actions.at(name)();
  } catch (const ConfigError& e) {
    std::cerr << "hdbench " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "hdbench " << name << ": data error: " << e.what() << '\n';
    return 2;
  } catch (const ProtocolError& e) {
    std::cerr << "hdbench " << name << ": protocol error: " << e.what() << '\n';
    return 3;
  } catch (const Interrupted& e) {
    std::cerr << "hdbench " << name << ": " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "hdbench " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hdbench " << name << ": " << e.what() << '\n';
    return 3;
  }
}
