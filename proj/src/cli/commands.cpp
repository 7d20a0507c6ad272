#include "ifbls/cli.hpp"

#include "config_file.hpp"
#include "manifest.hpp"

#include "ifbls/data_io.hpp"
#include "ifbls/error.hpp"
#include "ifbls/eval.hpp"
#include "ifbls/model_io.hpp"
#include "ifbls/stats.hpp"
#include "ifbls/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace ifbls::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Raised for problems with how the tool was invoked (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataFlags {
  std::string path;
  std::string label;
  bool no_header = false;
};

struct HyperFlags {
  std::optional<std::string> variant;
  std::optional<double> c;
  std::optional<int> m, p, l, q;
  std::optional<double> mu, delta;
  std::optional<std::string> epsilon;
  std::optional<unsigned long long> seed;
  std::optional<std::string> feature_activation, enhancement_activation;
};

struct CommonFlags {
  std::string config_path;
  DataFlags data;
  HyperFlags hyper;
};

void add_data_flags(CLI::App* cmd, DataFlags& d, bool required_path = false) {
  auto* opt = cmd->add_option("--data", d.path, "Dataset CSV (relative paths also tried under $IFBLS_DATA_DIR)");
  if (required_path) opt->required();
  cmd->add_option("--label", d.label, "Label column: header name or 0-based index (default: last)");
  cmd->add_flag("--no-header", d.no_header, "The CSV has no header row");
}

void add_hyper_flags(CLI::App* cmd, HyperFlags& h) {
  cmd->add_option("--variant", h.variant, "bls | f-bls | if-bls");
  cmd->add_option("--C", h.c, "Regularization parameter C");
  cmd->add_option("--m", h.m, "Number of feature groups");
  cmd->add_option("--p", h.p, "Nodes per feature group");
  cmd->add_option("--l", h.l, "Number of enhancement groups");
  cmd->add_option("--q", h.q, "Nodes per enhancement group");
  cmd->add_option("--mu", h.mu, "Gaussian kernel width (if-bls)");
  cmd->add_option("--delta", h.delta, "Radius offset delta (f-bls, if-bls)");
  cmd->add_option("--epsilon", h.epsilon, "Neighbourhood radius: number or 'median' (if-bls)");
  cmd->add_option("--seed", h.seed, "Random layer seed");
  cmd->add_option("--feature-activation", h.feature_activation, "linear | tanh | sigmoid");
  cmd->add_option("--enhancement-activation", h.enhancement_activation, "tanh | sigmoid | relu");
}

// Flag value if given, else config file value, else nullopt.
template <typename T>
std::optional<T> pick(const std::optional<T>& flag, const ConfigFile& cfg, const std::string& key);

template <>
std::optional<std::string> pick(const std::optional<std::string>& flag, const ConfigFile& cfg,
                                const std::string& key) {
  if (flag) return flag;
  return cfg.get(key);
}

template <typename T>
std::optional<T> pick(const std::optional<T>& flag, const ConfigFile& cfg, const std::string& key) {
  if (flag) return flag;
  const auto raw = cfg.get(key);
  if (!raw) return std::nullopt;
  std::istringstream in(*raw);
  T v{};
  if (!(in >> v) || !(in >> std::ws).eof()) {
    throw UsageError("config key '" + key + "' has invalid value '" + *raw + "'");
  }
  return v;
}

EpsilonPolicy parse_epsilon(const std::string& s) {
  if (s == "median") return EpsilonPolicy::median();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !(v >= 0.0)) {
    throw UsageError("epsilon must be 'median' or a non-negative number, got '" + s + "'");
  }
  return EpsilonPolicy::fixed_at(v);
}

ModelConfig resolve_model_config(const HyperFlags& h, const ConfigFile& file) {
  const auto variant_name = pick(h.variant, file, "model.variant");
  if (!variant_name) throw UsageError("--variant is required (bls, f-bls, if-bls)");
  Variant variant;
  try {
    variant = parse_variant(*variant_name);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  NetworkConfig net;
  net.m = pick(h.m, file, "network.m").value_or(1);
  net.p = pick(h.p, file, "network.p").value_or(10);
  net.l = pick(h.l, file, "network.l").value_or(1);
  net.q = pick(h.q, file, "network.q").value_or(10);
  net.seed = pick(h.seed, file, "model.seed").value_or(0);
  try {
    if (auto a = pick(h.feature_activation, file, "network.feature_activation"))
      net.feature_activation = parse_feature_activation(*a);
    if (auto a = pick(h.enhancement_activation, file, "network.enhancement_activation"))
      net.enhancement_activation = parse_enhancement_activation(*a);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const double c = pick(h.c, file, "model.C").value_or(1.0);

  ModelConfig cfg;
  switch (variant) {
    case Variant::bls: cfg = ModelConfig::bls(net, c); break;
    case Variant::f_bls:
      cfg = ModelConfig::fuzzy(net, c, pick(h.delta, file, "fuzzy.delta").value_or(kDefaultDelta));
      break;
    case Variant::if_bls: {
      KernelParams kp;
      kp.mu = pick(h.mu, file, "kernel.mu").value_or(1.0);
      kp.delta = pick(h.delta, file, "kernel.delta").value_or(kDefaultDelta);
      if (auto e = pick(h.epsilon, file, "kernel.epsilon")) kp.epsilon = parse_epsilon(*e);
      cfg = ModelConfig::intuitionistic(net, c, kp);
      break;
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

ordered_json config_to_json(const ModelConfig& cfg) {
  ordered_json j;
  j["variant"] = to_string(cfg.variant);
  j["C"] = cfg.c_reg;
  j["network"] = {{"m", cfg.network.m},
                  {"p", cfg.network.p},
                  {"l", cfg.network.l},
                  {"q", cfg.network.q},
                  {"feature_activation", to_string(cfg.network.feature_activation)},
                  {"enhancement_activation", to_string(cfg.network.enhancement_activation)},
                  {"seed", cfg.network.seed}};
  if (cfg.fuzzy_delta) j["fuzzy"] = {{"delta", *cfg.fuzzy_delta}};
  if (cfg.kernel) {
    j["kernel"] = {{"mu", cfg.kernel->mu},
                   {"delta", cfg.kernel->delta},
                   {"epsilon", cfg.kernel->epsilon.describe()}};
  }
  j["normalization"] = "minmax";
  return j;
}

ConfigFile load_config(const std::string& path) {
  return path.empty() ? ConfigFile{} : ConfigFile::load(path);
}

fs::path resolve_data_path(const std::string& raw) {
  fs::path p(raw);
  if (p.is_relative() && !fs::exists(p)) {
    if (const char* dir = std::getenv("IFBLS_DATA_DIR")) {
      const fs::path alt = fs::path(dir) / p;
      if (fs::exists(alt)) return alt;
    }
  }
  return p;
}

struct LoadedData {
  fs::path path;
  CsvTable table;
  Dataset ds;
};

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

ColumnRef column_ref(const CsvTable& table, const std::string& label) {
  if (label.empty()) return {};
  if (std::find(table.header.begin(), table.header.end(), label) != table.header.end()) return label;
  if (is_index(label)) return std::stoi(label);
  return label;
}

LoadedData load_data(const DataFlags& flags, const ConfigFile& file) {
  std::string raw = flags.path.empty() ? file.get("data.path").value_or("") : flags.path;
  if (raw.empty()) throw UsageError("--data is required");
  const std::string label = flags.label.empty() ? file.get("data.label").value_or("") : flags.label;
  bool header = !flags.no_header;
  if (!flags.no_header) {
    if (auto h = file.get("data.header")) header = *h != "false" && *h != "0";
  }
  LoadedData d;
  d.path = resolve_data_path(raw);
  d.table = read_csv_table(d.path, header);
  d.ds = table_to_dataset(d.table, column_ref(d.table, label), d.path.stem().string());
  return d;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::ofstream open_out(const fs::path& p) {
  ensure_parent(p);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write '" + p.string() + "'");
  return out;
}

std::string fmt(double v) { return std::isnan(v) ? "nan" : format_double(v); }

// ---------------------------------------------------------------- train

struct TrainFlags {
  CommonFlags common;
  std::string out;
};

int cmd_train(const TrainFlags& f, const std::vector<std::string>& argv, std::ostream& out) {
  const ConfigFile file = load_config(f.common.config_path);
  const ModelConfig cfg = resolve_model_config(f.common.hyper, file);
  const LoadedData data = load_data(f.common.data, file);

  const TrainedModel model = fit(data.ds.x, data.ds.labels, cfg);
  const auto predicted = predict(model, data.ds.x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == data.ds.labels[i];
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(predicted.size());

  const fs::path model_path(f.out);
  ensure_parent(model_path);
  save_model(model_path, model,
             {{"manifest", RunManifest::manifest_path_for(model_path).filename().string()}});

  RunManifest manifest("train", argv);
  ordered_json j = config_to_json(cfg);
  j["solve_branch"] = to_string(model.solve_branch_used);
  manifest.set_config(j);
  manifest.add_seed("model", cfg.network.seed);
  manifest.add_dataset(data.path);
  manifest.add_artifact(model_path);
  manifest.write_all();

  out << "training accuracy: " << fmt(acc) << "%\n";
  out << "solve branch: " << to_string(model.solve_branch_used) << "\n";
  out << "model written to " << model_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictFlags {
  std::string model;
  std::string data;
  std::string drop_column;
  bool no_header = false;
  std::string out;
};

int cmd_predict(const PredictFlags& f, const std::vector<std::string>& argv, std::ostream& out) {
  const TrainedModel model = load_model(f.model);
  const fs::path data_path = resolve_data_path(f.data);
  const CsvTable table = read_csv_table(data_path, !f.no_header);
  std::optional<std::size_t> drop;
  if (!f.drop_column.empty() && !(table.cells.empty() && table.header.empty())) {
    drop = resolve_label_column(table, column_ref(table, f.drop_column));
  }
  const Matrix x = table_to_features(table, drop);

  const fs::path out_path(f.out);
  {
    auto os = open_out(out_path);
    if (x.rows() > 0) {
      if (x.cols() != model.input_dim()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "test data has " + std::to_string(x.cols()) + " features, model expects " +
                        std::to_string(model.input_dim()));
      }
      os << "prediction\n";
      for (const auto& label : predict(model, x)) os << label << '\n';
    }
  }

  RunManifest manifest("predict", argv);
  manifest.set_config(config_to_json(model.config));
  manifest.add_seed("model", model.config.network.seed);
  manifest.add_dataset(data_path);
  manifest.add_dataset(f.model);
  manifest.add_artifact(out_path);
  manifest.write_all();
  out << x.rows() << " predictions written to " << out_path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- cv

struct CvFlags {
  CommonFlags common;
  std::optional<int> k;
  std::optional<unsigned long long> fold_seed;
  std::string out;
};

FoldPlan resolve_folds(const std::optional<int>& k_flag,
                       const std::optional<unsigned long long>& seed_flag, const ConfigFile& file,
                       std::size_t n) {
  const int k = pick(k_flag, file, "cv.k").value_or(5);
  const auto seed = pick(seed_flag, file, "cv.fold_seed").value_or(0);
  if (k < 2) throw UsageError("--k must be at least 2");
  return make_folds(n, k, seed);
}

int cmd_cv(const CvFlags& f, const std::vector<std::string>& argv, std::ostream& out,
           std::ostream& err) {
  const ConfigFile file = load_config(f.common.config_path);
  const ModelConfig cfg = resolve_model_config(f.common.hyper, file);
  const LoadedData data = load_data(f.common.data, file);
  const FoldPlan plan = resolve_folds(f.k, f.fold_seed, file, static_cast<std::size_t>(data.ds.size()));

  const CvResult res = cross_validate(data.ds, cfg, plan);
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";

  const fs::path out_path(f.out);
  {
    auto os = open_out(out_path);
    os << "fold,n_train,n_test,accuracy,status\n";
    std::size_t evaluated = 0;
    for (int fold = 0; fold < plan.k; ++fold) {
      const auto n_test = plan.test_indices(fold).size();
      const auto n_train = plan.assignments.size() - n_test;
      os << fold << ',' << n_train << ',' << n_test << ',';
      if (evaluated < res.evaluated_folds.size() && res.evaluated_folds[evaluated] == fold) {
        os << fmt(res.per_fold_accuracy[evaluated++]) << ",ok\n";
      } else {
        os << ",skipped\n";
      }
    }
  }

  RunManifest manifest("cv", argv);
  ordered_json j = config_to_json(cfg);
  j["k"] = plan.k;
  manifest.set_config(j);
  manifest.add_seed("model", cfg.network.seed);
  manifest.add_seed("fold", plan.seed);
  manifest.add_dataset(data.path);
  manifest.add_artifact(out_path);
  manifest.write_all();

  out << "mean accuracy: " << fmt(res.mean_accuracy) << "% (std " << fmt(res.std_dev) << ", "
      << res.per_fold_accuracy.size() << " of " << plan.k << " folds)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- gridsearch

struct GridFlags {
  CommonFlags common;
  std::string grid;
  std::optional<int> k;
  std::optional<unsigned long long> fold_seed;
  int jobs = 1;
  bool count_only = false;
  std::string out;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_number(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) {
    throw UsageError("grid key '" + key + "': bad number '" + s + "'");
  }
  return v;
}

// Items are numbers or start:step:stop ranges (inclusive).
std::vector<double> parse_values(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    const auto parts = split_list([&] {
      std::string t = item;
      std::replace(t.begin(), t.end(), ':', ',');
      return t;
    }());
    if (parts.size() == 1) {
      out.push_back(to_number(parts[0], key));
    } else if (parts.size() == 3) {
      const double start = to_number(parts[0], key);
      const double step = to_number(parts[1], key);
      const double stop = to_number(parts[2], key);
      if (!(step > 0.0)) throw UsageError("grid key '" + key + "': range step must be positive");
      for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-9 * std::abs(step)) break;
        out.push_back(v);
      }
    } else {
      throw UsageError("grid key '" + key + "': cannot parse '" + item + "'");
    }
  }
  return out;
}

std::vector<int> to_ints(const std::vector<double>& v, const std::string& key) {
  std::vector<int> out;
  for (double x : v) {
    if (x != std::round(x)) throw UsageError("grid key '" + key + "' needs integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

GridSpec load_grid(const std::string& spec, const ModelConfig& base) {
  if (spec == "paper") return GridSpec::paper();
  const ConfigFile file = ConfigFile::load(spec);
  GridSpec g;
  auto get = [&](const std::string& key) { return file.get(key); };
  g.c = get("C") ? parse_values(*get("C"), "C") : std::vector<double>{base.c_reg};
  g.m = get("m") ? to_ints(parse_values(*get("m"), "m"), "m") : std::vector<int>{base.network.m};
  g.p = get("p") ? to_ints(parse_values(*get("p"), "p"), "p") : std::vector<int>{base.network.p};
  g.q = get("q") ? to_ints(parse_values(*get("q"), "q"), "q") : std::vector<int>{base.network.q};
  const double base_mu = base.kernel ? base.kernel->mu : 1.0;
  const double base_delta =
      base.kernel ? base.kernel->delta : base.fuzzy_delta.value_or(kDefaultDelta);
  g.mu = get("mu") ? parse_values(*get("mu"), "mu") : std::vector<double>{base_mu};
  g.delta = get("delta") ? parse_values(*get("delta"), "delta") : std::vector<double>{base_delta};
  if (auto e = get("epsilon")) {
    for (const auto& item : split_list(*e)) g.epsilon.push_back(parse_epsilon(item));
  } else {
    g.epsilon = {base.kernel ? base.kernel->epsilon : EpsilonPolicy::median()};
  }
  for (const auto& [key, _] : file.entries()) {
    static const std::vector<std::string> known{"C", "m", "p", "q", "mu", "delta", "epsilon"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw UsageError("grid file: unknown key '" + key + "'");
    }
  }
  return g;
}

int cmd_gridsearch(const GridFlags& f, const std::vector<std::string>& argv, std::ostream& out,
                   std::ostream& err) {
  const ConfigFile file = load_config(f.common.config_path);
  const ModelConfig base_cfg = resolve_model_config(f.common.hyper, file);
  if (f.grid.empty()) throw UsageError("--grid is required ('paper' or a grid file)");
  const GridSpec grid = load_grid(f.grid, base_cfg);
  const Variant variant = base_cfg.variant;

  if (f.count_only) {
    out << grid_size(variant, grid) << "\n";
    return kExitOk;
  }
  if (f.jobs < 1) throw UsageError("--jobs must be at least 1");

  const LoadedData data = load_data(f.common.data, file);
  const FoldPlan plan = resolve_folds(f.k, f.fold_seed, file, static_cast<std::size_t>(data.ds.size()));

  GridBase base;
  base.l = base_cfg.network.l;
  base.feature_activation = base_cfg.network.feature_activation;
  base.enhancement_activation = base_cfg.network.enhancement_activation;
  base.model_seed = base_cfg.network.seed;
  const GridResult res = grid_search(data.ds, variant, grid, plan, base, f.jobs);

  const fs::path out_path(f.out);
  {
    auto os = open_out(out_path);
    os << "index,variant,C,m,p,l,q,mu,delta,epsilon,mean_accuracy,std_dev,evaluated_folds,best";
    for (int fold = 0; fold < plan.k; ++fold) os << ",fold_" << fold;
    os << '\n';
    for (std::size_t i = 0; i < res.evaluations.size(); ++i) {
      const CvResult& cv = res.evaluations[i];
      const ModelConfig& c = cv.best_config;
      os << i << ',' << to_string(c.variant) << ',' << fmt(c.c_reg) << ',' << c.network.m << ','
         << c.network.p << ',' << c.network.l << ',' << c.network.q << ','
         << (c.kernel ? fmt(c.kernel->mu) : "") << ','
         << (c.kernel ? fmt(c.kernel->delta) : c.fuzzy_delta ? fmt(*c.fuzzy_delta) : "") << ','
         << (c.kernel ? c.kernel->epsilon.describe() : "") << ',' << fmt(cv.mean_accuracy) << ','
         << fmt(cv.std_dev) << ',' << cv.evaluated_folds.size() << ','
         << (i == res.best_index ? 1 : 0);
      std::size_t e = 0;
      for (int fold = 0; fold < plan.k; ++fold) {
        os << ',';
        if (e < cv.evaluated_folds.size() && cv.evaluated_folds[e] == fold) {
          os << fmt(cv.per_fold_accuracy[e++]);
        }
      }
      os << '\n';
    }
  }
  for (const auto& cv : res.evaluations)
    for (const auto& w : cv.warnings) err << "warning: " << w << "\n";

  const CvResult& best = res.best();
  RunManifest manifest("gridsearch", argv);
  ordered_json j;
  j["variant"] = to_string(variant);
  j["grid"] = f.grid;
  j["configurations"] = res.evaluations.size();
  j["k"] = plan.k;
  j["base"] = config_to_json(base_cfg);
  j["best"] = config_to_json(best.best_config);
  manifest.set_config(j);
  manifest.add_seed("model", base.model_seed);
  manifest.add_seed("fold", plan.seed);
  manifest.add_dataset(data.path);
  manifest.add_artifact(out_path);
  manifest.write_all();

  out << "evaluated " << res.evaluations.size() << " configurations\n";
  out << "best (index " << res.best_index << "): " << config_to_json(best.best_config).dump()
      << "\n";
  out << "best mean accuracy: " << fmt(best.mean_accuracy) << "% (std " << fmt(best.std_dev)
      << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- noise

struct NoiseFlags {
  DataFlags data;
  double level = 0.0;
  unsigned long long seed = 0;
  std::string out;
};

int cmd_noise(const NoiseFlags& f, const std::vector<std::string>& argv, std::ostream& out) {
  const LoadedData data = load_data(f.data, ConfigFile{});
  const NoiseResult noisy = inject_gaussian_noise(data.ds, f.level, f.seed);

  // Corrupted rows are rewritten; all other lines are copied verbatim.
  CsvTable table = data.table;
  const std::size_t label_col = resolve_label_column(table, column_ref(table, f.data.label));
  for (const auto r : noisy.corrupted_rows) {
    std::string line;
    Eigen::Index feature = 0;
    for (std::size_t j = 0; j < table.cells[r].size(); ++j) {
      if (j) line += ',';
      line += j == label_col ? table.cells[r][j]
                             : format_double(noisy.data.x(static_cast<Eigen::Index>(r), feature++));
    }
    table.lines[r] = line;
  }
  const fs::path out_path(f.out);
  ensure_parent(out_path);
  write_csv_table(out_path, table);

  RunManifest manifest("noise", argv);
  manifest.set_config({{"level_percent", f.level},
                       {"definition", "fraction of samples; per-feature sigma = feature std"}});
  manifest.add_seed("noise", f.seed);
  manifest.add_dataset(data.path);
  manifest.add_artifact(out_path);
  manifest.write_all();
  out << noisy.corrupted_rows.size() << " of " << data.ds.size() << " rows corrupted\n";
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsFlags {
  std::string table;
  std::string out_dir;
  double alpha = 0.05;
  double tie_tol = 1e-4;
};

struct AccuracyTable {
  std::vector<std::string> datasets;
  std::vector<std::string> models;
  std::vector<std::vector<double>> accuracy;
};

AccuracyTable read_accuracy_table(const fs::path& path) {
  const CsvTable t = read_csv_table(path, true);
  if (t.header.size() < 3) {
    throw Error(ErrorKind::parse_error,
                "accuracy table needs a dataset column and at least two model columns");
  }
  AccuracyTable out;
  out.models.assign(t.header.begin() + 1, t.header.end());
  CsvTable numeric;
  numeric.header.assign(t.header.begin(), t.header.end());
  for (const auto& row : t.cells) {
    if (row.size() != t.header.size()) {
      throw Error(ErrorKind::parse_error, "accuracy table row '" + (row.empty() ? "" : row[0]) +
                                              "' has " + std::to_string(row.size()) +
                                              " cells, expected " + std::to_string(t.header.size()));
    }
    out.datasets.push_back(row[0]);
    numeric.cells.push_back(row);
  }
  if (out.datasets.empty()) throw Error(ErrorKind::parse_error, "accuracy table has no rows");
  const Matrix m = table_to_features(numeric, 0);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    out.accuracy.emplace_back(m.row(k).data(), m.row(k).data() + m.cols());
  }
  return out;
}

std::vector<double> column(const AccuracyTable& t, std::size_t j) {
  std::vector<double> c;
  for (const auto& row : t.accuracy) c.push_back(row[j]);
  return c;
}

int cmd_stats(const StatsFlags& f, const std::vector<std::string>& argv, std::ostream& out,
              std::ostream& err) {
  const AccuracyTable acc = read_accuracy_table(f.table);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  RunManifest manifest("stats", argv);
  manifest.set_config({{"alpha", f.alpha}, {"tie_tol", f.tie_tol}});
  manifest.add_dataset(f.table);

  const RankTable ranks = rank_models(acc.accuracy, acc.datasets, acc.models);
  const std::size_t d = acc.models.size();
  std::ostringstream md;
  md << "# Model comparison\n\n";

  {
    auto os = open_out(dir / "ranks.csv");
    os << "dataset";
    for (const auto& m : acc.models) os << ',' << m;
    os << '\n';
    for (std::size_t k = 0; k < ranks.ranks.size(); ++k) {
      os << acc.datasets[k];
      for (double r : ranks.ranks[k]) os << ',' << fmt(r);
      os << '\n';
    }
    os << "average";
    for (double r : ranks.average_rank) os << ',' << fmt(r);
    os << '\n';
  }
  manifest.add_artifact(dir / "ranks.csv");
  md << "## Average rank\n\n| model | average rank |\n|---|---|\n";
  for (std::size_t j = 0; j < d; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", ranks.average_rank[j]);
    md << "| " << acc.models[j] << " | " << buf << " |\n";
  }

  bool friedman_ok = true;
  {
    auto os = open_out(dir / "friedman.csv");
    os << "K,D,chi2,f_stat,df_chi2,df_f_num,df_f_den,note\n";
    os << ranks.ranks.size() << ',' << d << ',';
    md << "\n## Friedman test\n\n";
    try {
      const FriedmanResult fr = friedman_test(ranks);
      os << fmt(fr.chi2) << ',' << fmt(fr.f_stat) << ',' << fr.df_chi2 << ',' << fr.df_f_num << ','
         << fr.df_f_den << ",\n";
      char buf[128];
      std::snprintf(buf, sizeof buf, "chi2_F = %.4f (df %d), F_F = %.4f (df %d, %d)\n", fr.chi2,
                    fr.df_chi2, fr.f_stat, fr.df_f_num, fr.df_f_den);
      md << buf;
      out << "friedman: " << buf;
    } catch (const Error& e) {
      friedman_ok = false;
      os << ",,,,," << e.what() << '\n';
      md << "not computed: " << e.what() << "\n";
      err << "error: friedman: " << e.what() << "\n";
    }
  }
  manifest.add_artifact(dir / "friedman.csv");

  {
    auto os = open_out(dir / "wilcoxon.csv");
    os << "model_a,model_b,n_nonzero,w_plus,w_minus,p_value,null_hypothesis,note\n";
    md << "\n## Wilcoxon signed-rank (alpha = " << fmt(f.alpha) << ")\n\n"
       << "| model a | model b | p-value | null hypothesis |\n|---|---|---|---|\n";
    for (std::size_t a = 1; a < d; ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        os << acc.models[a] << ',' << acc.models[b] << ',';
        try {
          const auto w = wilcoxon_signed_rank(column(acc, a), column(acc, b), f.alpha);
          const char* decision = w.reject ? "rejected" : "not rejected";
          os << w.n_nonzero << ',' << fmt(w.w_plus) << ',' << fmt(w.w_minus) << ','
             << fmt(w.p_value) << ',' << decision << ",\n";
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4g", w.p_value);
          md << "| " << acc.models[a] << " | " << acc.models[b] << " | " << buf << " | "
             << decision << " |\n";
        } catch (const Error& e) {
          os << ",,,,," << e.what() << '\n';
          md << "| " << acc.models[a] << " | " << acc.models[b] << " | - | " << e.what() << " |\n";
          err << "warning: wilcoxon " << acc.models[a] << " vs " << acc.models[b] << ": "
              << e.what() << "\n";
        }
      }
    }
  }
  manifest.add_artifact(dir / "wilcoxon.csv");

  {
    auto os = open_out(dir / "win_tie_loss.csv");
    os << "model_a,model_b,wins_a,ties,wins_b,threshold,significant\n";
    const double threshold = win_tie_loss_threshold(static_cast<int>(acc.datasets.size()));
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%.4f", threshold);
    md << "\n## Win-tie-loss (row vs column, tie tolerance " << fmt(f.tie_tol)
       << ", threshold " << tbuf << ")\n\n|  |";
    for (std::size_t b = 0; b + 1 < d; ++b) md << ' ' << acc.models[b] << " |";
    md << "\n|---|";
    for (std::size_t b = 0; b + 1 < d; ++b) md << "---|";
    md << '\n';
    for (std::size_t a = 1; a < d; ++a) {
      md << "| " << acc.models[a] << " |";
      for (std::size_t b = 0; b + 1 < d; ++b) {
        if (b >= a) {
          md << "  |";
          continue;
        }
        const auto w = win_tie_loss(column(acc, a), column(acc, b), f.tie_tol);
        os << acc.models[a] << ',' << acc.models[b] << ',' << w.wins_a << ',' << w.ties << ','
           << w.wins_b << ',' << fmt(w.threshold) << ',' << (w.significant ? 1 : 0) << '\n';
        md << " [" << w.wins_a << ", " << w.ties << ", " << w.wins_b << "] |";
      }
      md << '\n';
    }
  }
  manifest.add_artifact(dir / "win_tie_loss.csv");

  {
    auto os = open_out(dir / "report.md");
    os << md.str();
  }
  manifest.add_artifact(dir / "report.md");
  manifest.write_all();
  out << "reports written to " << dir.string() << "\n";
  return friedman_ok ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Broad learning system classifiers with fuzzy and intuitionistic fuzzy sample "
               "weighting, plus a benchmark harness",
               "ifbls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  TrainFlags train;
  auto* c_train = app.add_subcommand("train", "Fit a model and write it to a file");
  c_train->add_option("--config", train.common.config_path, "Config file");
  add_data_flags(c_train, train.common.data);
  add_hyper_flags(c_train, train.common.hyper);
  c_train->add_option("--out", train.out, "Model output path")->required();

  PredictFlags predict_f;
  auto* c_predict = app.add_subcommand("predict", "Predict labels for a feature CSV");
  c_predict->add_option("--model", predict_f.model, "Model file")->required();
  c_predict->add_option("--data", predict_f.data, "Feature CSV")->required();
  c_predict->add_option("--drop-column", predict_f.drop_column,
                        "Column to ignore (e.g. a label column): name or 0-based index");
  c_predict->add_flag("--no-header", predict_f.no_header, "The CSV has no header row");
  c_predict->add_option("--out", predict_f.out, "Predictions CSV")->required();

  CvFlags cv;
  auto* c_cv = app.add_subcommand("cv", "k-fold cross-validation of one configuration");
  c_cv->add_option("--config", cv.common.config_path, "Config file");
  add_data_flags(c_cv, cv.common.data);
  add_hyper_flags(c_cv, cv.common.hyper);
  c_cv->add_option("--k", cv.k, "Number of folds (default 5)");
  c_cv->add_option("--fold-seed", cv.fold_seed, "Fold shuffling seed (default 0)");
  c_cv->add_option("--out", cv.out, "Per-fold CSV")->required();

  GridFlags gs;
  auto* c_grid = app.add_subcommand("gridsearch", "Cross-validated grid search");
  c_grid->add_option("--config", gs.common.config_path, "Config file");
  add_data_flags(c_grid, gs.common.data);
  add_hyper_flags(c_grid, gs.common.hyper);
  c_grid->add_option("--grid", gs.grid, "'paper' or a grid file");
  c_grid->add_option("--k", gs.k, "Number of folds (default 5)");
  c_grid->add_option("--fold-seed", gs.fold_seed, "Fold shuffling seed (default 0)");
  c_grid->add_option("--jobs", gs.jobs, "Parallel evaluations");
  c_grid->add_flag("--count-only", gs.count_only, "Print the number of configurations and exit");
  c_grid->add_option("--out", gs.out, "Per-configuration CSV");

  NoiseFlags noise;
  auto* c_noise = app.add_subcommand("noise", "Corrupt features with Gaussian noise");
  add_data_flags(c_noise, noise.data, true);
  c_noise->add_option("--level", noise.level, "Percent of samples to corrupt")
      ->required()
      ->check(CLI::Range(0.0, 100.0));
  c_noise->add_option("--seed", noise.seed, "Noise seed");
  c_noise->add_option("--out", noise.out, "Output CSV")->required();

  StatsFlags stats;
  auto* c_stats = app.add_subcommand("stats", "Rank, Friedman, Wilcoxon, and win-tie-loss tables");
  c_stats->add_option("--table", stats.table, "Accuracy table CSV")->required();
  c_stats->add_option("--out-dir", stats.out_dir, "Report directory")->required();
  c_stats->add_option("--alpha", stats.alpha, "Wilcoxon significance level")
      ->check(CLI::Range(0.0, 1.0));
  c_stats->add_option("--tie-tol", stats.tie_tol, "Win-tie-loss tie tolerance")
      ->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (c_train->parsed()) return cmd_train(train, args, out);
    if (c_predict->parsed()) return cmd_predict(predict_f, args, out);
    if (c_cv->parsed()) return cmd_cv(cv, args, out, err);
    if (c_grid->parsed()) {
      if (!gs.count_only && gs.out.empty()) throw UsageError("--out is required");
      return cmd_gridsearch(gs, args, out, err);
    }
    if (c_noise->parsed()) return cmd_noise(noise, args, out);
    if (c_stats->parsed()) return cmd_stats(stats, args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ifbls::cli
