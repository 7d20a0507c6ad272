#include "ifbls/model_io.hpp"

#include "ifbls/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace ifbls {

namespace {

constexpr const char* kMagic = "ifbls-model";

void write_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << hex_double(m(i, j));
    out << '\n';
  }
}

void write_row(std::ostream& out, const std::string& name, const Eigen::RowVectorXd& v) {
  out << name << ' ' << v.size();
  for (Eigen::Index j = 0; j < v.size(); ++j) out << ' ' << hex_double(v(j));
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line split into tokens.
  std::istringstream next(const std::string& expect_key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key != expect_key) fail("expected '" + expect_key + "', found '" + key + "'");
      return ls;
    }
    fail("unexpected end of file, expected '" + expect_key + "'");
  }

  std::string word(const std::string& key) {
    auto ls = next(key);
    std::string v;
    if (!(ls >> v)) fail("missing value for '" + key + "'");
    return v;
  }

  // Rest of the line after the key, without the separating space.
  std::string rest(const std::string& key) {
    auto ls = next(key);
    std::string v;
    std::getline(ls, v);
    if (!v.empty() && v[0] == ' ') v.erase(0, 1);
    return v;
  }

  long long integer(const std::string& key) {
    const std::string v = word(key);
    try {
      std::size_t pos = 0;
      const long long out = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      fail("'" + key + "' is not an integer: " + v);
    }
  }

  double number(const std::string& key) { return to_double(word(key)); }

  double to_double(const std::string& s) {
    try {
      return parse_hex_double(s);
    } catch (const Error&) {
      fail("bad number '" + s + "'");
    }
  }

  Matrix matrix(const std::string& name) {
    auto ls = next("matrix");
    std::string got;
    Eigen::Index rows = -1, cols = -1;
    ls >> got >> rows >> cols;
    if (got != name || rows < 0 || cols < 0) fail("expected matrix '" + name + "'");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::string line;
      if (!std::getline(in_, line)) fail("truncated matrix '" + name + "'");
      ++line_no_;
      std::istringstream row(line);
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string tok;
        if (!(row >> tok)) fail("short row in matrix '" + name + "'");
        m(i, j) = to_double(tok);
      }
    }
    return m;
  }

  Eigen::RowVectorXd row(const std::string& key) {
    auto ls = next(key);
    Eigen::Index n = -1;
    ls >> n;
    if (n < 0) fail("bad length for '" + key + "'");
    Eigen::RowVectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail("short vector '" + key + "'");
      v(j) = to_double(tok);
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::parse_error, "model file line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorKind::parse_error, "bad number '" + s + "'");
  }
  return v;
}

void write_model(std::ostream& out, const TrainedModel& model,
                 const std::map<std::string, std::string>& comments) {
  const auto& cfg = model.config;
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  for (const auto& [k, v] : comments) out << "# " << k << ": " << v << '\n';
  out << "variant " << to_string(cfg.variant) << '\n';
  out << "c_reg " << hex_double(cfg.c_reg) << '\n';
  out << "network.m " << cfg.network.m << '\n';
  out << "network.p " << cfg.network.p << '\n';
  out << "network.l " << cfg.network.l << '\n';
  out << "network.q " << cfg.network.q << '\n';
  out << "network.feature_activation " << to_string(cfg.network.feature_activation) << '\n';
  out << "network.enhancement_activation " << to_string(cfg.network.enhancement_activation) << '\n';
  out << "network.seed " << cfg.network.seed << '\n';
  if (cfg.fuzzy_delta) out << "fuzzy.delta " << hex_double(*cfg.fuzzy_delta) << '\n';
  if (cfg.kernel) {
    out << "kernel.mu " << hex_double(cfg.kernel->mu) << '\n';
    out << "kernel.delta " << hex_double(cfg.kernel->delta) << '\n';
    if (cfg.kernel->epsilon.kind == EpsilonPolicy::Kind::median_heuristic) {
      out << "kernel.epsilon median\n";
    } else {
      out << "kernel.epsilon " << hex_double(cfg.kernel->epsilon.value) << '\n';
    }
  }
  out << "normalization minmax\n";
  out << "solve_branch " << to_string(model.solve_branch_used) << '\n';
  out << "classes " << model.class_labels.size() << '\n';
  for (const auto& c : model.class_labels) out << "class " << c << '\n';
  out << "input_dim " << model.layer.input_dim << '\n';
  write_row(out, "norm.min", model.norm.min);
  write_row(out, "norm.max", model.norm.max);
  for (std::size_t i = 0; i < model.layer.feature_weights.size(); ++i) {
    write_matrix(out, "feature_weight." + std::to_string(i), model.layer.feature_weights[i]);
    write_matrix(out, "feature_bias." + std::to_string(i), model.layer.feature_biases[i]);
  }
  for (std::size_t j = 0; j < model.layer.enhancement_weights.size(); ++j) {
    write_matrix(out, "enhancement_weight." + std::to_string(j), model.layer.enhancement_weights[j]);
    write_matrix(out, "enhancement_bias." + std::to_string(j), model.layer.enhancement_biases[j]);
  }
  write_matrix(out, "w_out", model.w_out);
  out << "end\n";
}

TrainedModel read_model(std::istream& in) {
  Reader rd(in);
  {
    const long long version = rd.integer(kMagic);
    if (version != kModelFormatVersion) {
      rd.fail("unsupported model format version " + std::to_string(version));
    }
  }
  TrainedModel model;
  auto& cfg = model.config;
  try {
    cfg.variant = parse_variant(rd.word("variant"));
    cfg.c_reg = rd.number("c_reg");
    cfg.network.m = static_cast<int>(rd.integer("network.m"));
    cfg.network.p = static_cast<int>(rd.integer("network.p"));
    cfg.network.l = static_cast<int>(rd.integer("network.l"));
    cfg.network.q = static_cast<int>(rd.integer("network.q"));
    cfg.network.feature_activation = parse_feature_activation(rd.word("network.feature_activation"));
    cfg.network.enhancement_activation =
        parse_enhancement_activation(rd.word("network.enhancement_activation"));
    cfg.network.seed = std::stoull(rd.word("network.seed"));
    if (cfg.variant == Variant::f_bls) cfg.fuzzy_delta = rd.number("fuzzy.delta");
    if (cfg.variant == Variant::if_bls) {
      KernelParams kp;
      kp.mu = rd.number("kernel.mu");
      kp.delta = rd.number("kernel.delta");
      const std::string eps = rd.word("kernel.epsilon");
      kp.epsilon = eps == "median" ? EpsilonPolicy::median() : EpsilonPolicy::fixed_at(rd.to_double(eps));
      cfg.kernel = kp;
    }
    if (rd.word("normalization") != "minmax") rd.fail("unsupported normalization");
    model.solve_branch_used = parse_solve_branch(rd.word("solve_branch"));
    const long long n_classes = rd.integer("classes");
    for (long long c = 0; c < n_classes; ++c) model.class_labels.push_back(rd.rest("class"));
    cfg.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse_error) throw;
    rd.fail(e.what());
  } catch (const std::logic_error& e) {
    rd.fail(std::string("bad value: ") + e.what());
  }

  auto& layer = model.layer;
  layer.input_dim = static_cast<int>(rd.integer("input_dim"));
  layer.feature_activation = cfg.network.feature_activation;
  layer.enhancement_activation = cfg.network.enhancement_activation;
  model.norm.min = rd.row("norm.min");
  model.norm.max = rd.row("norm.max");
  for (int i = 0; i < cfg.network.m; ++i) {
    layer.feature_weights.push_back(rd.matrix("feature_weight." + std::to_string(i)));
    layer.feature_biases.push_back(rd.matrix("feature_bias." + std::to_string(i)));
  }
  for (int j = 0; j < cfg.network.l; ++j) {
    layer.enhancement_weights.push_back(rd.matrix("enhancement_weight." + std::to_string(j)));
    layer.enhancement_biases.push_back(rd.matrix("enhancement_bias." + std::to_string(j)));
  }
  model.w_out = rd.matrix("w_out");
  rd.next("end");

  const auto width = cfg.network.width();
  if (model.norm.min.size() != layer.input_dim || model.norm.max.size() != layer.input_dim ||
      model.w_out.rows() != width ||
      model.w_out.cols() != static_cast<Eigen::Index>(model.class_labels.size()) ||
      layer.feature_width() != cfg.network.m * cfg.network.p ||
      layer.enhancement_width() != cfg.network.l * cfg.network.q) {
    rd.fail("matrix shapes are inconsistent with the stored configuration");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model,
                const std::map<std::string, std::string>& comments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path.string() + "'");
  write_model(out, model, comments);
  if (!out) throw Error(ErrorKind::io_error, "failed writing '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace ifbls
