#include "ifbls/network.hpp"

#include "ifbls/error.hpp"

#include <cmath>
#include <random>

namespace ifbls {

namespace {

constexpr std::uint64_t kFeatureLayer = 1;
constexpr std::uint64_t kEnhancementLayer = 2;

// Uniform on [-1, 1] from the top 53 bits, so the stream is identical on every
// standard library (std::uniform_real_distribution is implementation-defined).
double uniform_pm1(std::mt19937_64& gen) {
  const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return 2.0 * unit - 1.0;
}

std::mt19937_64 group_stream(std::uint64_t seed, std::uint64_t layer, std::uint64_t group) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(group)};
  return std::mt19937_64(seq);
}

Matrix random_block(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = uniform_pm1(gen);
  return out;
}

void apply(FeatureActivation a, Matrix& z) {
  switch (a) {
    case FeatureActivation::linear: break;
    case FeatureActivation::tanh: z = z.array().tanh().matrix(); break;
    case FeatureActivation::sigmoid: z = (1.0 / (1.0 + (-z.array()).exp())).matrix(); break;
  }
}

void apply(EnhancementActivation a, Matrix& z) {
  switch (a) {
    case EnhancementActivation::tanh: z = z.array().tanh().matrix(); break;
    case EnhancementActivation::sigmoid: z = (1.0 / (1.0 + (-z.array()).exp())).matrix(); break;
    case EnhancementActivation::relu: z = z.array().max(0.0).matrix(); break;
  }
}

}  // namespace

std::string to_string(FeatureActivation a) {
  switch (a) {
    case FeatureActivation::linear: return "linear";
    case FeatureActivation::tanh: return "tanh";
    case FeatureActivation::sigmoid: return "sigmoid";
  }
  return "?";
}

std::string to_string(EnhancementActivation a) {
  switch (a) {
    case EnhancementActivation::tanh: return "tanh";
    case EnhancementActivation::sigmoid: return "sigmoid";
    case EnhancementActivation::relu: return "relu";
  }
  return "?";
}

FeatureActivation parse_feature_activation(std::string_view s) {
  if (s == "linear") return FeatureActivation::linear;
  if (s == "tanh") return FeatureActivation::tanh;
  if (s == "sigmoid") return FeatureActivation::sigmoid;
  throw Error(ErrorKind::invalid_argument, "unknown feature activation '" + std::string(s) + "'");
}

EnhancementActivation parse_enhancement_activation(std::string_view s) {
  if (s == "tanh") return EnhancementActivation::tanh;
  if (s == "sigmoid") return EnhancementActivation::sigmoid;
  if (s == "relu") return EnhancementActivation::relu;
  throw Error(ErrorKind::invalid_argument,
              "unknown enhancement activation '" + std::string(s) + "'");
}

void NetworkConfig::validate() const {
  if (m < 1 || p < 1 || l < 1 || q < 1) {
    throw Error(ErrorKind::invalid_argument,
                "network config requires m, p, l, q >= 1 (got m=" + std::to_string(m) +
                    " p=" + std::to_string(p) + " l=" + std::to_string(l) +
                    " q=" + std::to_string(q) + ")");
  }
}

int RandomLayer::feature_width() const {
  int w = 0;
  for (const auto& fw : feature_weights) w += static_cast<int>(fw.cols());
  return w;
}

int RandomLayer::enhancement_width() const {
  int w = 0;
  for (const auto& ew : enhancement_weights) w += static_cast<int>(ew.cols());
  return w;
}

RandomLayer init_random_layer(const NetworkConfig& cfg, int input_dim) {
  cfg.validate();
  if (input_dim < 1) {
    throw Error(ErrorKind::invalid_argument, "input dimension must be >= 1");
  }
  RandomLayer layer;
  layer.input_dim = input_dim;
  layer.feature_activation = cfg.feature_activation;
  layer.enhancement_activation = cfg.enhancement_activation;

  for (int i = 0; i < cfg.m; ++i) {
    auto gen = group_stream(cfg.seed, kFeatureLayer, static_cast<std::uint64_t>(i));
    layer.feature_weights.push_back(random_block(gen, input_dim, cfg.p));
    layer.feature_biases.push_back(random_block(gen, 1, cfg.p));
  }
  const int mp = cfg.m * cfg.p;
  for (int j = 0; j < cfg.l; ++j) {
    auto gen = group_stream(cfg.seed, kEnhancementLayer, static_cast<std::uint64_t>(j));
    layer.enhancement_weights.push_back(random_block(gen, mp, cfg.q));
    layer.enhancement_biases.push_back(random_block(gen, 1, cfg.q));
  }
  return layer;
}

Matrix feature_groups(const RandomLayer& layer, const Matrix& x) {
  if (x.cols() != layer.input_dim) {
    throw Error(ErrorKind::dimension_mismatch,
                "feature_groups: input has " + std::to_string(x.cols()) +
                    " columns, layer expects " + std::to_string(layer.input_dim));
  }
  Matrix fm(x.rows(), layer.feature_width());
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < layer.feature_weights.size(); ++i) {
    const auto& w = layer.feature_weights[i];
    Matrix z = x * w;
    z.rowwise() += layer.feature_biases[i].row(0);
    apply(layer.feature_activation, z);
    fm.middleCols(col, w.cols()) = z;
    col += w.cols();
  }
  return fm;
}

Matrix enhancement_groups(const RandomLayer& layer, const Matrix& fm) {
  if (fm.cols() != layer.feature_width()) {
    throw Error(ErrorKind::dimension_mismatch,
                "enhancement_groups: input has " + std::to_string(fm.cols()) +
                    " columns, layer expects " + std::to_string(layer.feature_width()));
  }
  Matrix el(fm.rows(), layer.enhancement_width());
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < layer.enhancement_weights.size(); ++j) {
    const auto& w = layer.enhancement_weights[j];
    Matrix z = fm * w;
    z.rowwise() += layer.enhancement_biases[j].row(0);
    apply(layer.enhancement_activation, z);
    el.middleCols(col, w.cols()) = z;
    col += w.cols();
  }
  return el;
}

Matrix assemble_g(const Matrix& fm, const Matrix& el) {
  if (fm.rows() != el.rows()) {
    throw Error(ErrorKind::dimension_mismatch,
                "assemble_g: feature block has " + std::to_string(fm.rows()) +
                    " rows, enhancement block has " + std::to_string(el.rows()));
  }
  if (fm.cols() == 0 || el.cols() == 0) {
    throw Error(ErrorKind::invalid_argument,
                "assemble_g: feature and enhancement blocks must both be non-empty");
  }
  Matrix g(fm.rows(), fm.cols() + el.cols());
  g.leftCols(fm.cols()) = fm;
  g.rightCols(el.cols()) = el;
  return g;
}

Matrix build_state_matrix(const RandomLayer& layer, const Matrix& x) {
  const Matrix fm = feature_groups(layer, x);
  return assemble_g(fm, enhancement_groups(layer, fm));
}

}  // namespace ifbls
