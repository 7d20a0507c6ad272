#include "ifbls/error.hpp"
#include "ifbls/network.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace ifbls;
using ifbls::test::random_matrix;

namespace {

NetworkConfig cfg_of(int m, int p, int l, int q, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.m = m;
  cfg.p = p;
  cfg.l = l;
  cfg.q = q;
  cfg.seed = seed;
  return cfg;
}

bool same_layer(const RandomLayer& a, const RandomLayer& b) {
  auto eq = [](const std::vector<Matrix>& x, const std::vector<Matrix>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].rows() != y[i].rows() || x[i].cols() != y[i].cols() || x[i] != y[i]) return false;
    return true;
  };
  return eq(a.feature_weights, b.feature_weights) && eq(a.feature_biases, b.feature_biases) &&
         eq(a.enhancement_weights, b.enhancement_weights) &&
         eq(a.enhancement_biases, b.enhancement_biases);
}

}  // namespace

TEST_CASE("init_random_layer is deterministic for a fixed seed") {
  const auto cfg = cfg_of(1, 1, 1, 1, 7);
  const RandomLayer a = init_random_layer(cfg, 1);
  const RandomLayer b = init_random_layer(cfg, 1);
  REQUIRE(a.feature_weights.size() == 1);
  CHECK(a.feature_weights[0].rows() == 1);
  CHECK(a.feature_weights[0].cols() == 1);
  REQUIRE(a.enhancement_weights.size() == 1);
  CHECK(a.enhancement_weights[0].rows() == 1);
  CHECK(a.enhancement_weights[0].cols() == 1);
  CHECK(same_layer(a, b));
}

TEST_CASE("init_random_layer shapes") {
  const RandomLayer layer = init_random_layer(cfg_of(3, 5, 2, 4, 1), 4);
  CHECK(layer.input_dim == 4);
  REQUIRE(layer.feature_weights.size() == 3);
  for (const auto& w : layer.feature_weights) {
    CHECK(w.rows() == 4);
    CHECK(w.cols() == 5);
  }
  for (const auto& b : layer.feature_biases) {
    CHECK(b.rows() == 1);
    CHECK(b.cols() == 5);
  }
  REQUIRE(layer.enhancement_weights.size() == 2);
  for (const auto& v : layer.enhancement_weights) {
    CHECK(v.rows() == 15);
    CHECK(v.cols() == 4);
  }
  CHECK(layer.feature_width() == 15);
  CHECK(layer.enhancement_width() == 8);
}

TEST_CASE("different seeds give different weights") {
  const RandomLayer a = init_random_layer(cfg_of(2, 3, 1, 3, 7), 2);
  const RandomLayer b = init_random_layer(cfg_of(2, 3, 1, 3, 8), 2);
  CHECK_FALSE(same_layer(a, b));
}

TEST_CASE("weights lie in [-1, 1] and a group does not depend on the group count") {
  const RandomLayer small = init_random_layer(cfg_of(1, 4, 1, 3, 21), 3);
  const RandomLayer big = init_random_layer(cfg_of(4, 4, 1, 3, 21), 3);
  CHECK(small.feature_weights[0] == big.feature_weights[0]);
  CHECK(small.feature_biases[0] == big.feature_biases[0]);
  for (const auto& w : big.feature_weights) {
    CHECK(w.maxCoeff() <= 1.0);
    CHECK(w.minCoeff() >= -1.0);
  }
}

TEST_CASE("invalid configurations are rejected") {
  for (auto bad : {cfg_of(0, 1, 1, 1, 0), cfg_of(1, 0, 1, 1, 0), cfg_of(1, 1, 0, 1, 0),
                   cfg_of(1, 1, 1, 0, 0)}) {
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(init_random_layer(bad, 2), Error);
  }
  CHECK_THROWS_AS(init_random_layer(cfg_of(1, 1, 1, 1, 0), 0), Error);
}

TEST_CASE("feature_groups: linear map with identity weights reproduces X") {
  RandomLayer layer = init_random_layer(cfg_of(1, 3, 1, 1, 0), 3);
  layer.feature_activation = FeatureActivation::linear;
  layer.feature_weights[0] = Matrix::Identity(3, 3);
  layer.feature_biases[0] = Matrix::Zero(1, 3);
  std::mt19937_64 gen(3);
  const Matrix x = random_matrix(gen, 5, 3);
  CHECK(feature_groups(layer, x) == x);
}

TEST_CASE("feature_groups: tanh of zero input with zero bias is zero") {
  RandomLayer layer = init_random_layer(cfg_of(2, 3, 1, 1, 0), 2);
  layer.feature_activation = FeatureActivation::tanh;
  for (auto& b : layer.feature_biases) b.setZero();
  CHECK(feature_groups(layer, Matrix::Zero(4, 2)).isZero(0.0));
}

TEST_CASE("feature_groups: columns of each group equal that group computed alone") {
  RandomLayer layer = init_random_layer(cfg_of(2, 3, 1, 2, 5), 4);
  layer.feature_activation = FeatureActivation::sigmoid;
  std::mt19937_64 gen(4);
  const Matrix x = random_matrix(gen, 6, 4);
  const Matrix fm = feature_groups(layer, x);
  REQUIRE(fm.cols() == 6);
  for (int g = 0; g < 2; ++g) {
    Matrix alone = x * layer.feature_weights[static_cast<std::size_t>(g)];
    alone.rowwise() += layer.feature_biases[static_cast<std::size_t>(g)].row(0);
    alone = alone.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    CHECK((fm.middleCols(3 * g, 3) - alone).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK_THROWS_AS(feature_groups(layer, Matrix::Zero(2, 3)), Error);
}

TEST_CASE("enhancement_groups: sigmoid with zero weights is 0.5") {
  RandomLayer layer = init_random_layer(cfg_of(1, 2, 1, 3, 0), 2);
  layer.enhancement_activation = EnhancementActivation::sigmoid;
  layer.enhancement_weights[0].setZero();
  layer.enhancement_biases[0].setZero();
  std::mt19937_64 gen(5);
  const Matrix e = enhancement_groups(layer, random_matrix(gen, 4, 2));
  CHECK(e.rows() == 4);
  CHECK(e.cols() == 3);
  CHECK((e.array() == 0.5).all());
}

TEST_CASE("enhancement_groups: tanh range and width") {
  const RandomLayer layer = init_random_layer(cfg_of(2, 3, 1, 7, 9), 3);
  std::mt19937_64 gen(6);
  const Matrix fm = feature_groups(layer, random_matrix(gen, 10, 3));
  const Matrix e = enhancement_groups(layer, fm);
  CHECK(e.cols() == 7);
  CHECK(e.maxCoeff() < 1.0);
  CHECK(e.minCoeff() > -1.0);
}

TEST_CASE("enhancement_groups: relu is non-negative") {
  RandomLayer layer = init_random_layer(cfg_of(2, 3, 2, 4, 9), 3);
  layer.enhancement_activation = EnhancementActivation::relu;
  std::mt19937_64 gen(7);
  const Matrix e = enhancement_groups(layer, feature_groups(layer, random_matrix(gen, 10, 3)));
  CHECK(e.cols() == 8);
  CHECK(e.minCoeff() >= 0.0);
}

TEST_CASE("assemble_g") {
  std::mt19937_64 gen(8);
  const Matrix fm = random_matrix(gen, 2, 3), el = random_matrix(gen, 2, 2);
  const Matrix g = assemble_g(fm, el);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 5);
  CHECK(g.leftCols(3) == fm);
  CHECK(g.rightCols(2) == el);
  CHECK_THROWS_AS(assemble_g(fm, Matrix(2, 0)), Error);
  CHECK_THROWS_AS(assemble_g(fm, random_matrix(gen, 3, 2)), Error);
}

TEST_CASE("property: build_state_matrix is deterministic with width m*p + l*q") {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> small(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    auto cfg = cfg_of(small(gen), small(gen), small(gen), small(gen), gen());
    cfg.feature_activation = static_cast<FeatureActivation>(trial % 3);
    cfg.enhancement_activation = static_cast<EnhancementActivation>((trial / 3) % 3);
    const int d = small(gen);
    const Matrix x = random_matrix(gen, 1 + trial % 9, d);
    const Matrix g1 = build_state_matrix(init_random_layer(cfg, d), x);
    const Matrix g2 = build_state_matrix(init_random_layer(cfg, d), x);
    CHECK(g1.cols() == cfg.width());
    CHECK(g1.rows() == x.rows());
    CHECK(g1 == g2);
    const Matrix fm = g1.leftCols(cfg.m * cfg.p);
    CHECK(fm == feature_groups(init_random_layer(cfg, d), x));
    const Matrix el = g1.rightCols(cfg.l * cfg.q);
    if (cfg.enhancement_activation == EnhancementActivation::tanh) {
      CHECK(el.maxCoeff() < 1.0);
      CHECK(el.minCoeff() > -1.0);
    } else if (cfg.enhancement_activation == EnhancementActivation::sigmoid) {
      CHECK(el.maxCoeff() < 1.0);
      CHECK(el.minCoeff() > 0.0);
    }
  }
}

TEST_CASE("activation names round-trip") {
  for (auto a : {FeatureActivation::linear, FeatureActivation::tanh, FeatureActivation::sigmoid})
    CHECK(parse_feature_activation(to_string(a)) == a);
  for (auto a : {EnhancementActivation::tanh, EnhancementActivation::sigmoid,
                 EnhancementActivation::relu})
    CHECK(parse_enhancement_activation(to_string(a)) == a);
  CHECK_THROWS_AS(parse_feature_activation("cubic"), Error);
  CHECK_THROWS_AS(parse_enhancement_activation("linear"), Error);
}
