#pragma once

#include "ifbls/linalg.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ifbls {

enum class FeatureActivation { linear, tanh, sigmoid };
enum class EnhancementActivation { tanh, sigmoid, relu };

std::string to_string(FeatureActivation a);
std::string to_string(EnhancementActivation a);
FeatureActivation parse_feature_activation(std::string_view s);
EnhancementActivation parse_enhancement_activation(std::string_view s);

struct NetworkConfig {
  int m = 1;  // feature groups
  int p = 1;  // nodes per feature group
  int l = 1;  // enhancement groups
  int q = 1;  // nodes per enhancement group
  FeatureActivation feature_activation = FeatureActivation::linear;
  EnhancementActivation enhancement_activation = EnhancementActivation::tanh;
  std::uint64_t seed = 0;

  /// Width of the state matrix, m*p + l*q.
  int width() const { return m * p + l * q; }
  void validate() const;
};

/// The frozen random weights of the feature and enhancement layers.
struct RandomLayer {
  int input_dim = 0;
  FeatureActivation feature_activation = FeatureActivation::linear;
  EnhancementActivation enhancement_activation = EnhancementActivation::tanh;
  std::vector<Matrix> feature_weights;      // m of D x p
  std::vector<Matrix> feature_biases;       // m of 1 x p
  std::vector<Matrix> enhancement_weights;  // l of (mp) x q
  std::vector<Matrix> enhancement_biases;   // l of 1 x q

  int feature_width() const;
  int enhancement_width() const;
};

/// Draws every weight and bias i.i.d. uniform on [-1, 1]. Each group has its
/// own stream keyed by (seed, layer, group), so the values of one group do not
/// depend on how many other groups exist.
RandomLayer init_random_layer(const NetworkConfig& cfg, int input_dim);

/// F^m = [act(X W_1 + b_1), ..., act(X W_m + b_m)]
Matrix feature_groups(const RandomLayer& layer, const Matrix& x);

/// E^l = [act(F^m V_1 + c_1), ..., act(F^m V_l + c_l)]
Matrix enhancement_groups(const RandomLayer& layer, const Matrix& fm);

/// G = [F^m, E^l]
Matrix assemble_g(const Matrix& fm, const Matrix& el);

/// Runs the three steps above.
Matrix build_state_matrix(const RandomLayer& layer, const Matrix& x);

}  // namespace ifbls
