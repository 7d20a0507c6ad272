#pragma once

#include "ifbls/if_scores.hpp"
#include "ifbls/linalg.hpp"
#include "ifbls/network.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ifbls {

enum class Variant { bls, f_bls, if_bls };
enum class SolveBranch { primal, dual };

std::string to_string(Variant v);
std::string to_string(SolveBranch b);
Variant parse_variant(std::string_view s);
SolveBranch parse_solve_branch(std::string_view s);

struct ModelConfig {
  Variant variant = Variant::bls;
  NetworkConfig network;
  double c_reg = 1.0;
  std::optional<KernelParams> kernel;  // IF-BLS only
  std::optional<double> fuzzy_delta;   // F-BLS only

  static ModelConfig bls(const NetworkConfig& net, double c_reg);
  static ModelConfig fuzzy(const NetworkConfig& net, double c_reg, double delta = kDefaultDelta);
  static ModelConfig intuitionistic(const NetworkConfig& net, double c_reg, const KernelParams& kp);

  /// Checks the network, C, and that the variant-specific fields are present
  /// exactly when the variant needs them.
  void validate() const;
};

/// Per-feature min-max scaling to [0, 1]. Constant features map to 0.
struct MinMaxScaler {
  Eigen::RowVectorXd min;
  Eigen::RowVectorXd max;

  static MinMaxScaler fit(const Matrix& x);
  Matrix transform(const Matrix& x) const;
};

struct TrainedModel {
  ModelConfig config;
  RandomLayer layer;
  Matrix w_out;  // (mp + lq) x classes
  MinMaxScaler norm;
  std::vector<std::string> class_labels;
  SolveBranch solve_branch_used = SolveBranch::primal;

  int input_dim() const { return layer.input_dim; }
};

struct FitOptions {
  std::optional<SolveBranch> force_branch;
  /// Replaces the variant's computed score vector (testing and diagnostics).
  std::optional<std::vector<double>> score_override;
};

/// Solver choice: primal while the state width does not exceed the sample count.
SolveBranch choose_branch(int width, Eigen::Index n_samples);

/// Class index 0 maps to +1, index 1 to -1.
std::vector<int> signed_labels(std::span<const int> class_index);

/// Score vector S for already-normalized training features.
DiagonalWeights compute_sample_scores(const ModelConfig& cfg, const Matrix& x_norm,
                                      std::span<const int> class_index);

/// One-hot targets, one column per class.
Matrix one_hot(std::span<const int> class_index, int n_classes);

TrainedModel fit(const Matrix& x, const std::vector<std::string>& labels,
                 const ModelConfig& cfg, const FitOptions& options = {});

/// As above with a fixed class list; every label must appear in it.
TrainedModel fit(const Matrix& x, const std::vector<std::string>& labels,
                 const std::vector<std::string>& class_labels, const ModelConfig& cfg,
                 const FitOptions& options = {});

/// Raw output layer G * W before the argmax.
Matrix decision_scores(const TrainedModel& model, const Matrix& x);

/// Argmax class index per row; ties go to the lower index.
std::vector<int> predict_indices(const TrainedModel& model, const Matrix& x);
std::vector<std::string> predict(const TrainedModel& model, const Matrix& x);

}  // namespace ifbls
