#include "ifbls/trainer.hpp"

#include "ifbls/data_io.hpp"
#include "ifbls/error.hpp"
#include "ifbls/fuzzy_scores.hpp"

#include <algorithm>
#include <cmath>

namespace ifbls {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::bls: return "bls";
    case Variant::f_bls: return "f-bls";
    case Variant::if_bls: return "if-bls";
  }
  return "?";
}

std::string to_string(SolveBranch b) { return b == SolveBranch::primal ? "primal" : "dual"; }

Variant parse_variant(std::string_view s) {
  if (s == "bls") return Variant::bls;
  if (s == "f-bls" || s == "fbls") return Variant::f_bls;
  if (s == "if-bls" || s == "ifbls") return Variant::if_bls;
  throw Error(ErrorKind::invalid_argument,
              "unknown variant '" + std::string(s) + "' (expected bls, f-bls, if-bls)");
}

SolveBranch parse_solve_branch(std::string_view s) {
  if (s == "primal") return SolveBranch::primal;
  if (s == "dual") return SolveBranch::dual;
  throw Error(ErrorKind::invalid_argument, "unknown solve branch '" + std::string(s) + "'");
}

ModelConfig ModelConfig::bls(const NetworkConfig& net, double c_reg) {
  ModelConfig cfg;
  cfg.variant = Variant::bls;
  cfg.network = net;
  cfg.c_reg = c_reg;
  return cfg;
}

ModelConfig ModelConfig::fuzzy(const NetworkConfig& net, double c_reg, double delta) {
  ModelConfig cfg = bls(net, c_reg);
  cfg.variant = Variant::f_bls;
  cfg.fuzzy_delta = delta;
  return cfg;
}

ModelConfig ModelConfig::intuitionistic(const NetworkConfig& net, double c_reg,
                                        const KernelParams& kp) {
  ModelConfig cfg = bls(net, c_reg);
  cfg.variant = Variant::if_bls;
  cfg.kernel = kp;
  return cfg;
}

void ModelConfig::validate() const {
  network.validate();
  if (!(c_reg > 0.0) || !std::isfinite(c_reg)) {
    throw Error(ErrorKind::invalid_argument, "C must be positive and finite");
  }
  const bool wants_kernel = variant == Variant::if_bls;
  const bool wants_delta = variant == Variant::f_bls;
  if (kernel.has_value() != wants_kernel) {
    throw Error(ErrorKind::invalid_argument,
                "kernel parameters are " + std::string(wants_kernel ? "required" : "not allowed") +
                    " for variant " + to_string(variant));
  }
  if (fuzzy_delta.has_value() != wants_delta) {
    throw Error(ErrorKind::invalid_argument,
                "fuzzy delta is " + std::string(wants_delta ? "required" : "not allowed") +
                    " for variant " + to_string(variant));
  }
  if (kernel) kernel->validate();
  if (fuzzy_delta && !(*fuzzy_delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "delta must be positive");
  }
}

MinMaxScaler MinMaxScaler::fit(const Matrix& x) {
  if (x.rows() == 0) {
    throw Error(ErrorKind::invalid_argument, "cannot fit a scaler on zero samples");
  }
  return {x.colwise().minCoeff(), x.colwise().maxCoeff()};
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
  if (x.cols() != min.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                "expected " + std::to_string(min.size()) + " features, got " +
                    std::to_string(x.cols()));
  }
  Eigen::RowVectorXd range = max - min;
  for (Eigen::Index j = 0; j < range.size(); ++j)
    if (range(j) == 0.0) range(j) = 1.0;
  Matrix out = x.rowwise() - min;
  out.array().rowwise() /= range.array();
  return out;
}

SolveBranch choose_branch(int width, Eigen::Index n_samples) {
  return width <= n_samples ? SolveBranch::primal : SolveBranch::dual;
}

std::vector<int> signed_labels(std::span<const int> class_index) {
  std::vector<int> out(class_index.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = class_index[i] == 0 ? 1 : -1;
  return out;
}

DiagonalWeights compute_sample_scores(const ModelConfig& cfg, const Matrix& x_norm,
                                      std::span<const int> class_index) {
  switch (cfg.variant) {
    case Variant::bls:
      return DiagonalWeights::ones(static_cast<std::size_t>(x_norm.rows()));
    case Variant::f_bls:
      return fuzzy_score_vector(x_norm, signed_labels(class_index), *cfg.fuzzy_delta);
    case Variant::if_bls:
      return if_score_vector(x_norm, signed_labels(class_index), *cfg.kernel).weights;
  }
  return {};
}

Matrix one_hot(std::span<const int> class_index, int n_classes) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(class_index.size()), n_classes);
  for (std::size_t i = 0; i < class_index.size(); ++i) t(static_cast<Eigen::Index>(i), class_index[i]) = 1.0;
  return t;
}

TrainedModel fit(const Matrix& x, const std::vector<std::string>& labels,
                 const ModelConfig& cfg, const FitOptions& options) {
  return fit(x, labels, sorted_classes(labels), cfg, options);
}

TrainedModel fit(const Matrix& x, const std::vector<std::string>& labels,
                 const std::vector<std::string>& class_labels, const ModelConfig& cfg,
                 const FitOptions& options) {
  cfg.validate();
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw Error(ErrorKind::dimension_mismatch, std::to_string(x.rows()) + " samples but " +
                                                   std::to_string(labels.size()) + " labels");
  }
  if (x.rows() == 0 || x.cols() == 0) {
    throw Error(ErrorKind::invalid_argument, "training data is empty");
  }
  require_finite(x, "training features");
  if (class_labels.empty() || !std::is_sorted(class_labels.begin(), class_labels.end())) {
    throw Error(ErrorKind::invalid_argument, "class list must be non-empty and sorted");
  }

  std::vector<int> class_index(labels.size());
  std::vector<int> counts(class_labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::lower_bound(class_labels.begin(), class_labels.end(), labels[i]);
    if (it == class_labels.end() || *it != labels[i]) {
      throw Error(ErrorKind::invalid_argument, "label '" + labels[i] + "' is not in the class list");
    }
    class_index[i] = static_cast<int>(it - class_labels.begin());
    ++counts[static_cast<std::size_t>(class_index[i])];
  }
  if (cfg.variant != Variant::bls) {
    const bool binary = class_labels.size() == 2 && counts[0] >= 2 && counts[1] >= 2;
    if (!binary) {
      throw Error(ErrorKind::missing_class,
                  to_string(cfg.variant) + " needs exactly two classes with at least two "
                  "training samples each (got " + std::to_string(class_labels.size()) +
                      " class(es) in the training data)");
    }
  }

  TrainedModel model;
  model.config = cfg;
  model.class_labels = class_labels;
  model.norm = MinMaxScaler::fit(x);
  const Matrix x_norm = model.norm.transform(x);

  model.layer = init_random_layer(cfg.network, static_cast<int>(x.cols()));
  const Matrix g = build_state_matrix(model.layer, x_norm);

  const DiagonalWeights s = options.score_override
                                ? DiagonalWeights(*options.score_override)
                                : compute_sample_scores(cfg, x_norm, class_index);
  const Matrix t = one_hot(class_index, static_cast<int>(class_labels.size()));

  model.solve_branch_used = options.force_branch.value_or(choose_branch(cfg.network.width(), x.rows()));
  model.w_out = model.solve_branch_used == SolveBranch::primal
                    ? solve_weighted_ridge_primal(g, s, t, cfg.c_reg)
                    : solve_weighted_ridge_dual(g, s, t, cfg.c_reg);
  return model;
}

Matrix decision_scores(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.input_dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "model expects " + std::to_string(model.input_dim()) + " features, got " +
                    std::to_string(x.cols()));
  }
  require_finite(x, "features");
  if (x.rows() == 0) return Matrix(0, model.w_out.cols());
  return build_state_matrix(model.layer, model.norm.transform(x)) * model.w_out;
}

std::vector<int> predict_indices(const TrainedModel& model, const Matrix& x) {
  const Matrix scores = decision_scores(model, x);
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    int best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

std::vector<std::string> predict(const TrainedModel& model, const Matrix& x) {
  std::vector<std::string> out;
  for (int idx : predict_indices(model, x)) out.push_back(model.class_labels[static_cast<std::size_t>(idx)]);
  return out;
}

}  // namespace ifbls
