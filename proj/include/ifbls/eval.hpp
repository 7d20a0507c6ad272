#pragma once

#include "ifbls/data_io.hpp"
#include "ifbls/trainer.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ifbls {

struct CvResult {
  std::string model_name;
  std::string dataset_name;
  std::vector<double> per_fold_accuracy;  // percent, evaluated folds only
  std::vector<int> evaluated_folds;
  std::vector<int> skipped_folds;  // training part lacked a class
  std::vector<std::string> warnings;
  double mean_accuracy = 0.0;
  double std_dev = 0.0;
  ModelConfig best_config;
};

/// Trains on each fold's complement and scores the held-out fold. A fold
/// whose training part is missing a class is skipped and reported.
CvResult cross_validate(const Dataset& ds, const ModelConfig& cfg, const FoldPlan& plan);

/// Value lists swept by grid_search. Lists for parameters the variant does
/// not use are ignored.
struct GridSpec {
  std::vector<double> c;
  std::vector<int> m;
  std::vector<int> p;
  std::vector<int> q;
  std::vector<double> mu;
  std::vector<double> delta;
  std::vector<EpsilonPolicy> epsilon;

  /// The hyperparameter ranges used for the UCI benchmark.
  static GridSpec paper();
};

/// Shared settings that the grid does not sweep.
struct GridBase {
  int l = 1;
  FeatureActivation feature_activation = FeatureActivation::linear;
  EnhancementActivation enhancement_activation = EnhancementActivation::tanh;
  std::uint64_t model_seed = 0;
};

/// Cartesian product in enumeration order: C outermost, then m, p, q, mu,
/// delta, epsilon.
std::vector<ModelConfig> enumerate_grid(Variant variant, const GridSpec& grid,
                                        const GridBase& base = {});
std::size_t grid_size(Variant variant, const GridSpec& grid);

struct GridResult {
  std::vector<CvResult> evaluations;  // enumeration order
  std::size_t best_index = 0;

  const CvResult& best() const { return evaluations.at(best_index); }
};

/// Evaluates every configuration with `jobs` worker threads. The best is the
/// highest mean accuracy, earliest in enumeration order on ties; neither
/// depends on `jobs`.
GridResult grid_search(const Dataset& ds, Variant variant, const GridSpec& grid,
                       const FoldPlan& plan, const GridBase& base = {}, int jobs = 1);

}  // namespace ifbls
