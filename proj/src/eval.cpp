#include "ifbls/eval.hpp"

#include "ifbls/error.hpp"
#include "ifbls/stats.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace ifbls {

namespace {

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) {
    throw Error(ErrorKind::invalid_argument, std::string("grid list '") + name + "' is empty");
  }
}

}  // namespace

CvResult cross_validate(const Dataset& ds, const ModelConfig& cfg, const FoldPlan& plan) {
  if (plan.assignments.size() != static_cast<std::size_t>(ds.size())) {
    throw Error(ErrorKind::dimension_mismatch,
                "fold plan covers " + std::to_string(plan.assignments.size()) +
                    " samples, dataset has " + std::to_string(ds.size()));
  }
  CvResult res;
  res.model_name = to_string(cfg.variant);
  res.dataset_name = ds.name;
  res.best_config = cfg;

  for (int fold = 0; fold < plan.k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const Dataset train = ds.subset(train_idx);
    const Dataset test = ds.subset(test_idx);

    const std::set<std::string> present(train.labels.begin(), train.labels.end());
    if (present.size() != ds.class_labels.size()) {
      res.skipped_folds.push_back(fold);
      res.warnings.push_back("fold " + std::to_string(fold) +
                             " skipped: training part is missing a class");
      continue;
    }
    TrainedModel model;
    try {
      model = fit(train.x, train.labels, ds.class_labels, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::missing_class) throw;
      res.skipped_folds.push_back(fold);
      res.warnings.push_back("fold " + std::to_string(fold) + " skipped: " + e.what());
      continue;
    }
    const auto predicted = predict(model, test.x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test.labels[i];
    res.per_fold_accuracy.push_back(100.0 * static_cast<double>(correct) /
                                    static_cast<double>(predicted.size()));
    res.evaluated_folds.push_back(fold);
  }
  if (res.per_fold_accuracy.empty()) {
    res.mean_accuracy = std::nan("");
    res.std_dev = std::nan("");
  } else {
    res.mean_accuracy = mean(res.per_fold_accuracy);
    res.std_dev = sample_std_dev(res.per_fold_accuracy);
  }
  return res;
}

GridSpec GridSpec::paper() {
  GridSpec g;
  for (int e = -6; e <= 6; e += 2) g.c.push_back(std::pow(10.0, e));
  for (int v = 1; v <= 21; v += 2) g.m.push_back(v);
  for (int v = 5; v <= 50; v += 5) g.p.push_back(v);
  for (int v = 5; v <= 105; v += 10) g.q.push_back(v);
  for (int e = -5; e <= 5; ++e) g.mu.push_back(std::ldexp(1.0, e));
  g.delta = {kDefaultDelta};
  g.epsilon = {EpsilonPolicy::median()};
  return g;
}

std::size_t grid_size(Variant variant, const GridSpec& grid) {
  std::size_t n = grid.c.size() * grid.m.size() * grid.p.size() * grid.q.size();
  if (variant == Variant::f_bls) n *= grid.delta.size();
  if (variant == Variant::if_bls) n *= grid.mu.size() * grid.delta.size() * grid.epsilon.size();
  return n;
}

std::vector<ModelConfig> enumerate_grid(Variant variant, const GridSpec& grid,
                                        const GridBase& base) {
  require_nonempty(grid.c, "C");
  require_nonempty(grid.m, "m");
  require_nonempty(grid.p, "p");
  require_nonempty(grid.q, "q");
  const bool kernel = variant == Variant::if_bls;
  const bool fuzzy = variant == Variant::f_bls;
  if (kernel) {
    require_nonempty(grid.mu, "mu");
    require_nonempty(grid.epsilon, "epsilon");
  }
  if (kernel || fuzzy) require_nonempty(grid.delta, "delta");

  // Parameters the variant ignores contribute a single pass.
  const std::vector<double> one{0.0};
  const auto& mus = kernel ? grid.mu : one;
  const auto& deltas = (kernel || fuzzy) ? grid.delta : one;
  const std::vector<EpsilonPolicy> one_eps{EpsilonPolicy::median()};
  const auto& epsilons = kernel ? grid.epsilon : one_eps;

  std::vector<ModelConfig> out;
  out.reserve(grid_size(variant, grid));
  for (double c : grid.c)
    for (int m : grid.m)
      for (int p : grid.p)
        for (int q : grid.q)
          for (double mu : mus)
            for (double delta : deltas)
              for (const auto& eps : epsilons) {
                NetworkConfig net;
                net.m = m;
                net.p = p;
                net.l = base.l;
                net.q = q;
                net.feature_activation = base.feature_activation;
                net.enhancement_activation = base.enhancement_activation;
                net.seed = base.model_seed;
                switch (variant) {
                  case Variant::bls: out.push_back(ModelConfig::bls(net, c)); break;
                  case Variant::f_bls: out.push_back(ModelConfig::fuzzy(net, c, delta)); break;
                  case Variant::if_bls:
                    out.push_back(ModelConfig::intuitionistic(net, c, KernelParams{mu, delta, eps}));
                    break;
                }
              }
  return out;
}

GridResult grid_search(const Dataset& ds, Variant variant, const GridSpec& grid,
                       const FoldPlan& plan, const GridBase& base, int jobs) {
  const auto configs = enumerate_grid(variant, grid, base);
  if (configs.empty()) {
    throw Error(ErrorKind::invalid_argument, "grid search over an empty configuration product");
  }
  GridResult result;
  result.evaluations.resize(configs.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        result.evaluations[i] = cross_validate(ds, configs[i], plan);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = configs.size();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Strict > keeps the earliest configuration on ties; NaN means no fold ran.
  bool found = false;
  for (std::size_t i = 0; i < result.evaluations.size(); ++i) {
    const double acc = result.evaluations[i].mean_accuracy;
    if (std::isnan(acc)) continue;
    if (!found || acc > result.evaluations[result.best_index].mean_accuracy) {
      result.best_index = i;
      found = true;
    }
  }
  return result;
}

}  // namespace ifbls
