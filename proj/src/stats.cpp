#include "ifbls/stats.hpp"

#include "ifbls/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ifbls {

namespace {

// Average ranks of |values| ascending (1 = smallest), ties averaged.
std::vector<double> rank_ascending(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": sequences differ in length (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
}

}  // namespace

std::vector<double> rank_descending(std::span<const double> values) {
  std::vector<double> negated(values.size());
  std::transform(values.begin(), values.end(), negated.begin(), [](double v) { return -v; });
  return rank_ascending(negated);
}

RankTable rank_models(const std::vector<std::vector<double>>& accuracy,
                      std::vector<std::string> datasets, std::vector<std::string> models) {
  if (accuracy.empty() || accuracy[0].empty()) {
    throw Error(ErrorKind::invalid_argument, "rank_models: empty accuracy table");
  }
  const std::size_t d = accuracy[0].size();
  if (!datasets.empty() && datasets.size() != accuracy.size()) {
    throw Error(ErrorKind::dimension_mismatch, "rank_models: dataset names do not match rows");
  }
  if (!models.empty() && models.size() != d) {
    throw Error(ErrorKind::dimension_mismatch, "rank_models: model names do not match columns");
  }
  RankTable table;
  table.accuracy = accuracy;
  table.datasets = std::move(datasets);
  table.models = std::move(models);
  table.average_rank.assign(d, 0.0);
  for (std::size_t k = 0; k < accuracy.size(); ++k) {
    const auto& row = accuracy[k];
    if (row.size() != d) {
      throw Error(ErrorKind::dimension_mismatch,
                  "rank_models: row " + std::to_string(k + 1) + " has " +
                      std::to_string(row.size()) + " entries, expected " + std::to_string(d));
    }
    for (double v : row) {
      if (std::isnan(v)) {
        throw Error(ErrorKind::non_finite_input,
                    "rank_models: NaN accuracy in row " + std::to_string(k + 1));
      }
    }
    table.ranks.push_back(rank_descending(row));
    for (std::size_t j = 0; j < d; ++j) table.average_rank[j] += table.ranks.back()[j];
  }
  for (double& r : table.average_rank) r /= static_cast<double>(accuracy.size());
  return table;
}

namespace {

void require_friedman_shape(int d, int k_datasets) {
  if (k_datasets < 2) {
    throw Error(ErrorKind::invalid_argument,
                "Friedman test needs K >= 2 datasets, got " + std::to_string(k_datasets));
  }
  if (d < 2) {
    throw Error(ErrorKind::invalid_argument,
                "Friedman test needs D >= 2 models, got " + std::to_string(d));
  }
}

}  // namespace

double friedman_chi2(std::span<const double> average_rank, int k_datasets) {
  const int d = static_cast<int>(average_rank.size());
  require_friedman_shape(d, k_datasets);
  const double kd = k_datasets;
  const double dd = d;
  double sum_sq = 0.0;
  for (double r : average_rank) sum_sq += r * r;
  return 12.0 * kd / (dd * (dd + 1.0)) * (sum_sq - dd * (dd + 1.0) * (dd + 1.0) / 4.0);
}

FriedmanResult friedman_from_average_ranks(std::span<const double> average_rank, int k_datasets) {
  const int d = static_cast<int>(average_rank.size());
  FriedmanResult res;
  res.chi2 = friedman_chi2(average_rank, k_datasets);
  const double denom = static_cast<double>(k_datasets) * (d - 1.0) - res.chi2;
  if (denom == 0.0) {
    throw Error(ErrorKind::invalid_argument,
                "Friedman F statistic is undefined: K(D-1) equals chi-square");
  }
  res.f_stat = (k_datasets - 1.0) * res.chi2 / denom;
  res.df_chi2 = d - 1;
  res.df_f_num = d - 1;
  res.df_f_den = (k_datasets - 1) * (d - 1);
  return res;
}

FriedmanResult friedman_test(const RankTable& ranks) {
  return friedman_from_average_ranks(ranks.average_rank, static_cast<int>(ranks.ranks.size()));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha) {
  require_same_length(a, b, "wilcoxon");
  if (a.size() < 5) {
    throw Error(ErrorKind::invalid_argument,
                "wilcoxon: needs at least 5 pairs, got " + std::to_string(a.size()));
  }
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  if (diff.empty()) {
    throw Error(ErrorKind::invalid_argument, "wilcoxon: no nonzero pairs");
  }
  std::vector<double> magnitude(diff.size());
  std::transform(diff.begin(), diff.end(), magnitude.begin(), [](double d) { return std::abs(d); });
  const auto ranks = rank_ascending(magnitude);

  WilcoxonResult res;
  res.n_nonzero = static_cast<int>(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) (diff[i] > 0 ? res.w_plus : res.w_minus) += ranks[i];

  const double n = static_cast<double>(diff.size());
  const double expected = n * (n + 1.0) / 4.0;
  double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;

  // Tie correction: sum of (t^3 - t) / 48 over groups of equal magnitude.
  std::vector<double> sorted = magnitude;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    variance -= (t * t * t - t) / 48.0;
    i = j;
  }

  const double w = std::min(res.w_plus, res.w_minus);
  if (variance <= 0.0) {
    res.p_value = 1.0;
  } else {
    res.z = std::max(std::abs(w - expected) - 0.5, 0.0) / std::sqrt(variance);
    res.p_value = std::min(1.0, std::erfc(res.z / std::sqrt(2.0)));
  }
  res.reject = res.p_value < alpha;
  return res;
}

double win_tie_loss_threshold(int k_datasets) {
  const double k = k_datasets;
  return k / 2.0 + 1.96 * std::sqrt(k) / 2.0;
}

WinTieLoss win_tie_loss(std::span<const double> a, std::span<const double> b, double tie_tol) {
  require_same_length(a, b, "win_tie_loss");
  WinTieLoss res;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d > tie_tol) ++res.wins_a;
    else if (d < -tie_tol) ++res.wins_b;
    else ++res.ties;
  }
  res.threshold = win_tie_loss_threshold(static_cast<int>(a.size()));
  const double half_ties = 0.5 * res.ties;
  res.significant = res.wins_a + half_ties >= res.threshold || res.wins_b + half_ties >= res.threshold;
  return res;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std_dev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace ifbls
