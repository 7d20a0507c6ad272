#pragma once

#include <span>
#include <string>
#include <vector>

namespace ifbls {

/// Ranks of D models over K datasets; rank 1 is the most accurate model on a
/// dataset and exact ties share the mean of the positions they cover.
struct RankTable {
  std::vector<std::string> datasets;
  std::vector<std::string> models;
  std::vector<std::vector<double>> accuracy;  // K x D
  std::vector<std::vector<double>> ranks;     // K x D
  std::vector<double> average_rank;           // D
};

/// Fractional ranks of `values`, largest value first, ties averaged.
std::vector<double> rank_descending(std::span<const double> values);

RankTable rank_models(const std::vector<std::vector<double>>& accuracy,
                      std::vector<std::string> datasets = {},
                      std::vector<std::string> models = {});

struct FriedmanResult {
  double chi2 = 0.0;
  double f_stat = 0.0;
  int df_chi2 = 0;    // D - 1
  int df_f_num = 0;   // D - 1
  int df_f_den = 0;   // (K - 1)(D - 1)
};

/// Friedman chi-square alone; defined even where the F statistic is not.
double friedman_chi2(std::span<const double> average_rank, int k_datasets);

/// Friedman chi-square and the Iman-Davenport F statistic from average ranks
/// of D models over K datasets.
FriedmanResult friedman_from_average_ranks(std::span<const double> average_rank, int k_datasets);
FriedmanResult friedman_test(const RankTable& ranks);

struct WilcoxonResult {
  double p_value = 1.0;
  bool reject = false;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double z = 0.0;
  int n_nonzero = 0;
};

/// Two-sided signed-rank test on paired samples, normal approximation with
/// tie-corrected variance and continuity correction. Zero differences are
/// dropped before ranking.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05);

struct WinTieLoss {
  int wins_a = 0;
  int ties = 0;
  int wins_b = 0;
  double threshold = 0.0;
  bool significant = false;
};

/// K/2 + 1.96 sqrt(K)/2
double win_tie_loss_threshold(int k_datasets);

WinTieLoss win_tie_loss(std::span<const double> a, std::span<const double> b,
                        double tie_tol = 1e-4);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std_dev(std::span<const double> v);

}  // namespace ifbls
