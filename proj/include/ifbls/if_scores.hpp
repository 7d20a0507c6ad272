#pragma once

#include "ifbls/fuzzy_scores.hpp"
#include "ifbls/linalg.hpp"

#include <span>
#include <string>
#include <vector>

namespace ifbls {

/// How the neighbourhood radius for the non-membership ratio is chosen.
struct EpsilonPolicy {
  enum class Kind { median_heuristic, fixed };
  Kind kind = Kind::median_heuristic;
  double value = 0.0;  // used when kind == fixed

  static EpsilonPolicy median() { return {}; }
  static EpsilonPolicy fixed_at(double eps) { return {Kind::fixed, eps}; }
  std::string describe() const;
};

struct KernelParams {
  double mu = 1.0;  // Gaussian width
  double delta = kDefaultDelta;
  EpsilonPolicy epsilon;

  void validate() const;
};

struct IFScoreBreakdown {
  std::vector<double> membership;      // theta
  std::vector<double> non_membership;  // theta~ = (1 - theta) * ratio
  std::vector<double> hetero_ratio;    // share of opposite-class points in the eps-ball
  std::vector<double> score;           // final weight
};

struct IFScoreResult {
  DiagonalWeights weights;
  IFScoreBreakdown breakdown;
  double epsilon = 0.0;  // the resolved neighbourhood radius
};

struct KernelRadii {
  double radius_pos = 0.0;
  double radius_neg = 0.0;
};

/// K(a, b) = exp(-||a - b||^2 / mu^2)
Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double mu);

/// Feature-space distance sqrt(K_rr + K_ll - 2 K_rl). Radicands down to -1e-12
/// are rounding noise and clamp to zero; anything lower means the kernel is
/// not positive semidefinite.
double kernel_distance(double k_rr, double k_ll, double k_rl);

/// Feature-space distance of every sample to its own class centroid, using
/// only kernel entries. The class double sum is computed once per class.
std::vector<double> kernel_centroid_distances(const Matrix& k, std::span<const int> labels);

KernelRadii kernel_class_radii(const Matrix& k, std::span<const int> labels);

std::vector<double> kernel_membership(const Matrix& k, std::span<const int> labels,
                                      const KernelRadii& radii, double delta);

/// Median feature-space distance over all unordered pairs of distinct samples.
double median_kernel_distance(const Matrix& k);
double resolve_epsilon(const Matrix& k, const EpsilonPolicy& policy);

/// For each sample, |{l : d(r,l) <= eps, y_l != y_r}| / |{l : d(r,l) <= eps}|.
/// The sample itself is always in its own neighbourhood.
std::vector<double> hetero_ratio(const Matrix& k, std::span<const int> labels, double epsilon);

std::vector<double> non_membership(std::span<const double> membership,
                                   std::span<const double> ratio);

/// Combines membership and non-membership into the final sample weight.
double if_score(double theta, double theta_tilde);

/// Full pipeline from a precomputed training kernel matrix.
IFScoreResult if_score_from_kernel(const Matrix& k, std::span<const int> labels, double delta,
                                   const EpsilonPolicy& epsilon);

/// Full pipeline with the Gaussian kernel.
IFScoreResult if_score_vector(const Matrix& x, std::span<const int> labels,
                              const KernelParams& params);

}  // namespace ifbls
