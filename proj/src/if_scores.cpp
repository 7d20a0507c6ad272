#include "ifbls/if_scores.hpp"

#include "ifbls/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ifbls {

namespace {

constexpr double kRadicandTolerance = 1e-12;
constexpr double kScoreSlack = 1e-12;

void check_kernel_inputs(const Matrix& k, std::span<const int> labels) {
  if (k.rows() != k.cols() || static_cast<Eigen::Index>(labels.size()) != k.rows()) {
    throw Error(ErrorKind::dimension_mismatch,
                "kernel matrix is " + std::to_string(k.rows()) + "x" + std::to_string(k.cols()) +
                    " for " + std::to_string(labels.size()) + " labels");
  }
  require_signed_labels(labels);
  require_finite(k, "kernel matrix");
}

}  // namespace

std::string EpsilonPolicy::describe() const {
  if (kind == Kind::median_heuristic) return "median";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

void KernelParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::invalid_argument, "kernel width mu must be positive");
  }
  if (!(delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "delta must be positive");
  }
  if (epsilon.kind == EpsilonPolicy::Kind::fixed && !(epsilon.value >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "epsilon must be non-negative");
  }
}

Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double mu) {
  if (!(mu > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "kernel width mu must be positive");
  }
  Matrix k = pairwise_sq_dist(a, b);
  const double inv_mu2 = 1.0 / (mu * mu);
  k = (-k.array() * inv_mu2).exp().matrix();
  return k;
}

double kernel_distance(double k_rr, double k_ll, double k_rl) {
  const double radicand = k_rr + k_ll - 2.0 * k_rl;
  if (radicand < -kRadicandTolerance) {
    throw Error(ErrorKind::invalid_argument,
                "kernel distance radicand " + std::to_string(radicand) +
                    " is negative; kernel is not positive semidefinite");
  }
  return std::sqrt(std::max(radicand, 0.0));
}

std::vector<double> kernel_centroid_distances(const Matrix& k, std::span<const int> labels) {
  check_kernel_inputs(k, labels);
  const auto n = k.rows();

  double n_pos = 0.0, n_neg = 0.0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw Error(ErrorKind::missing_class,
                std::string("kernel scoring needs both classes; the ") +
                    (n_pos == 0.0 ? "positive" : "negative") + " class has no samples");
  }

  // Row sums restricted to each class: sum_{l in c} K(r, l).
  Vector row_pos = Vector::Zero(n), row_neg = Vector::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index l = 0; l < n; ++l) {
      (labels[static_cast<std::size_t>(l)] == 1 ? row_pos : row_neg)(r) += k(r, l);
    }
  }
  double block_pos = 0.0, block_neg = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (labels[static_cast<std::size_t>(r)] == 1) block_pos += row_pos(r);
    else block_neg += row_neg(r);
  }
  const double mean_pos = block_pos / (n_pos * n_pos);
  const double mean_neg = block_neg / (n_neg * n_neg);

  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const bool pos = labels[static_cast<std::size_t>(r)] == 1;
    const double radicand = pos ? k(r, r) + mean_pos - 2.0 * row_pos(r) / n_pos
                                : k(r, r) + mean_neg - 2.0 * row_neg(r) / n_neg;
    const double scale = 1.0 + std::abs(k(r, r));
    if (radicand < -1e-9 * scale) {
      throw Error(ErrorKind::invalid_argument,
                  "centroid distance radicand " + std::to_string(radicand) +
                      " is negative; kernel is not positive semidefinite");
    }
    dist[static_cast<std::size_t>(r)] = std::sqrt(std::max(radicand, 0.0));
  }
  return dist;
}

KernelRadii kernel_class_radii(const Matrix& k, std::span<const int> labels) {
  const auto dist = kernel_centroid_distances(k, labels);
  KernelRadii radii;
  for (std::size_t r = 0; r < dist.size(); ++r) {
    double& radius = labels[r] == 1 ? radii.radius_pos : radii.radius_neg;
    radius = std::max(radius, dist[r]);
  }
  return radii;
}

std::vector<double> kernel_membership(const Matrix& k, std::span<const int> labels,
                                      const KernelRadii& radii, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "delta must be positive");
  }
  auto theta = kernel_centroid_distances(k, labels);
  for (std::size_t r = 0; r < theta.size(); ++r) {
    const double radius = labels[r] == 1 ? radii.radius_pos : radii.radius_neg;
    theta[r] = 1.0 - theta[r] / (radius + delta);
  }
  return theta;
}

double median_kernel_distance(const Matrix& k) {
  std::vector<double> d;
  const auto n = k.rows();
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index l = r + 1; l < n; ++l) d.push_back(kernel_distance(k(r, r), k(l, l), k(r, l)));
  if (d.empty()) return 0.0;
  const auto mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  if (d.size() % 2 == 1) return d[mid];
  const double upper = d[mid];
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double resolve_epsilon(const Matrix& k, const EpsilonPolicy& policy) {
  if (policy.kind == EpsilonPolicy::Kind::fixed) {
    if (!(policy.value >= 0.0)) {
      throw Error(ErrorKind::invalid_argument, "epsilon must be non-negative");
    }
    return policy.value;
  }
  return median_kernel_distance(k);
}

std::vector<double> hetero_ratio(const Matrix& k, std::span<const int> labels, double epsilon) {
  check_kernel_inputs(k, labels);
  const auto n = k.rows();
  std::vector<double> ratio(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    int in_ball = 0, hetero = 0;
    const int yr = labels[static_cast<std::size_t>(r)];
    for (Eigen::Index l = 0; l < n; ++l) {
      const double d = l == r ? 0.0 : kernel_distance(k(r, r), k(l, l), k(r, l));
      if (d <= epsilon) {
        ++in_ball;
        if (labels[static_cast<std::size_t>(l)] != yr) ++hetero;
      }
    }
    ratio[static_cast<std::size_t>(r)] = static_cast<double>(hetero) / in_ball;
  }
  return ratio;
}

std::vector<double> non_membership(std::span<const double> membership,
                                   std::span<const double> ratio) {
  if (membership.size() != ratio.size()) {
    throw Error(ErrorKind::dimension_mismatch, "non_membership: length mismatch");
  }
  std::vector<double> out(membership.size());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = (1.0 - membership[r]) * ratio[r];
  return out;
}

double if_score(double theta, double theta_tilde) {
  const bool in_range = theta >= 0.0 && theta <= 1.0 && theta_tilde >= 0.0 && theta_tilde <= 1.0;
  if (!in_range || theta + theta_tilde > 1.0 + kScoreSlack) {
    throw Error(ErrorKind::invalid_argument,
                "if_score needs theta, theta~ in [0,1] with theta + theta~ <= 1 (got " +
                    std::to_string(theta) + ", " + std::to_string(theta_tilde) + ")");
  }
  if (theta_tilde == 0.0) return theta;
  if (theta <= theta_tilde) return 0.0;
  return (1.0 - theta_tilde) / (2.0 - theta - theta_tilde);
}

IFScoreResult if_score_from_kernel(const Matrix& k, std::span<const int> labels, double delta,
                                   const EpsilonPolicy& epsilon) {
  IFScoreResult result;
  const KernelRadii radii = kernel_class_radii(k, labels);
  auto& b = result.breakdown;
  b.membership = kernel_membership(k, labels, radii, delta);
  result.epsilon = resolve_epsilon(k, epsilon);
  b.hetero_ratio = hetero_ratio(k, labels, result.epsilon);
  b.non_membership = non_membership(b.membership, b.hetero_ratio);
  b.score.resize(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    b.score[r] = if_score(b.membership[r], b.non_membership[r]);
  }
  result.weights = DiagonalWeights(b.score);
  return result;
}

IFScoreResult if_score_vector(const Matrix& x, std::span<const int> labels,
                              const KernelParams& params) {
  params.validate();
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw Error(ErrorKind::dimension_mismatch,
                "if_score_vector: " + std::to_string(x.rows()) + " samples but " +
                    std::to_string(labels.size()) + " labels");
  }
  require_finite(x, "features");
  return if_score_from_kernel(gaussian_kernel(x, x, params.mu), labels, params.delta,
                              params.epsilon);
}

}  // namespace ifbls
