#include "ifbls/fuzzy_scores.hpp"

#include "ifbls/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ifbls {

void require_signed_labels(std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw Error(ErrorKind::invalid_argument,
                  "fuzzy scoring is binary: label " + std::to_string(i) + " is " +
                      std::to_string(labels[i]) + ", expected +1 or -1");
    }
  }
}

ClassGeometry class_geometry(const Matrix& x, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw Error(ErrorKind::dimension_mismatch,
                "class_geometry: " + std::to_string(x.rows()) + " samples but " +
                    std::to_string(labels.size()) + " labels");
  }
  require_signed_labels(labels);

  ClassGeometry geom;
  geom.center_pos = Vector::Zero(x.cols());
  geom.center_neg = Vector::Zero(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (labels[static_cast<std::size_t>(r)] == 1) {
      geom.center_pos += x.row(r).transpose();
      ++geom.n_pos;
    } else {
      geom.center_neg += x.row(r).transpose();
      ++geom.n_neg;
    }
  }
  if (geom.n_pos == 0 || geom.n_neg == 0) {
    throw Error(ErrorKind::missing_class,
                std::string("fuzzy scoring needs both classes; the ") +
                    (geom.n_pos == 0 ? "positive" : "negative") + " class has no samples");
  }
  geom.center_pos /= geom.n_pos;
  geom.center_neg /= geom.n_neg;

  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const bool pos = labels[static_cast<std::size_t>(r)] == 1;
    const double d = (x.row(r).transpose() - (pos ? geom.center_pos : geom.center_neg)).norm();
    double& radius = pos ? geom.radius_pos : geom.radius_neg;
    radius = std::max(radius, d);
  }
  return geom;
}

double fuzzy_membership(const Eigen::Ref<const Vector>& x, int label, const ClassGeometry& geom,
                        double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "delta must be positive");
  }
  const bool pos = label == 1;
  const double d = (x - (pos ? geom.center_pos : geom.center_neg)).norm();
  const double radius = pos ? geom.radius_pos : geom.radius_neg;
  return 1.0 - d / (radius + delta);
}

DiagonalWeights fuzzy_score_vector(const Matrix& x, std::span<const int> labels, double delta) {
  const ClassGeometry geom = class_geometry(x, labels);
  std::vector<double> scores(labels.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    scores[i] = fuzzy_membership(x.row(r).transpose(), labels[i], geom, delta);
  }
  return DiagonalWeights(std::move(scores));
}

}  // namespace ifbls
