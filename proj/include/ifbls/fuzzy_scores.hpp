#pragma once

#include "ifbls/linalg.hpp"

#include <span>

namespace ifbls {

/// Default for the small positive constant added to class radii.
inline constexpr double kDefaultDelta = 1e-4;

/// Centers and radii of the two classes in input space.
struct ClassGeometry {
  Vector center_pos;
  Vector center_neg;
  double radius_pos = 0.0;
  double radius_neg = 0.0;
  int n_pos = 0;
  int n_neg = 0;
};

/// Labels must be +1 or -1; throws Error(invalid_argument) otherwise.
void require_signed_labels(std::span<const int> labels);

ClassGeometry class_geometry(const Matrix& x, std::span<const int> labels);

/// 1 - ||x - C_class|| / (R_class + delta)
double fuzzy_membership(const Eigen::Ref<const Vector>& x, int label, const ClassGeometry& geom,
                        double delta);

DiagonalWeights fuzzy_score_vector(const Matrix& x, std::span<const int> labels,
                                   double delta = kDefaultDelta);

}  // namespace ifbls
