#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ifbls {

/// Dense row-major matrix of doubles. Rows are samples throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Per-sample weights forming the diagonal of the score matrix. Every value
/// lies in [0, 1].
class DiagonalWeights {
 public:
  DiagonalWeights() = default;
  explicit DiagonalWeights(std::vector<double> values);

  static DiagonalWeights ones(std::size_t n);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Throws Error(non_finite_input) naming `what` if any entry is NaN or Inf.
void require_finite(const Matrix& m, std::string_view what);

/// W = (G' S^2 G + I/C)^-1 G' S^2 T, via Cholesky of the F x F system.
Matrix solve_weighted_ridge_primal(const Matrix& g, const DiagonalWeights& s,
                                   const Matrix& t, double c_reg);

/// W = G' (I/C + S^2 G G')^-1 S^2 T, via pivoted LU of the N x N system.
/// Same minimizer as the primal form; cheaper when G is wider than tall.
Matrix solve_weighted_ridge_dual(const Matrix& g, const DiagonalWeights& s,
                                 const Matrix& t, double c_reg);

/// (C/2) ||S (G W - T)||^2 + (1/2) ||W||^2
double weighted_ridge_objective(const Matrix& g, const DiagonalWeights& s,
                                const Matrix& t, const Matrix& w, double c_reg);

/// Entry (i, j) is the squared Euclidean distance between row i of `a` and
/// row j of `b`. Identical rows give exactly zero.
Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b);

}  // namespace ifbls
