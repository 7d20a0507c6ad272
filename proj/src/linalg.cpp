#include "ifbls/linalg.hpp"

#include "ifbls/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ifbls {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_ridge_inputs(const Matrix& g, const DiagonalWeights& s, const Matrix& t,
                        double c_reg) {
  if (g.rows() != t.rows() || static_cast<Eigen::Index>(s.size()) != g.rows()) {
    throw Error(ErrorKind::dimension_mismatch,
                "weighted ridge: G is " + shape(g) + ", T is " + shape(t) +
                    ", S has " + std::to_string(s.size()) + " entries");
  }
  if (!(c_reg > 0.0) || !std::isfinite(c_reg)) {
    throw Error(ErrorKind::invalid_argument,
                "weighted ridge: C must be positive and finite, got " + std::to_string(c_reg));
  }
  require_finite(g, "G");
  require_finite(t, "T");
}

Vector squared_weights(const DiagonalWeights& s) {
  Vector s2(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) s2(static_cast<Eigen::Index>(i)) = s[i] * s[i];
  return s2;
}

}  // namespace

DiagonalWeights::DiagonalWeights(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "score weight " + std::to_string(i) + " = " + std::to_string(v) +
                      " is outside [0, 1]");
    }
  }
}

DiagonalWeights DiagonalWeights::ones(std::size_t n) {
  return DiagonalWeights(std::vector<double>(n, 1.0));
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::non_finite_input,
                std::string(what) + " contains NaN or infinite entries");
  }
}

Matrix solve_weighted_ridge_primal(const Matrix& g, const DiagonalWeights& s,
                                   const Matrix& t, double c_reg) {
  check_ridge_inputs(g, s, t, c_reg);
  const Vector s2 = squared_weights(s);

  // G' S^2, formed once and reused for both sides.
  const Matrix gts2 = g.transpose() * s2.asDiagonal();
  Matrix system = gts2 * g;
  system.diagonal().array() += 1.0 / c_reg;
  const Matrix rhs = gts2 * t;

  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::factorization_failed,
                "Cholesky of G'S^2G + I/C (" + shape(system) + ") failed: matrix is not "
                "numerically positive definite");
  }
  Matrix w = llt.solve(rhs);
  require_finite(w, "primal solution");
  return w;
}

Matrix solve_weighted_ridge_dual(const Matrix& g, const DiagonalWeights& s,
                                 const Matrix& t, double c_reg) {
  check_ridge_inputs(g, s, t, c_reg);
  const Vector s2 = squared_weights(s);

  Matrix system = s2.asDiagonal() * (g * g.transpose());
  system.diagonal().array() += 1.0 / c_reg;
  const Matrix rhs = s2.asDiagonal() * t;

  Eigen::PartialPivLU<Matrix> lu(system);
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = system.cwiseAbs().maxCoeff();
  const double floor = scale * static_cast<double>(system.rows()) *
                       std::numeric_limits<double>::epsilon();
  if (!pivots.allFinite() || pivots.minCoeff() <= floor) {
    throw Error(ErrorKind::factorization_failed,
                "LU of I/C + S^2GG' (" + shape(system) + ") failed: matrix is singular");
  }
  Matrix w = g.transpose() * lu.solve(rhs);
  require_finite(w, "dual solution");
  return w;
}

double weighted_ridge_objective(const Matrix& g, const DiagonalWeights& s,
                                const Matrix& t, const Matrix& w, double c_reg) {
  if (g.cols() != w.rows() || t.cols() != w.cols()) {
    throw Error(ErrorKind::dimension_mismatch,
                "objective: W is " + shape(w) + " for G " + shape(g) + ", T " + shape(t));
  }
  check_ridge_inputs(g, s, t, c_reg);
  const Vector sv = Eigen::Map<const Vector>(s.values().data(), static_cast<Eigen::Index>(s.size()));
  const Matrix residual = sv.asDiagonal() * (g * w - t);
  return 0.5 * c_reg * residual.squaredNorm() + 0.5 * w.squaredNorm();
}

Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::dimension_mismatch,
                "pairwise_sq_dist: " + shape(a) + " vs " + shape(b));
  }
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    }
  }
  return out;
}

}  // namespace ifbls
