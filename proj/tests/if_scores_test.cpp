#include "ifbls/error.hpp"
#include "ifbls/fuzzy_scores.hpp"
#include "ifbls/if_scores.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace ifbls;
using ifbls::test::random_matrix;

namespace {

Matrix linear_kernel(const Matrix& x) { return x * x.transpose(); }

std::vector<int> random_signed_labels(std::mt19937_64& gen, int n) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    y[static_cast<std::size_t>(i)] = i == 0 ? 1 : i == 1 ? -1 : (gen() & 1 ? 1 : -1);
  return y;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("gaussian_kernel") {
  Matrix a(1, 2), b(1, 2);
  a << 0, 0;
  b << 0.6, 0.8;
  CHECK(gaussian_kernel(a, a, 1.0)(0, 0) == 1.0);
  CHECK(gaussian_kernel(a, b, 1.0)(0, 0) == doctest::Approx(0.36787944117144233).epsilon(1e-14));

  std::mt19937_64 gen(41);
  const Matrix x = random_matrix(gen, 4, 3), y = random_matrix(gen, 5, 3);
  const Matrix k = gaussian_kernel(x, y, 0.7);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) {
      double d2 = 0;
      for (int c = 0; c < 3; ++c) d2 += (x(i, c) - y(j, c)) * (x(i, c) - y(j, c));
      CHECK(std::abs(k(i, j) - std::exp(-d2 / 0.49)) < 1e-12);
    }
  CHECK_THROWS_AS(gaussian_kernel(x, y, 0.0), Error);
}

TEST_CASE("kernel_distance") {
  CHECK(kernel_distance(1, 1, 1) == 0.0);
  CHECK(kernel_distance(1, 1, 0.3) == doctest::Approx(std::sqrt(2 - 0.6)));
  CHECK(kernel_distance(1, 1, 1 + 4e-13) == 0.0);
  CHECK_THROWS_AS(kernel_distance(1, 1, 1.1), Error);

  Vector a(3), b(3);
  a << 1, -2, 0.5;
  b << -0.3, 4, 2;
  CHECK(std::abs(kernel_distance(a.dot(a), b.dot(b), a.dot(b)) - (a - b).norm()) < 1e-12);
}

TEST_CASE("kernel_class_radii small cases") {
  SUBCASE("single positive sample") {
    Matrix x(3, 1);
    x << 0, 1, 2;
    const auto r = kernel_class_radii(gaussian_kernel(x, x, 1.0), std::vector<int>{1, -1, -1});
    CHECK(r.radius_pos == 0.0);
  }
  SUBCASE("two positive samples") {
    Matrix x(3, 1);
    x << 0, 0.5, 5;
    const Matrix k = gaussian_kernel(x, x, 1.0);
    const double kk = k(0, 1);
    const auto r = kernel_class_radii(k, std::vector<int>{1, 1, -1});
    CHECK(r.radius_pos == doctest::Approx(std::sqrt(2 - 2 * kk) / 2).epsilon(1e-12));
  }
  SUBCASE("empty class") {
    Matrix x(2, 1);
    x << 0, 1;
    CHECK_THROWS_AS(kernel_class_radii(gaussian_kernel(x, x, 1.0), std::vector<int>{1, 1}), Error);
  }
}

TEST_CASE("kernel membership") {
  SUBCASE("single-member class scores one") {
    Matrix x(3, 2);
    x << 0, 0, 3, 1, 2, 2;
    const Matrix k = gaussian_kernel(x, x, 1.0);
    const std::vector<int> y{1, -1, -1};
    const auto theta = kernel_membership(k, y, kernel_class_radii(k, y), 1e-4);
    CHECK(theta[0] == 1.0);
  }
  SUBCASE("sample attaining the class radius") {
    Matrix x(4, 1);
    x << 0, 1, 3, 9;
    const Matrix k = gaussian_kernel(x, x, 2.0);
    const std::vector<int> y{1, 1, 1, -1};
    const auto radii = kernel_class_radii(k, y);
    const auto dist = kernel_centroid_distances(k, y);
    const auto far = static_cast<std::size_t>(
        std::max_element(dist.begin(), dist.begin() + 3) - dist.begin());
    const double delta = 0.01;
    const auto theta = kernel_membership(k, y, radii, delta);
    CHECK(theta[far] == doctest::Approx(delta / (radii.radius_pos + delta)).epsilon(1e-12));
  }
}

TEST_CASE("linear kernel agrees with input-space geometry") {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + trial;
    const Matrix x = random_matrix(gen, n, 1 + trial % 5, -3, 3);
    const auto y = random_signed_labels(gen, n);
    const Matrix k = linear_kernel(x);
    const auto radii = kernel_class_radii(k, y);
    const ClassGeometry g = class_geometry(x, y);
    CHECK(std::abs(radii.radius_pos - g.radius_pos) < 1e-9);
    CHECK(std::abs(radii.radius_neg - g.radius_neg) < 1e-9);

    const double delta = 0.05;
    const auto theta = kernel_membership(k, y, radii, delta);
    const auto fuzzy = fuzzy_score_vector(x, y, delta);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(theta[static_cast<std::size_t>(i)] - fuzzy[static_cast<std::size_t>(i)]) < 1e-8);
  }
}

TEST_CASE("hetero_ratio") {
  SUBCASE("eps = 0 isolates every distinct point") {
    Matrix x(4, 1);
    x << 0, 1, 2, 3;
    const auto ratio = hetero_ratio(gaussian_kernel(x, x, 1.0), std::vector<int>{1, -1, 1, -1}, 0.0);
    for (double r : ratio) CHECK(r == 0.0);
  }
  SUBCASE("four-point neighbourhood with one heterogeneous member") {
    // Points 0..3 sit within 0.3 of each other; point 4 is far away.
    Matrix x(5, 1);
    x << 0, 0.1, 0.2, 0.3, 50;
    const Matrix k = gaussian_kernel(x, x, 1.0);
    const std::vector<int> y{1, 1, 1, -1, -1};
    const auto ratio = hetero_ratio(k, y, kernel_distance(1, 1, k(0, 3)));
    CHECK(ratio[0] == 0.25);
    CHECK(ratio[4] == 0.0);
  }
  SUBCASE("single class gives zero everywhere") {
    Matrix x(3, 1);
    x << 0, 1, 2;
    for (double r : hetero_ratio(gaussian_kernel(x, x, 1.0), std::vector<int>{-1, -1, -1}, 10.0))
      CHECK(r == 0.0);
  }
}

TEST_CASE("if_score branches") {
  CHECK(if_score(0.8, 0.0) == 0.8);
  CHECK(if_score(0.3, 0.4) == 0.0);
  CHECK(if_score(0.5, 0.5) == 0.0);
  CHECK(if_score(0.6, 0.2) == doctest::Approx(0.8 / 1.2).epsilon(1e-15));
  CHECK_THROWS_AS(if_score(0.7, 0.4), Error);
  CHECK_THROWS_AS(if_score(-0.1, 0.0), Error);
  CHECK_THROWS_AS(if_score(0.5, 1.1), Error);
}

TEST_CASE("if_score_vector on two separated singletons") {
  Matrix x(2, 2);
  x << 0, 0, 10, 10;
  KernelParams kp;
  kp.epsilon = EpsilonPolicy::fixed_at(0.1);
  const auto res = if_score_vector(x, std::vector<int>{1, -1}, kp);
  CHECK(res.weights[0] == 1.0);
  CHECK(res.weights[1] == 1.0);
  CHECK(res.epsilon == 0.1);
}

TEST_CASE("a mislabeled point amid the other class scores below the clean median") {
  std::mt19937_64 gen(43);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix x(20, 2);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    const double cx = i < 10 ? -2.0 : 2.0;
    x(i, 0) = cx + noise(gen);
    x(i, 1) = noise(gen);
    y[static_cast<std::size_t>(i)] = i < 10 ? 1 : -1;
  }
  y[15] = 1;  // sits in the negative cluster but is labelled positive
  KernelParams kp;
  kp.mu = 1.0;
  const auto res = if_score_vector(x, y, kp);
  CHECK(res.breakdown.hetero_ratio[15] > 0.5);
  std::vector<double> clean;
  for (int i = 0; i < 20; ++i)
    if (i != 15) clean.push_back(res.breakdown.score[static_cast<std::size_t>(i)]);
  CHECK(res.breakdown.score[15] < median_of(clean));
}

TEST_CASE("median epsilon heuristic") {
  Matrix x(3, 1);
  x << 0, 1, 3;
  const Matrix k = gaussian_kernel(x, x, 1.0);
  std::vector<double> d{kernel_distance(1, 1, k(0, 1)), kernel_distance(1, 1, k(0, 2)),
                        kernel_distance(1, 1, k(1, 2))};
  CHECK(median_kernel_distance(k) == median_of(d));
  CHECK(resolve_epsilon(k, EpsilonPolicy::median()) == median_of(d));
  CHECK(resolve_epsilon(k, EpsilonPolicy::fixed_at(0.25)) == 0.25);
  CHECK_THROWS_AS(resolve_epsilon(k, EpsilonPolicy::fixed_at(-1)), Error);
}

TEST_CASE("property: score invariants on random data") {
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + trial % 30;
    const Matrix x = random_matrix(gen, n, 1 + trial % 4, 0, 1);
    const auto y = random_signed_labels(gen, n);
    KernelParams kp;
    kp.mu = std::pow(2.0, trial % 7 - 3);
    const auto res = if_score_vector(x, y, kp);
    const auto& b = res.breakdown;
    for (int i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      CHECK(b.membership[r] >= 0.0);
      CHECK(b.membership[r] <= 1.0);
      CHECK(b.non_membership[r] >= 0.0);
      CHECK(b.membership[r] + b.non_membership[r] <= 1.0 + 1e-12);
      CHECK(b.score[r] >= 0.0);
      CHECK(b.score[r] <= 1.0);
    }
    const Matrix k = gaussian_kernel(x, x, kp.mu);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(kernel_distance(k(i, i), k(j, j), k(i, j)) ==
              kernel_distance(k(j, j), k(i, i), k(j, i)));
  }
}

TEST_CASE("property: scores are permutation-equivariant") {
  std::mt19937_64 gen(45);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + trial;
    const Matrix x = random_matrix(gen, n, 2, 0, 1);
    const auto y = random_signed_labels(gen, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    Matrix xp(n, 2);
    std::vector<int> yp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
      yp[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    KernelParams kp;
    kp.epsilon = EpsilonPolicy::fixed_at(0.6);
    const auto a = if_score_vector(x, y, kp);
    const auto b = if_score_vector(xp, yp, kp);
    for (int i = 0; i < n; ++i) {
      const auto r = static_cast<std::size_t>(i);
      const auto src = static_cast<std::size_t>(perm[r]);
      CHECK(std::abs(b.breakdown.membership[r] - a.breakdown.membership[src]) < 1e-12);
      CHECK(std::abs(b.breakdown.score[r] - a.breakdown.score[src]) < 1e-12);
    }
  }
}

TEST_CASE("input validation") {
  Matrix x(3, 1);
  x << 0, 1, 2;
  KernelParams kp;
  CHECK_THROWS_AS(if_score_vector(x, std::vector<int>{1, -1}, kp), Error);
  CHECK_THROWS_AS(if_score_vector(x, std::vector<int>{1, -1, 2}, kp), Error);
  kp.mu = -1;
  CHECK_THROWS_AS(if_score_vector(x, std::vector<int>{1, -1, 1}, kp), Error);
  CHECK_THROWS_AS(hetero_ratio(Matrix::Identity(2, 3), std::vector<int>{1, -1}, 0.1), Error);
}
