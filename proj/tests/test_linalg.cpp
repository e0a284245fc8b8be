#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "race/linalg.hpp"
#include "race/rng.hpp"

using race::Mat;
using race::Vec;

namespace {

Mat random_mat(race::Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

double rel_frobenius(const Mat& a, const Mat& b) {
  double denom = b.norm();
  return (a - b).norm() / (denom > 0 ? denom : 1.0);
}

double ridge_loss(const Mat& H, const Mat& T, const Mat& beta, double ridge) {
  return (T - H * beta).squaredNorm() + ridge * beta.squaredNorm();
}

}  // namespace

TEST_CASE("gram_schmidt leaves an orthonormal set untouched") {
  Mat cols = Mat::Zero(3, 2);
  cols(0, 0) = 1.0;
  cols(1, 1) = 1.0;
  Mat q = race::gram_schmidt(cols);
  CHECK((q - cols).norm() == doctest::Approx(0.0));
}

TEST_CASE("gram_schmidt hand case in the plane") {
  Mat cols(2, 2);
  cols << 1, 1, 0, 1;  // columns (1,0) and (1,1)
  Mat q = race::gram_schmidt(cols);
  CHECK(q(0, 0) == doctest::Approx(1.0));
  CHECK(q(1, 0) == doctest::Approx(0.0));
  CHECK(q(0, 1) == doctest::Approx(0.0));
  CHECK(q(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("gram_schmidt output is orthonormal for random inputs") {
  race::Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    int l = 2 + static_cast<int>(rng.index(40));
    int k = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(std::min(l, 8))));
    Mat q = race::gram_schmidt(random_mat(rng, l, k));
    Mat gram = q.transpose() * q;
    CHECK((gram - Mat::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gram_schmidt keeps column i in the span of inputs 1..i") {
  race::Rng rng(7);
  Mat cols = random_mat(rng, 6, 3);
  Mat q = race::gram_schmidt(cols);
  // third orthonormal column must be orthogonal to nothing outside span(c1..c3);
  // check it is a combination of the first three inputs via least squares residual
  Eigen::MatrixXd basis = cols.leftCols(3);
  Vec fitted = basis * basis.colPivHouseholderQr().solve(Vec(q.col(2)));
  CHECK((fitted - q.col(2)).norm() < 1e-10);
}

TEST_CASE("collapsed column without a redraw source is an error") {
  Mat cols(3, 2);
  cols << 1, 2, 1, 2, 0, 0;  // second column is twice the first
  CHECK_THROWS_AS(race::gram_schmidt(cols), race::DegeneracyError);
}

TEST_CASE("collapsed column is redrawn when a source is supplied") {
  Mat cols(3, 2);
  cols << 1, 2, 1, 2, 0, 0;
  race::Rng rng(3);
  auto regen = [&](int) {
    Vec v(3);
    for (int i = 0; i < 3; ++i) v(i) = rng.uniform(-1.0, 1.0);
    return v;
  };
  Mat q = race::gram_schmidt(cols, regen);
  CHECK((q.transpose() * q - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("more columns than rows is a dimension error") {
  CHECK_THROWS_AS(race::gram_schmidt(Mat::Ones(2, 3)), race::DimensionError);
}

TEST_CASE("identity design returns the targets as decoder") {
  race::Rng rng(5);
  Mat T = random_mat(rng, 4, 6);
  auto s = race::batch_least_squares(Mat::Identity(4, 4), T, 0.0);
  CHECK(rel_frobenius(s.beta, T) < 1e-12);
  CHECK(s.seen == 4);
}

TEST_CASE("scaled identity design solves by hand") {
  auto s = race::batch_least_squares(2.0 * Mat::Identity(2, 2), Mat::Identity(2, 2), 0.0);
  CHECK((s.K - 0.25 * Mat::Identity(2, 2)).norm() < 1e-12);
  CHECK((s.beta - 0.5 * Mat::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("rank-deficient design without ridge is a singular-matrix error") {
  CHECK_THROWS_AS(race::batch_least_squares(Mat::Zero(3, 2), Mat::Ones(3, 4), 0.0),
                  race::SingularMatrixError);
}

TEST_CASE("zero update leaves the state untouched") {
  race::Rng rng(11);
  auto s = race::batch_least_squares(random_mat(rng, 10, 3), random_mat(rng, 10, 5));
  Mat k0 = s.K, b0 = s.beta;
  race::rls_update(s, Mat::Zero(4, 3), Mat::Zero(4, 5));
  CHECK((s.K - k0).norm() < 1e-14);
  CHECK((s.beta - b0).norm() < 1e-14);
  CHECK(s.seen == 14);
}

TEST_CASE("recursive updates match the one-shot solve") {
  race::Rng rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    int q = 5 + static_cast<int>(rng.index(46));
    int k = 2 + static_cast<int>(rng.index(7));
    int l = 3 + static_cast<int>(rng.index(18));
    Mat H = random_mat(rng, q, k);
    Mat T = random_mat(rng, q, l);

    int first = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(q)));
    auto s = race::batch_least_squares(H.topRows(first), T.topRows(first));
    int at = first;
    while (at < q) {
      int step = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(q - at)));
      race::rls_update(s, H.middleRows(at, step), T.middleRows(at, step));
      at += step;
    }
    auto oneshot = race::batch_least_squares(H, T);
    CHECK(rel_frobenius(s.beta, oneshot.beta) < 1e-8);
    CHECK(s.seen == q);
  }
}

TEST_CASE("zero residual batches leave the decoder fixed") {
  race::Rng rng(13);
  auto s = race::batch_least_squares(random_mat(rng, 8, 3), random_mat(rng, 8, 4));
  Mat b0 = s.beta;
  for (int t = 0; t < 5; ++t) {
    Mat H = random_mat(rng, 6, 3);
    race::rls_update(s, H, Mat(H * b0));
    CHECK((s.beta - b0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("K stays symmetric across a long update sequence") {
  race::Rng rng(17);
  auto s = race::batch_least_squares(random_mat(rng, 5, 4), random_mat(rng, 5, 6));
  for (int t = 0; t < 120; ++t) {
    race::rls_update(s, random_mat(rng, 3, 4), random_mat(rng, 3, 6));
    CHECK((s.K - s.K.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("perturbing the decoder never lowers the ridge loss") {
  race::Rng rng(19);
  const double ridge = 1e-6;
  Mat H = random_mat(rng, 12, 3);
  Mat T = random_mat(rng, 12, 5);
  auto s = race::batch_least_squares(H.topRows(7), T.topRows(7), ridge);
  race::rls_update(s, H.bottomRows(5), T.bottomRows(5));

  double base = ridge_loss(H, T, s.beta, ridge);
  for (int trial = 0; trial < 200; ++trial) {
    Mat delta = random_mat(rng, 3, 5);
    delta *= 1e-3 / delta.norm();
    CHECK(ridge_loss(H, T, Mat(s.beta + delta), ridge) >= base - 1e-12);
  }
}

TEST_CASE("non-finite inputs are rejected") {
  race::Rng rng(23);
  auto s = race::batch_least_squares(random_mat(rng, 6, 2), random_mat(rng, 6, 3));
  Mat bad = Mat::Ones(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(race::rls_update(s, bad, Mat::Ones(2, 3)), race::Error);
  CHECK_THROWS_AS(race::batch_least_squares(bad, Mat::Ones(2, 3)), race::Error);
}
