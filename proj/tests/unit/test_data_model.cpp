#include <doctest.h>

#include <cmath>

#include "annokn/data_model.hpp"
#include "annokn/error.hpp"
#include "support.hpp"

using namespace annokn;

namespace {

void check_standardized(const Matrix& m) {
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).sum() / n;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) ss += (m(i, j) - mean) * (m(i, j) - mean);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(std::sqrt(ss / (n - 1)) - 1.0) < 1e-8);
  }
}

}  // namespace

TEST_CASE("standardize a three point column") {
  Matrix raw(3, 1);
  raw << 1, 2, 3;
  const auto s = standardize(raw);
  CHECK(s.values()(0, 0) == doctest::Approx(-1.0));
  CHECK(s.values()(1, 0) == doctest::Approx(0.0));
  CHECK(s.values()(2, 0) == doctest::Approx(1.0));
  CHECK(s.col_means()(0) == doctest::Approx(2.0));
  CHECK(s.col_scales()(0) == doctest::Approx(1.0));
}

TEST_CASE("standardize random matrix and recover the original") {
  Matrix raw = test::random_matrix(1, 50, 5);
  raw.col(2) = raw.col(2) * 7.0 + Vector::Constant(50, 3.0);
  const auto s = standardize(raw);
  check_standardized(s.values());
  CHECK((s.col_scales().array() > 0).all());
  CHECK((s.original() - raw).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("standardize is idempotent") {
  const auto once = standardize(test::random_matrix(2, 40, 4));
  const auto twice = standardize(once.values());
  CHECK((twice.values() - once.values()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((twice.col_scales().array() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK(twice.col_means().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("standardize errors") {
  Matrix raw = test::random_matrix(3, 10, 3);
  raw.col(1).setConstant(4.2);
  try {
    standardize(raw);
    FAIL("expected ZeroVarianceColumn");
  } catch (const ZeroVarianceColumn& e) {
    CHECK(e.column() == 1);
  }
  raw(0, 1) = std::nan("");
  CHECK_THROWS_AS(standardize(raw), NonFiniteInput);
  CHECK_THROWS_AS(standardize(Matrix::Ones(1, 2)), DimensionMismatch);
}

TEST_CASE("annotation matrix standardization and names") {
  Matrix raw(6, 2);
  raw << 1, 0, 2, 0, 3, 1, 4, 1, 5, 0, 6, 1;
  const auto a = AnnotationMatrix::from_raw(raw);
  CHECK(a.names() == std::vector<std::string>{"anno1", "anno2"});
  for (Eigen::Index l = 0; l < 2; ++l) CHECK(std::abs(a.values().col(l).sum()) < 1e-8);
  check_standardized(a.values());

  Matrix constant = raw;
  constant.col(1).setOnes();
  try {
    AnnotationMatrix::from_raw(constant, {"dist", "coding"});
    FAIL("expected ZeroVarianceColumn");
  } catch (const ZeroVarianceColumn& e) {
    CHECK(std::string(e.what()).find("coding") != std::string::npos);
  }
  CHECK(AnnotationMatrix::empty(7).rows() == 7);
  CHECK(AnnotationMatrix::empty(7).cols() == 0);
  CHECK(a.select_columns(1, 1).names() == std::vector<std::string>{"anno2"});
}

TEST_CASE("summary stats validation") {
  SummaryStats s{{"a", "b"}, Vector::Ones(2), 100};
  CHECK_NOTHROW(s.validate());
  s.snp_ids = {"a", "a"};
  CHECK_THROWS_AS(s.validate(), DuplicateSnpId);
  s.snp_ids = {"a", "b"};
  s.n = 1;
  CHECK_THROWS_AS(s.validate(), NonFiniteInput);
  s.n = 10;
  s.z(1) = INFINITY;
  CHECK_THROWS_AS(s.validate(), NonFiniteInput);
}

TEST_CASE("LD identity and shrinkage") {
  const auto ld = LdMatrix::from_correlation(Matrix::Identity(4, 4), 0.0);
  CHECK(ld.sigma().isApprox(Matrix::Identity(4, 4)));

  // duplicated column: singular correlation
  Matrix x = test::random_matrix(4, 200, 3);
  Matrix dup(200, 4);
  dup << x, x.col(0);
  const Matrix sigma = sample_correlation(dup);
  CHECK_THROWS_AS(LdMatrix::from_correlation(sigma, 0.0), NotPositiveDefinite);
  const auto shrunk = LdMatrix::from_correlation(sigma, 0.05);
  CHECK(shrunk.regularization() == 0.05);
  CHECK((shrunk.sigma().diagonal().array() - 1.0).abs().maxCoeff() < 1e-8);
  CHECK((shrunk.sigma() - shrunk.sigma().transpose()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(shrunk.sigma().llt().info() == Eigen::Success);

  CHECK_THROWS_AS(LdMatrix::from_correlation(sigma, 1.0), ConfigError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(LdMatrix::from_correlation(asym, 0.0), NotPositiveDefinite);
}

TEST_CASE("shrinkage of at least 0.01 always yields a Cholesky factor") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    // rank-deficient correlation from fewer rows than columns
    const Matrix sigma = sample_correlation(test::random_matrix(seed, 6, 12));
    for (double eps : {0.01, 0.1, 0.5}) {
      CHECK_NOTHROW(LdMatrix::from_correlation(sigma, eps));
    }
  }
}
