#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "annokn/error.hpp"
#include "annokn/knockoff_gen.hpp"
#include "annokn/linalg.hpp"
#include "support.hpp"

using namespace annokn;

namespace {

double min_eig(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double objective(const Vector& s) { return (Vector::Ones(s.size()) - s).cwiseAbs().sum(); }

Matrix cross_corr(const Matrix& a, const Matrix& b) {
  return a.transpose() * b / static_cast<double>(a.rows() - 1);
}

}  // namespace

TEST_CASE("equicorrelated D") {
  CHECK(solve_d_equicorrelated(Matrix::Identity(4, 4)) == Vector::Ones(4));

  const Matrix s3 = test::ar1(3, 0.5);
  const double lmin = min_eig(s3);
  const Vector s = solve_d_equicorrelated(s3);
  CHECK((s.array() - 2.0 * lmin).abs().maxCoeff() < 1e-12);
  CHECK(min_eig(2.0 * s3 - Matrix(s.asDiagonal())) > -1e-8);

  // lambda_min = 0.6 so 2 * 0.6 caps at 1
  const Matrix s2 = test::ar1(2, 0.4);
  CHECK(min_eig(s2) == doctest::Approx(0.6));
  CHECK(solve_d_equicorrelated(s2) == Vector::Ones(2));

  Matrix singular = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(solve_d_equicorrelated(singular), NotPositiveDefinite);
}

TEST_CASE("coordinate D dominates the equicorrelated start") {
  CHECK(solve_d_coordinate(Matrix::Identity(3, 3)) == Vector::Ones(3));

  const Matrix s2 = test::ar1(2, 0.5);
  const Vector eq = solve_d_equicorrelated(s2);
  const Vector s = solve_d_coordinate(s2);
  CHECK(min_eig(2.0 * s2 - Matrix(s.asDiagonal())) > -1e-8);
  CHECK(objective(s) <= objective(eq) + 1e-12);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix sigma = sample_correlation(test::random_matrix(seed, 40, 8));
    const Vector e = solve_d_equicorrelated(sigma);
    const Vector c = solve_d_coordinate(sigma);
    CHECK((c - e).minCoeff() >= -1e-12);
    CHECK(min_eig(2.0 * sigma - Matrix(c.asDiagonal())) > -1e-8);
    CHECK(objective(c) <= objective(e) + 1e-12);
  }
}

TEST_CASE("model validation") {
  const Matrix sigma = test::ar1(3, 0.5);
  CHECK_THROWS_AS(KnockoffModel::build(sigma, Vector::Constant(3, 1.5)), NotPositiveDefinite);
  CHECK_THROWS_AS(KnockoffModel::build(sigma, Vector::Constant(3, -0.1)), NotPositiveDefinite);
  const auto model = KnockoffModel::equicorrelated(sigma);
  const Matrix d = model.d_diag().asDiagonal();
  const Matrix v = 2.0 * d - d * sigma.llt().solve(d);
  const Matrix& c = model.conditional_cov_factor();
  CHECK((c.transpose() * c - v).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((model.conditional_mean_map() - (Matrix::Identity(3, 3) - sigma.llt().solve(d))).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("identity model gives independent knockoffs") {
  const auto x = standardize(test::random_matrix(20, 100, 5));
  const auto model = KnockoffModel::build(Matrix::Identity(5, 5), Vector::Ones(5));
  const auto xk = sample_knockoffs(x, model, 7);
  // single entries have sd about 0.1 at n = 100
  const Matrix cc = cross_corr(x.values(), xk.values());
  CHECK(cc.cwiseAbs().mean() < 0.2);
  CHECK(cc.cwiseAbs().maxCoeff() < 0.4);

  double signed_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    signed_sum += cross_corr(x.values(), sample_knockoffs(x, model, seed).values()).diagonal().mean();
  }
  CHECK(std::abs(signed_sum / 50.0) < 0.05);
}

TEST_CASE("knockoff sampling is deterministic") {
  const auto x = standardize(test::random_matrix(21, 50, 4));
  const auto model = KnockoffModel::equicorrelated(sample_correlation(x.values()));
  const auto a = sample_knockoffs(x, model, 99);
  const auto b = sample_knockoffs(x, model, 99);
  CHECK(a.values() == b.values());
  CHECK(sample_knockoffs(x, model, 100).values() != a.values());
  const Vector z = test::random_vector(3, 4);
  CHECK(sample_knockoff_zscores(z, model, 5) == sample_knockoff_zscores(z, model, 5));
}

TEST_CASE("sampled knockoffs match the target cross covariance") {
  const Eigen::Index p = 10;
  const Matrix sigma = test::ar1(p, 0.5);
  const Matrix x_raw = test::random_matrix(30, 5000, p) * Eigen::LLT<Matrix>(sigma).matrixU();
  const auto x = standardize(x_raw);
  const auto model = KnockoffModel::equicorrelated(sigma);
  const auto xk = sample_knockoffs(x, model, 31);

  const Matrix target_cross = sigma - Matrix(model.d_diag().asDiagonal());
  CHECK((cross_corr(x.values(), xk.values()) - target_cross).cwiseAbs().maxCoeff() < 0.05);

  Matrix joint(x.rows(), 2 * p);
  joint << x.values(), xk.values();
  const Matrix gram = joint.transpose() * joint / static_cast<double>(x.rows());
  CHECK((gram - build_sigma_m(sigma, model.d_diag())).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("knockoff z-scores") {
  const Vector z = test::random_vector(40, 4);
  const auto identity = KnockoffModel::build(Matrix::Identity(4, 4), Vector::Ones(4));
  const Vector zm = sample_knockoff_zscores(z, identity, 41);
  REQUIRE(zm.size() == 8);
  CHECK(zm.head(4) == z);
  // conditional mean is zero, so z_tilde carries no information about z
  CHECK(sample_knockoff_zscores(Vector::Zero(4), identity, 41).tail(4) == zm.tail(4));

  const Eigen::Index p = 5;
  const Matrix sigma = test::ar1(p, 0.6);
  const auto model = KnockoffModel::equicorrelated(sigma);
  const Matrix target = build_sigma_m(sigma, model.d_diag());
  const Matrix chol_u = Eigen::LLT<Matrix>(sigma).matrixU();
  Rng rng(44);
  Matrix acc = Matrix::Zero(2 * p, 2 * p);
  const int draws = 5000;
  for (int i = 0; i < draws; ++i) {
    const Vector null_z = chol_u.transpose() * standard_normal(rng, p);
    const Vector joint = sample_knockoff_zscores(null_z, model, derive_seed(43, i));
    acc += joint * joint.transpose();
  }
  CHECK((acc / draws - target).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sigma_m block layout") {
  const Matrix id = build_sigma_m(Matrix::Identity(3, 3), Vector::Ones(3));
  CHECK(id == Matrix::Identity(6, 6));

  const Matrix sigma = test::ar1(2, 0.5);
  const Vector s = Vector::Constant(2, 0.8);
  const Matrix m2 = build_sigma_m(sigma, s, 2);
  REQUIRE(m2.rows() == 6);
  const Matrix off = sigma - Matrix(s.asDiagonal());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(m2.block(2 * a, 2 * b, 2, 2) == (a == b ? sigma : off));
  // The M-block structure has eigenvalues (M+1)(sigma - D) + D and D, so
  // s = 0.8 exceeds the feasible bound 1.5 * lambda_min = 0.75.
  CHECK(min_eig(m2) == doctest::Approx(3.0 * 0.5 - 2.0 * 0.8));
  CHECK(min_eig(build_sigma_m(sigma, Vector::Constant(2, 0.75), 2)) > -1e-8);
  CHECK(min_eig(build_sigma_m(sigma, solve_d_equicorrelated(sigma, 2), 2)) > -1e-8);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix generic = sample_correlation(test::random_matrix(50 + seed, 30, 7));
    const Matrix sm = build_sigma_m(generic, solve_d_equicorrelated(generic));
    CHECK((sm - sm.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(min_eig(sm) >= -1e-8);
  }
}
