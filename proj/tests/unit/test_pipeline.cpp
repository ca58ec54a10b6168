#include <doctest.h>

#include "annokn/error.hpp"
#include "annokn/pipeline.hpp"
#include "pipeline_data.hpp"

using namespace annokn;

TEST_CASE("config validation names the key") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto expect_key = [](const PipelineConfig& c, const std::string& key) {
    try {
      c.validate();
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  PipelineConfig bad = cfg;
  bad.cv_folds = 1;
  expect_key(bad, "cv_folds");
  bad = cfg;
  bad.lambda0_grid = {0.1, 0.2};
  expect_key(bad, "lambda0_grid");
  bad = cfg;
  bad.lambda0_grid = {0.1, -0.05};
  expect_key(bad, "lambda0_grid");
  bad = cfg;
  bad.q = 1.0;
  expect_key(bad, "q");
  bad = cfg;
  bad.tau2 = 0.0;
  expect_key(bad, "tau2");
  bad = cfg;
  bad.frac_train = 1.0;
  expect_key(bad, "frac_train");
}

TEST_CASE("lambda grid") {
  PipelineConfig cfg;
  const auto grid = make_lambda_grid(2.0, cfg);
  REQUIRE(grid.size() == 20);
  CHECK(grid.front() == 2.0);
  CHECK(grid.back() == doctest::Approx(0.02));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] < grid[i - 1]);
    CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[1] / grid[0]));
  }
  cfg.lambda0_grid = {0.3, 0.1};
  CHECK(make_lambda_grid(5.0, cfg) == std::vector<double>{0.3, 0.1});
  cfg.lambda0_grid.clear();
  CHECK_THROWS_AS(make_lambda_grid(0.0, cfg), DegenerateCV);
}

TEST_CASE("annotation scale default") {
  PipelineConfig cfg;
  CHECK(cfg.resolved_d(1000) == doctest::Approx(10.0));
  CHECK(cfg.resolved_d(5000) == doctest::Approx(std::sqrt(500.0)));
  cfg.d = 2.5;
  CHECK(cfg.resolved_d(1000) == 2.5);
}

TEST_CASE("log posterior matches its definition") {
  const auto c = test::individual_case(1, 120, 15, 3, 0.4);
  const auto problem = LassoProblem::individual(c.y, c.xx, 15);
  const Matrix a = test::index_annotation(15).values();
  auto state = PenaltyState::initial(15, 1, 2.0, 1.5, 0.05);
  state.lambda_anno(0) = 0.8;
  state.phi = compute_phi(state.lambda_anno, a, 2.0);
  const Vector beta = test::random_vector(9, 30) * 0.1;
  const double direct = -0.5 * (c.y - c.xx * beta).squaredNorm() -
                        120 * 0.05 * (state.phi.array() * beta_abs_sums(beta, 15).array()).sum() +
                        2.0 * state.phi.array().log().sum() - 0.64 / 3.0;
  CHECK(log_posterior(problem, 120, beta, state) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("alternation ascends and converges") {
  const auto c = test::individual_case(2, 300, 40, 6, 0.3);
  const auto problem = LassoProblem::individual(c.y, c.xx, 40);
  const Matrix a = test::index_annotation(40).values();
  PipelineConfig cfg;
  const double lmax = lambda_max(problem, Vector::Ones(40));
  for (double ratio : {0.5, 0.2, 0.05}) {
    const auto alt = alternate(problem, 300, a, ratio * lmax, ridge_start(problem), cfg, cfg.resolved_d(300));
    REQUIRE(alt.trace.size() == static_cast<std::size_t>(alt.iterations) + 1);
    for (std::size_t k = 1; k < alt.trace.size(); ++k) {
      CHECK(alt.trace[k] >= alt.trace[k - 1] - 1e-6 * std::max(1.0, std::abs(alt.trace[k - 1])));
    }
    CHECK(alt.converged);
    CHECK(kkt_violation(problem, alt.fit.beta, alt.penalty.phi, ratio * lmax) <= 1e-6);
  }
}

TEST_CASE("no annotations means phi stays at one") {
  const auto c = test::individual_case(3, 150, 20, 3, 0.4);
  const auto problem = LassoProblem::individual(c.y, c.xx, 20);
  PipelineConfig cfg;
  const auto alt = alternate(problem, 150, Matrix(20, 0), 0.05, Vector::Zero(40), cfg, 1.0);
  CHECK(alt.penalty.phi == Vector::Ones(20));
  CHECK(alt.iterations <= 2);
  const auto direct = solve_lasso(problem, Vector::Ones(20), 0.05);
  CHECK((alt.fit.beta - direct.beta).cwiseAbs().maxCoeff() < 1e-6);
}
