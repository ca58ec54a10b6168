#include "annokn/annokn_pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "annokn/error.hpp"
#include "annokn/parallel.hpp"
#include "annokn/rng.hpp"

namespace annokn {

namespace {

std::vector<int> assign_folds(Eigen::Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw DegenerateCV("cv_folds must be >= 2");
  if (n < 2 * static_cast<Eigen::Index>(folds)) {
    throw DegenerateCV("each of the " + std::to_string(folds) + " folds needs at least 2 samples, n = " +
                       std::to_string(n));
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0xcf01d5));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(i % folds);
  return fold_of;
}

void check_shapes(const Vector& y, const Matrix& x, const Matrix& x_knock, const AnnotationMatrix& a) {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("design rows vs response length", static_cast<std::size_t>(y.size()),
                            static_cast<std::size_t>(x.rows()));
  }
  if (x_knock.rows() != x.rows() || x_knock.cols() != x.cols()) {
    throw DimensionMismatch("knockoff columns vs design columns", static_cast<std::size_t>(x.cols()),
                            static_cast<std::size_t>(x_knock.cols()));
  }
  if (a.rows() != x.cols()) {
    throw DimensionMismatch("annotation rows vs covariates", static_cast<std::size_t>(x.cols()),
                            static_cast<std::size_t>(a.rows()));
  }
}

void check_annotations(const IndividualData& data, const AnnotationMatrix& a) {
  if (a.rows() != data.p()) {
    throw DimensionMismatch("annotation rows vs covariates", static_cast<std::size_t>(data.p()),
                            static_cast<std::size_t>(a.rows()));
  }
}

Matrix stack(const Matrix& x, const Matrix& x_knock) {
  Matrix xx(x.rows(), x.cols() * 2);
  xx << x, x_knock;
  return xx;
}

std::size_t argmin(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

// CV error along a descending grid with per-fold warm starts.
std::vector<double> cv_path(const IndividualData& data, const Vector& phi, const std::vector<double>& grid,
                            const PipelineConfig& config) {
  const auto folds = static_cast<std::size_t>(data.folds());
  std::vector<std::vector<double>> err(folds, std::vector<double>(grid.size()));
  parallel_for(folds, config.threads, [&](std::size_t k) {
    Vector beta = Vector::Zero(data.full().dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const FitResult fit = solve_lasso(data.train(static_cast<int>(k)), phi, grid[i], &beta, config.solver);
      beta = fit.beta;
      err[k][i] = data.validation_error(static_cast<int>(k), beta);
    }
  });
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < folds; ++k) out[i] += err[k][i];
    out[i] /= static_cast<double>(folds);
  }
  return out;
}

PipelineResult finish(const IndividualData& data, PipelineResult result, const Vector& warm,
                      const PipelineConfig& config) {
  const double lambda0 = result.lambda0_grid[result.chosen_index];
  result.penalty.lambda0 = lambda0;
  result.fit = solve_lasso(data.full(), result.penalty.phi, lambda0, &warm, config.solver);
  result.stats = lcd_stats(result.fit, data.p());
  result.selection = knockoff_threshold(result.stats, config.q);
  return result;
}

}  // namespace

IndividualData::IndividualData(const Vector& y, const Matrix& xx, Eigen::Index p, int folds, std::uint64_t seed)
    : y_(y), fold_of_(assign_folds(y.size(), folds, seed)) {
  if (xx.rows() != y.size()) {
    throw DimensionMismatch("design rows vs response length", static_cast<std::size_t>(y.size()),
                            static_cast<std::size_t>(xx.rows()));
  }
  const Eigen::Index n = y.size();
  const Eigen::Index dim = xx.cols();

  Matrix gram = Matrix::Zero(dim, dim);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xx.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Vector xty = xx.transpose() * y;
  const double yty = y.squaredNorm();
  full_ = LassoProblem(gram / static_cast<double>(n), xty / static_cast<double>(n), p,
                       yty / (2.0 * static_cast<double>(n)));

  for (int k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i)
      if (fold_of_[static_cast<std::size_t>(i)] == k) rows.push_back(i);
    const auto nk = static_cast<Eigen::Index>(rows.size());
    Matrix xk(nk, dim);
    Vector yk(nk);
    for (Eigen::Index r = 0; r < nk; ++r) {
      xk.row(r) = xx.row(rows[static_cast<std::size_t>(r)]);
      yk(r) = y(rows[static_cast<std::size_t>(r)]);
    }
    Matrix g = gram;
    g.selfadjointView<Eigen::Lower>().rankUpdate(xk.transpose(), -1.0);
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    const auto nt = static_cast<double>(n - nk);
    train_.emplace_back(g / nt, (xty - xk.transpose() * yk) / nt, p, (yty - yk.squaredNorm()) / (2.0 * nt));
    valid_x_.push_back(std::move(xk));
    valid_y_.push_back(std::move(yk));
  }
}

double IndividualData::validation_error(int fold, const Vector& beta) const {
  const auto k = static_cast<std::size_t>(fold);
  const Matrix& xk = valid_x_.at(k);
  Vector pred = Vector::Zero(xk.rows());
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) pred.noalias() += beta(j) * xk.col(j);
  return (valid_y_[k] - pred).squaredNorm() / static_cast<double>(xk.rows());
}

double cross_validate(const IndividualData& data, const Vector& phi, double lambda0, const SolverOptions& options,
                      std::vector<Vector>* warm) {
  double total = 0.0;
  for (int k = 0; k < data.folds(); ++k) {
    const Vector* start = nullptr;
    if (warm && static_cast<int>(warm->size()) > k && (*warm)[static_cast<std::size_t>(k)].size() > 0)
      start = &(*warm)[static_cast<std::size_t>(k)];
    const FitResult fit = solve_lasso(data.train(k), phi, lambda0, start, options);
    total += data.validation_error(k, fit.beta);
    if (warm) {
      if (static_cast<int>(warm->size()) <= k) warm->resize(static_cast<std::size_t>(k) + 1);
      (*warm)[static_cast<std::size_t>(k)] = fit.beta;
    }
  }
  return total / data.folds();
}

double cross_validate(const Vector& y, const Matrix& xx, const Vector& phi, double lambda0, int folds,
                      std::uint64_t seed, const SolverOptions& options) {
  if (phi.size() == 0 || xx.cols() % phi.size() != 0) {
    throw DimensionMismatch("penalty weights vs design columns", static_cast<std::size_t>(xx.cols()),
                            static_cast<std::size_t>(phi.size()));
  }
  const IndividualData data(y, xx, phi.size(), folds, seed);
  return cross_validate(data, phi, lambda0, options);
}

PipelineResult annokn_fit(const IndividualData& data, const AnnotationMatrix& a, const PipelineConfig& config) {
  config.validate();
  check_annotations(data, a);
  const Eigen::Index p = data.p();
  const double n = static_cast<double>(data.n());
  const Vector ones = Vector::Ones(p);

  PipelineResult result;
  result.lambda0_grid = make_lambda_grid(lambda_max(data.full(), ones), config);
  const std::size_t g = result.lambda0_grid.size();
  const Vector ridge = ridge_start(data.full(), config.ridge_scale);

  std::vector<AlternatingFit> fits(g);
  result.cv_errors.assign(g, 0.0);
  parallel_for(g, config.threads, [&](std::size_t i) {
    fits[i] = alternate(data.full(), n, a.values(), result.lambda0_grid[i], ridge, config, config.resolved_d(n));
    // folds start from the full-data solution; phi stays fixed
    std::vector<Vector> warm(static_cast<std::size_t>(data.folds()), fits[i].fit.beta);
    result.cv_errors[i] = cross_validate(data, fits[i].penalty.phi, result.lambda0_grid[i], config.solver, &warm);
  });

  result.chosen_index = argmin(result.cv_errors);
  AlternatingFit& best = fits[result.chosen_index];
  result.penalty = best.penalty;
  result.trace = std::move(best.trace);
  result.outer_iterations = best.iterations;
  result.outer_converged = best.converged;
  return finish(data, std::move(result), best.fit.beta, config);
}

PipelineResult annokn_fit(const Vector& y, const Matrix& x, const Matrix& x_knock, const AnnotationMatrix& a,
                          const PipelineConfig& config) {
  check_shapes(y, x, x_knock, a);
  const IndividualData data(y, stack(x, x_knock), x.cols(), config.cv_folds, config.seed);
  return annokn_fit(data, a, config);
}

PipelineResult annokn_lite_fit(const IndividualData& data, const AnnotationMatrix& a,
                               const PipelineConfig& config) {
  config.validate();
  check_annotations(data, a);
  const Eigen::Index p = data.p();
  const double n = static_cast<double>(data.n());
  const Vector ones = Vector::Ones(p);

  PipelineResult result;
  result.lambda0_grid = make_lambda_grid(lambda_max(data.full(), ones), config);
  result.cv_errors = cv_path(data, ones, result.lambda0_grid, config);
  result.chosen_index = argmin(result.cv_errors);
  result.penalty = PenaltyState::initial(p, a.cols(), config.resolved_d(n), config.tau2,
                                         result.lambda0_grid[result.chosen_index]);
  Vector warm = Vector::Zero(data.full().dim());
  if (a.cols() == 0) return finish(data, std::move(result), warm, config);

  const Vector ridge = ridge_start(data.full(), config.ridge_scale);
  AlternatingFit alt = alternate(data.full(), n, a.values(), result.lambda0_grid[result.chosen_index], ridge,
                                 config, config.resolved_d(n));
  result.penalty = alt.penalty;
  result.trace = std::move(alt.trace);
  result.outer_iterations = alt.iterations;
  result.outer_converged = alt.converged;

  // re-tune on a grid scaled to the learned weights
  if (config.lambda0_grid.empty()) result.lambda0_grid = make_lambda_grid(lambda_max(data.full(), alt.penalty.phi), config);
  result.cv_errors = cv_path(data, alt.penalty.phi, result.lambda0_grid, config);
  result.chosen_index = argmin(result.cv_errors);
  return finish(data, std::move(result), alt.fit.beta, config);
}

PipelineResult annokn_lite_fit(const Vector& y, const Matrix& x, const Matrix& x_knock,
                               const AnnotationMatrix& a, const PipelineConfig& config) {
  check_shapes(y, x, x_knock, a);
  const IndividualData data(y, stack(x, x_knock), x.cols(), config.cv_folds, config.seed);
  return annokn_lite_fit(data, a, config);
}

PipelineResult knockoff_lasso_fit(const IndividualData& data, const PipelineConfig& config) {
  return annokn_lite_fit(data, AnnotationMatrix::empty(data.p()), config);
}

}  // namespace annokn
