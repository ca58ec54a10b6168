#include "annokn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "annokn/error.hpp"

namespace annokn {

void PipelineConfig::validate() const {
  if (!lambda0_grid.empty()) {
    for (std::size_t i = 0; i < lambda0_grid.size(); ++i) {
      if (!(lambda0_grid[i] > 0.0)) throw ConfigError("lambda0_grid", "values must be positive");
      if (i > 0 && !(lambda0_grid[i] < lambda0_grid[i - 1])) {
        throw ConfigError("lambda0_grid", "values must be strictly descending");
      }
    }
  } else {
    if (grid_size < 1) throw ConfigError("grid_size", "must be >= 1");
    if (!(grid_min_ratio > 0.0 && grid_min_ratio <= 1.0)) throw ConfigError("grid_min_ratio", "must lie in (0, 1]");
  }
  if (cv_folds < 2) throw ConfigError("cv_folds", "must be >= 2");
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw ConfigError("tau2", "must be positive");
  if (!std::isfinite(d)) throw ConfigError("d", "must be finite");
  if (max_outer_iter < 1) throw ConfigError("max_outer_iter", "must be >= 1");
  if (!(outer_tol > 0.0)) throw ConfigError("outer_tol", "must be positive");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("q", "must lie in (0, 1)");
  if (!(frac_train > 0.0 && frac_train < 1.0)) throw ConfigError("frac_train", "must lie in (0, 1)");
  if (pseudo_splits < 1) throw ConfigError("pseudo_splits", "must be >= 1");
  if (!(solver.tol > 0.0) || solver.max_sweeps < 1) throw ConfigError("solver", "invalid tolerance or sweep cap");
}

double PipelineConfig::resolved_d(double n) const {
  if (d > 0.0) return d;
  return std::sqrt(std::max(n, 1.0) / 10.0);
}

std::vector<double> make_lambda_grid(double lambda_max, const PipelineConfig& config) {
  if (!config.lambda0_grid.empty()) return config.lambda0_grid;
  if (!(lambda_max > 0.0)) throw DegenerateCV("lambda_max is zero: the response carries no linear signal");
  std::vector<double> grid(static_cast<std::size_t>(config.grid_size));
  if (config.grid_size == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double log_ratio = std::log(config.grid_min_ratio);
  for (int i = 0; i < config.grid_size; ++i) {
    grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(log_ratio * i / (config.grid_size - 1));
  }
  return grid;
}

double log_posterior(const LassoProblem& problem, double n, const Vector& beta, const PenaltyState& state) {
  const double blocks = static_cast<double>(problem.dim() / problem.p());
  const double log_phi_sum = state.phi.array().log().sum();
  return -n * lasso_objective(problem, beta, state.phi, state.lambda0) + blocks * log_phi_sum -
         state.lambda_anno.squaredNorm() / (2.0 * state.tau2);
}

AlternatingFit alternate(const LassoProblem& problem, double n, const Matrix& annotations, double lambda0,
                         const Vector& beta_start, const PipelineConfig& config, double d) {
  const Eigen::Index p = problem.p();
  const Eigen::Index l = annotations.cols();
  AlternatingFit out;
  out.penalty = PenaltyState::initial(p, l, d, config.tau2, lambda0);
  Vector beta = beta_start;
  out.trace.push_back(log_posterior(problem, n, beta, out.penalty));

  for (int it = 0; it < config.max_outer_iter; ++it) {
    out.fit = solve_lasso(problem, out.penalty.phi, lambda0, &beta, config.solver);
    const PenaltyState updated = maximize_lambda(out.penalty, beta_abs_sums(out.fit.beta, p), annotations, n);
    const double d_beta = (out.fit.beta - beta).lpNorm<Eigen::Infinity>();
    const double d_lambda = l > 0 ? (updated.lambda_anno - out.penalty.lambda_anno).lpNorm<Eigen::Infinity>() : 0.0;
    beta = out.fit.beta;
    out.penalty = updated;
    out.iterations = it + 1;

    const double value = log_posterior(problem, n, beta, out.penalty);
    const double previous = out.trace.back();
    if (value < previous - 1e-6 * std::max(1.0, std::abs(previous))) {
      throw std::logic_error("alternating maximization decreased the log posterior: " + std::to_string(previous) +
                             " -> " + std::to_string(value));
    }
    out.trace.push_back(value);
    if (d_beta < config.outer_tol && d_lambda < config.outer_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace annokn
