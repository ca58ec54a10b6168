#pragma once

#include <cstdint>
#include <vector>

#include "annokn/adaptive_lasso.hpp"
#include "annokn/anno_weights.hpp"
#include "annokn/data_model.hpp"
#include "annokn/knockoff_filter.hpp"

namespace annokn {

struct PipelineConfig {
  /// Explicit lambda0 candidates (positive, descending). Empty means
  /// `grid_size` log-spaced points from lambda_max down to
  /// grid_min_ratio * lambda_max.
  std::vector<double> lambda0_grid;
  int grid_size = 20;
  double grid_min_ratio = 0.01;
  int cv_folds = 5;
  /// Annotation scale; <= 0 selects sqrt(n / 10) for sample size n.
  double d = 0.0;
  double tau2 = 1.0;
  int max_outer_iter = 50;
  double outer_tol = 1e-4;
  std::uint64_t seed = 1;
  /// Target FDR for the reported selection.
  double q = 0.1;
  int threads = 1;
  SolverOptions solver;
  /// Ridge penalty scale for the starting coefficients.
  double ridge_scale = 1e-3;
  /// Pseudo-summary tuning (summary statistics only).
  double frac_train = 0.8;
  int pseudo_splits = 5;

  /// Throws ConfigError naming the first bad key.
  void validate() const;
  /// The lambda update balances |lambda| against tau2 * n * lambda0 / d, so a
  /// scale growing like sqrt(n) keeps the spread of phi comparable across
  /// sample sizes.
  double resolved_d(double n) const;
};

/// Descending candidate grid for a problem whose all-zero threshold is
/// `lambda_max`.
std::vector<double> make_lambda_grid(double lambda_max, const PipelineConfig& config);

struct PipelineResult {
  FitResult fit;
  PenaltyState penalty;
  FeatureStats stats;
  SelectionResult selection;
  std::vector<double> lambda0_grid;
  /// Individual data: CV error per grid point (lower is better).
  /// Summary data: mean pseudo-validation score per grid point (higher is better).
  std::vector<double> cv_errors;
  std::size_t chosen_index = 0;
  /// Log posterior after each outer iteration of the chosen alternating fit.
  std::vector<double> trace;
  int outer_iterations = 0;
  bool outer_converged = false;
};

/// Output of the beta / lambda alternation at a fixed lambda0.
struct AlternatingFit {
  FitResult fit;
  PenaltyState penalty;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Log posterior up to a constant: -n * objective(beta) + (M+1) sum log phi
/// - |lambda|^2 / (2 tau2).
double log_posterior(const LassoProblem& problem, double n, const Vector& beta, const PenaltyState& state);

/// Alternates lasso fits and lambda updates until max|d beta| and
/// max|d lambda| fall below config.outer_tol or config.max_outer_iter
/// iterations. The log posterior trace is checked for ascent (relative
/// tolerance 1e-6) after every iteration; a violation throws. `d` is the
/// annotation scale (see PipelineConfig::resolved_d).
AlternatingFit alternate(const LassoProblem& problem, double n, const Matrix& annotations, double lambda0,
                         const Vector& beta_start, const PipelineConfig& config, double d);

}  // namespace annokn
