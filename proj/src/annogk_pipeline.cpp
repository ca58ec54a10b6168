#include "annokn/annogk_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "annokn/error.hpp"
#include "annokn/parallel.hpp"
#include "annokn/rng.hpp"

namespace annokn {

PseudoSplit make_pseudo_split(const Vector& zm, const PsdFactor& factor, double n, double frac_train,
                              std::uint64_t seed) {
  if (!(frac_train > 0.0 && frac_train < 1.0)) throw ConfigError("frac_train", "must lie in (0, 1)");
  if (factor.size() != zm.size()) {
    throw DimensionMismatch("pseudo split covariance vs z-scores", static_cast<std::size_t>(zm.size()),
                            static_cast<std::size_t>(factor.size()));
  }
  PseudoSplit out;
  out.n_train = std::round(frac_train * n);
  out.n_valid = n - out.n_train;
  if (out.n_train < 1 || out.n_valid < 1) throw DegenerateCV("pseudo split leaves an empty training or validation set");

  Rng rng(seed);
  const Vector e = factor.apply(standard_normal(rng, zm.size()));
  const double at = std::sqrt(out.n_train / n);
  const double av = std::sqrt(out.n_valid / n);
  out.z_train = at * zm + av * e;
  out.z_valid = av * zm - at * e;
  return out;
}

PseudoSplit make_pseudo_split(const Vector& zm, const Matrix& sigma_m, double n, double frac_train,
                              std::uint64_t seed) {
  return make_pseudo_split(zm, PsdFactor(sigma_m), n, frac_train, seed);
}

double pseudo_validation_score(const Vector& beta, const Vector& z_valid, const Matrix& sigma_m,
                               double n_valid) {
  return beta.dot(z_valid) / std::sqrt(n_valid) - 0.5 * beta.dot(sigma_m * beta);
}

PipelineResult annogk_fit_prepared(const Vector& zm, const Matrix& sigma_m, double n, const AnnotationMatrix& a,
                                   const PipelineConfig& config, const PsdFactor* factor) {
  config.validate();
  if (sigma_m.rows() != zm.size() || sigma_m.cols() != zm.size()) {
    throw DimensionMismatch("knockoff covariance vs z-scores", static_cast<std::size_t>(zm.size()),
                            static_cast<std::size_t>(sigma_m.rows()));
  }
  if (zm.size() % 2 != 0 || a.rows() != zm.size() / 2) {
    throw DimensionMismatch("annotation rows vs covariates", static_cast<std::size_t>(zm.size() / 2),
                            static_cast<std::size_t>(a.rows()));
  }
  const Eigen::Index p = zm.size() / 2;
  const LassoProblem full = LassoProblem::summary(zm, sigma_m, n, p);
  // one scale for the splits and the final fit
  const double d = config.resolved_d(n);

  PsdFactor owned;
  if (!factor) {
    owned = PsdFactor(sigma_m);
    factor = &owned;
  }
  const auto splits = static_cast<std::size_t>(config.pseudo_splits);
  std::vector<PseudoSplit> pieces;
  std::vector<LassoProblem> problems;
  for (std::size_t s = 0; s < splits; ++s) {
    pieces.push_back(make_pseudo_split(zm, *factor, n, config.frac_train, derive_seed(config.seed, 0x5b17 + s)));
    problems.push_back(LassoProblem::summary(pieces.back().z_train, sigma_m, pieces.back().n_train, p));
  }

  PipelineResult result;
  result.lambda0_grid = make_lambda_grid(lambda_max(full, Vector::Ones(p)), config);
  const std::size_t g = result.lambda0_grid.size();
  const Vector zero = Vector::Zero(zm.size());
  std::vector<double> scores(g * splits);
  parallel_for(g * splits, config.threads, [&](std::size_t task) {
    const std::size_t i = task / splits;
    const std::size_t s = task % splits;
    const AlternatingFit alt =
        alternate(problems[s], pieces[s].n_train, a.values(), result.lambda0_grid[i], zero, config, d);
    scores[task] = pseudo_validation_score(alt.fit.beta, pieces[s].z_valid, sigma_m, pieces[s].n_valid);
  });
  result.cv_errors.assign(g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t s = 0; s < splits; ++s) result.cv_errors[i] += scores[i * splits + s];
    result.cv_errors[i] /= static_cast<double>(splits);
  }
  result.chosen_index = static_cast<std::size_t>(
      std::max_element(result.cv_errors.begin(), result.cv_errors.end()) - result.cv_errors.begin());

  AlternatingFit alt = alternate(full, n, a.values(), result.lambda0_grid[result.chosen_index], zero, config, d);
  result.fit = std::move(alt.fit);
  result.penalty = alt.penalty;
  result.trace = std::move(alt.trace);
  result.outer_iterations = alt.iterations;
  result.outer_converged = alt.converged;
  result.stats = lcd_stats(result.fit, p);
  result.selection = knockoff_threshold(result.stats, config.q);
  return result;
}

PipelineResult annogk_fit(const SummaryStats& z, const LdMatrix& ld, const AnnotationMatrix& a,
                          const PipelineConfig& config) {
  z.validate();
  if (ld.size() != z.size()) {
    throw DimensionMismatch("LD matrix size vs z-scores", static_cast<std::size_t>(z.size()),
                            static_cast<std::size_t>(ld.size()));
  }
  const KnockoffModel model = KnockoffModel::equicorrelated(ld.sigma());
  const Vector zm = sample_knockoff_zscores(z.z, model, derive_seed(config.seed, 0x6b6e));
  const Matrix sigma_m = build_sigma_m(ld.sigma(), model.d_diag());
  return annogk_fit_prepared(zm, sigma_m, z.n, a, config);
}

}  // namespace annokn
