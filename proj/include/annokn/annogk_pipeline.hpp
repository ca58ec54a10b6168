#pragma once

#include <cstdint>

#include "annokn/knockoff_gen.hpp"
#include "annokn/linalg.hpp"
#include "annokn/pipeline.hpp"

namespace annokn {

/// Train / validation z-scores derived from one full-sample z-vector.
struct PseudoSplit {
  Vector z_train;
  Vector z_valid;
  double n_train = 0;
  double n_valid = 0;
};

/// With n_t = round(frac_train n), n_v = n - n_t and e ~ N(0, sigma_m):
///   z_t = sqrt(n_t/n) z + sqrt(n_v/n) e
///   z_v = sqrt(n_v/n) z - sqrt(n_t/n) e
/// For z ~ N(mu, sigma_m) the pieces are independent, each with covariance
/// sigma_m, and z_t has mean sqrt(n_t/n) mu.
PseudoSplit make_pseudo_split(const Vector& zm, const Matrix& sigma_m, double n, double frac_train,
                              std::uint64_t seed);
/// Same, reusing a factor of sigma_m.
PseudoSplit make_pseudo_split(const Vector& zm, const PsdFactor& factor, double n, double frac_train,
                              std::uint64_t seed);

/// beta^T z_valid / sqrt(n_valid) - beta^T sigma_m beta / 2. Higher is better.
double pseudo_validation_score(const Vector& beta, const Vector& z_valid, const Matrix& sigma_m,
                               double n_valid);

/// Summary-statistics pipeline: equicorrelated knockoff z-scores (seeded by
/// config.seed), lambda0 picked by mean pseudo-validation score over
/// config.pseudo_splits splits, final alternation on the full z-vector.
PipelineResult annogk_fit(const SummaryStats& z, const LdMatrix& ld, const AnnotationMatrix& a,
                          const PipelineConfig& config);

/// Same after knockoff generation: `zm` = (z, z_tilde), `sigma_m` its 2p x 2p
/// covariance. `factor` optionally supplies a precomputed factor of sigma_m.
PipelineResult annogk_fit_prepared(const Vector& zm, const Matrix& sigma_m, double n, const AnnotationMatrix& a,
                                   const PipelineConfig& config, const PsdFactor* factor = nullptr);

}  // namespace annokn
