#pragma once

#include <cstdint>
#include <vector>

#include "annokn/pipeline.hpp"

namespace annokn {

/// Individual-level inputs with the Gram matrices every fit needs. The fold
/// partition is a seeded permutation fixed at construction, so CV errors are
/// comparable across lambda0 values and across methods sharing one instance.
class IndividualData {
 public:
  /// `xx` is n x 2p ([X, X_tilde]); `y` is the standardized response.
  IndividualData(const Vector& y, const Matrix& xx, Eigen::Index p, int folds, std::uint64_t seed);

  const LassoProblem& full() const noexcept { return full_; }
  const LassoProblem& train(int fold) const { return train_.at(static_cast<std::size_t>(fold)); }
  /// Mean squared error of `beta` on the rows of `fold`.
  double validation_error(int fold, const Vector& beta) const;

  Eigen::Index n() const noexcept { return y_.size(); }
  Eigen::Index p() const noexcept { return full_.p(); }
  int folds() const noexcept { return static_cast<int>(train_.size()); }
  /// Fold label of every row.
  const std::vector<int>& fold_of() const noexcept { return fold_of_; }

 private:
  Vector y_;
  LassoProblem full_;
  std::vector<LassoProblem> train_;
  std::vector<Matrix> valid_x_;
  std::vector<Vector> valid_y_;
  std::vector<int> fold_of_;
};

/// Mean held-out error over the folds of `data` at fixed phi. `warm` (one
/// vector per fold, optional) seeds and receives the fold solutions.
double cross_validate(const IndividualData& data, const Vector& phi, double lambda0,
                      const SolverOptions& options = {}, std::vector<Vector>* warm = nullptr);

/// Stand-alone form: builds the fold partition from `seed` and evaluates.
double cross_validate(const Vector& y, const Matrix& xx, const Vector& phi, double lambda0, int folds,
                      std::uint64_t seed, const SolverOptions& options = {});

/// Full algorithm: alternation at every lambda0 of the grid, CV with the
/// learned phi held fixed, final fit at the CV minimizer.
PipelineResult annokn_fit(const IndividualData& data, const AnnotationMatrix& a, const PipelineConfig& config);
PipelineResult annokn_fit(const Vector& y, const Matrix& x, const Matrix& x_knock, const AnnotationMatrix& a,
                          const PipelineConfig& config);

/// Lite variant: lambda0 by CV with phi = 1, one alternation at that value,
/// lambda0 re-tuned by CV with the final phi, final fit. With no annotation
/// columns this is the cross-validated lasso knockoff baseline.
PipelineResult annokn_lite_fit(const IndividualData& data, const AnnotationMatrix& a,
                               const PipelineConfig& config);
PipelineResult annokn_lite_fit(const Vector& y, const Matrix& x, const Matrix& x_knock,
                               const AnnotationMatrix& a, const PipelineConfig& config);

/// Plain cross-validated lasso knockoffs (phi = 1 throughout).
PipelineResult knockoff_lasso_fit(const IndividualData& data, const PipelineConfig& config);

}  // namespace annokn
