#pragma once

#include <Eigen/Dense>

#include "annokn/data_model.hpp"

namespace annokn {

/// Cholesky succeeds and every pivot exceeds `min_pivot` times the largest
/// diagonal entry. Plain LLT accepts rounding-level pivots on singular
/// matrices, so the threshold is what separates "PD" from "PSD".
bool is_positive_definite(const Matrix& a, double min_pivot = 1e-10);

double min_eigenvalue(const Matrix& symmetric);

/// Factor C with C^T C = A for a symmetric PSD matrix A, via an
/// eigendecomposition. Eigenvalues in [-tolerance, 0) are clamped to zero;
/// anything more negative throws NotPositiveDefinite.
class PsdFactor {
 public:
  PsdFactor() = default;
  explicit PsdFactor(const Matrix& a, double tolerance = 1e-8);

  /// k x k, C^T C = A.
  const Matrix& factor() const noexcept { return factor_; }
  Eigen::Index size() const noexcept { return factor_.rows(); }

  /// One draw from N(0, A) given standard normal `e`: C^T e.
  Vector apply(const Vector& e) const { return factor_.transpose() * e; }

 private:
  Matrix factor_;
};

}  // namespace annokn
