#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace annokn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column-standardized matrix. Each column has mean 0 and unbiased (n-1)
/// standard deviation 1; the original means and scales are kept so callers
/// can map back to input units.
class StandardizedMatrix {
 public:
  StandardizedMatrix() = default;

  /// Standardizes `raw`. Throws NonFiniteInput or ZeroVarianceColumn.
  static StandardizedMatrix from_raw(const Matrix& raw, std::vector<std::string> names = {});

  const Matrix& values() const noexcept { return values_; }
  const Vector& col_means() const noexcept { return col_means_; }
  const Vector& col_scales() const noexcept { return col_scales_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

  /// Maps standardized values back to the original units.
  Matrix original() const;

 private:
  Matrix values_;
  Vector col_means_;
  Vector col_scales_;
  std::vector<std::string> names_;
};

StandardizedMatrix standardize(const Matrix& raw);

/// Standardizes a single vector (e.g. a response) with the same convention.
Vector standardize_vector(const Vector& raw);

/// p x L annotation matrix with standardized columns (sum 0, sd 1).
/// L may be zero, meaning "no annotations".
class AnnotationMatrix {
 public:
  AnnotationMatrix() = default;

  /// Standardizes every column; a constant column raises ZeroVarianceColumn
  /// naming it.
  static AnnotationMatrix from_raw(const Matrix& raw, std::vector<std::string> names = {});
  /// p rows, zero columns.
  static AnnotationMatrix empty(Eigen::Index p);

  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

  /// Columns [first, first + count) as a new annotation matrix.
  AnnotationMatrix select_columns(Eigen::Index first, Eigen::Index count) const;

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

struct SummaryStats {
  std::vector<std::string> snp_ids;
  Vector z;
  double n = 0;

  /// Throws on n < 2, non-finite z, duplicate ids, or length mismatch.
  void validate() const;
  Eigen::Index size() const noexcept { return z.size(); }
};

/// Correlation (LD) matrix after shrinkage toward the identity.
class LdMatrix {
 public:
  LdMatrix() = default;

  /// Applies sigma' = (1 - eps) sigma + eps I, renormalizes the diagonal to
  /// one and checks symmetry and positive definiteness. Throws
  /// NotPositiveDefinite when Cholesky of sigma' fails.
  static LdMatrix from_correlation(const Matrix& sigma, double shrinkage = 0.0);

  const Matrix& sigma() const noexcept { return sigma_; }
  double regularization() const noexcept { return regularization_; }
  Eigen::Index size() const noexcept { return sigma_.rows(); }

 private:
  Matrix sigma_;
  double regularization_ = 0.0;
};

/// Sample correlation matrix of the columns of `x`.
Matrix sample_correlation(const Matrix& x);

}  // namespace annokn
