#include "annokn/data_model.hpp"

#include <cmath>
#include <unordered_set>

#include "annokn/error.hpp"
#include "annokn/linalg.hpp"

namespace annokn {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NonFiniteInput(std::string(what) + " contains non-finite values");
}

// Centers and scales in place; returns (means, scales).
std::pair<Vector, Vector> standardize_columns(Matrix& m, const std::vector<std::string>& names) {
  const Eigen::Index n = m.rows();
  if (n < 2) throw DimensionMismatch("standardize needs at least 2 rows", 2, static_cast<std::size_t>(n));
  Vector means = m.colwise().mean().transpose();
  Vector scales(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    m.col(j).array() -= means(j);
    const double ss = m.col(j).squaredNorm();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // relative test: a column of identical values leaves only rounding noise
    const double ref = std::abs(means(j)) + 1.0;
    if (!(sd > 1e-12 * ref)) {
      throw ZeroVarianceColumn(static_cast<std::size_t>(j),
                               j < static_cast<Eigen::Index>(names.size()) ? names[j] : std::string{});
    }
    m.col(j) /= sd;
    scales(j) = sd;
  }
  return {std::move(means), std::move(scales)};
}

}  // namespace

StandardizedMatrix StandardizedMatrix::from_raw(const Matrix& raw, std::vector<std::string> names) {
  require_finite(raw, "matrix");
  StandardizedMatrix out;
  out.values_ = raw;
  auto [means, scales] = standardize_columns(out.values_, names);
  out.col_means_ = std::move(means);
  out.col_scales_ = std::move(scales);
  out.names_ = std::move(names);
  return out;
}

Matrix StandardizedMatrix::original() const {
  Matrix out = values_ * col_scales_.asDiagonal();
  out.rowwise() += col_means_.transpose();
  return out;
}

StandardizedMatrix standardize(const Matrix& raw) { return StandardizedMatrix::from_raw(raw); }

Vector standardize_vector(const Vector& raw) {
  Matrix m = raw;
  require_finite(m, "vector");
  standardize_columns(m, {"response"});
  return m.col(0);
}

AnnotationMatrix AnnotationMatrix::from_raw(const Matrix& raw, std::vector<std::string> names) {
  require_finite(raw, "annotation matrix");
  AnnotationMatrix out;
  out.values_ = raw;
  if (raw.cols() > 0) standardize_columns(out.values_, names);
  if (names.empty()) {
    for (Eigen::Index l = 0; l < raw.cols(); ++l) names.push_back("anno" + std::to_string(l + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != raw.cols()) {
    throw DimensionMismatch("annotation names vs columns", static_cast<std::size_t>(raw.cols()),
                            names.size());
  }
  out.names_ = std::move(names);
  return out;
}

AnnotationMatrix AnnotationMatrix::empty(Eigen::Index p) {
  AnnotationMatrix out;
  out.values_ = Matrix(p, 0);
  return out;
}

AnnotationMatrix AnnotationMatrix::select_columns(Eigen::Index first, Eigen::Index count) const {
  AnnotationMatrix out;
  out.values_ = values_.middleCols(first, count);
  out.names_.assign(names_.begin() + first, names_.begin() + first + count);
  return out;
}

void SummaryStats::validate() const {
  if (!(n >= 2)) throw NonFiniteInput("sample size n must be >= 2");
  if (!z.allFinite()) throw NonFiniteInput("z-scores contain non-finite values");
  if (static_cast<Eigen::Index>(snp_ids.size()) != z.size()) {
    throw DimensionMismatch("snp ids vs z-scores", snp_ids.size(), static_cast<std::size_t>(z.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : snp_ids) {
    if (!seen.insert(id).second) throw DuplicateSnpId(id);
  }
}

LdMatrix LdMatrix::from_correlation(const Matrix& sigma, double shrinkage) {
  if (sigma.rows() != sigma.cols()) {
    throw DimensionMismatch("LD matrix must be square", static_cast<std::size_t>(sigma.rows()),
                            static_cast<std::size_t>(sigma.cols()));
  }
  if (!(shrinkage >= 0.0 && shrinkage < 1.0)) throw ConfigError("shrinkage", "must lie in [0, 1)");
  require_finite(sigma, "LD matrix");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (sigma.size() > 0 && asym > 1e-10) throw NotPositiveDefinite("LD matrix is not symmetric");

  Matrix shrunk = (1.0 - shrinkage) * sigma;
  shrunk.diagonal().array() += shrinkage;
  const Vector diag = shrunk.diagonal();
  if ((diag.array() <= 0.0).any()) throw NotPositiveDefinite("LD matrix has a non-positive diagonal");
  const Vector inv_sqrt = diag.cwiseSqrt().cwiseInverse();
  shrunk = inv_sqrt.asDiagonal() * shrunk * inv_sqrt.asDiagonal();
  shrunk = 0.5 * (shrunk + shrunk.transpose());
  shrunk.diagonal().setOnes();

  if (!is_positive_definite(shrunk)) {
    throw NotPositiveDefinite("Cholesky of the LD matrix failed (shrinkage " + std::to_string(shrinkage) + ")");
  }
  LdMatrix out;
  out.sigma_ = std::move(shrunk);
  out.regularization_ = shrinkage;
  return out;
}

Matrix sample_correlation(const Matrix& x) {
  Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix lower = Matrix::Zero(x.cols(), x.cols());
  lower.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  const Matrix cov = lower.selfadjointView<Eigen::Lower>();
  const Vector inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
  Matrix corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  corr = 0.5 * (corr + corr.transpose()).eval();
  corr.diagonal().setOnes();
  return corr;
}

}  // namespace annokn
