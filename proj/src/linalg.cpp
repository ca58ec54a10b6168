#include "annokn/linalg.hpp"

#include <string>

#include "annokn/error.hpp"

namespace annokn {

bool is_positive_definite(const Matrix& a, double min_pivot) {
  if (a.rows() == 0) return true;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  const Matrix& l = llt.matrixLLT();
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  return l.diagonal().cwiseAbs2().minCoeff() > min_pivot * scale;
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

PsdFactor::PsdFactor(const Matrix& a, double tolerance) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) throw NotPositiveDefinite("eigendecomposition failed");
  Vector values = es.eigenvalues();
  if (values.size() > 0 && values(0) < -tolerance) {
    throw NotPositiveDefinite("matrix has eigenvalue " + std::to_string(values(0)) +
                              " below the clamping tolerance");
  }
  values = values.cwiseMax(0.0);
  factor_ = values.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace annokn
