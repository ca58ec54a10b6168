#pragma once

#include <vector>

#include "annokn/data_model.hpp"

namespace annokn {

struct SolverOptions {
  /// Stop when the largest coefficient change in a full sweep falls below this.
  double tol = 1e-7;
  int max_sweeps = 10000;
};

/// Penalized quadratic in covariance form:
///
///   1/2 b^T G b - b^T c + offset + lambda0 * sum_j phi_j * sum_k |b_{j + k p}|
///
/// with k over the (M+1) blocks. Individual-level data use G = XX^T XX / n and
/// c = XX^T y / n (offset y^T y / 2n); summary statistics use G = Sigma_M and
/// c = Z_M / sqrt(n).
class LassoProblem {
 public:
  LassoProblem() = default;
  LassoProblem(Matrix gram, Vector linear, Eigen::Index p, double offset = 0.0);

  /// `xx` is n x (M+1)p, e.g. [X, X_tilde].
  static LassoProblem individual(const Vector& y, const Matrix& xx, Eigen::Index p);
  static LassoProblem summary(const Vector& zm, const Matrix& sigma_m, double n, Eigen::Index p);

  const Matrix& gram() const noexcept { return gram_; }
  const Vector& linear() const noexcept { return linear_; }
  Eigen::Index p() const noexcept { return p_; }
  Eigen::Index dim() const noexcept { return linear_.size(); }
  double offset() const noexcept { return offset_; }

 private:
  Matrix gram_;
  Vector linear_;
  Eigen::Index p_ = 0;
  double offset_ = 0.0;
};

struct FitResult {
  Vector beta;
  double objective = 0.0;
  /// Sweeps performed (full and active-set sweeps both count).
  int iterations = 0;
  bool converged = false;
  /// Objective after every sweep.
  std::vector<double> sweep_objectives;
};

double lasso_objective(const LassoProblem& problem, const Vector& beta, const Vector& phi, double lambda0);

/// Largest KKT violation at `beta`: for active coordinates
/// |grad_j + lambda0 phi_j sign(b_j)|, for inactive max(0, |grad_j| - lambda0 phi_j).
double kkt_violation(const LassoProblem& problem, const Vector& beta, const Vector& phi, double lambda0);

/// Smallest lambda0 with an all-zero solution: max_j |c_j| / phi_{j mod p}.
double lambda_max(const LassoProblem& problem, const Vector& phi);

/// Cyclic coordinate descent (ascending order) with an active-set inner
/// loop. Throws NonFiniteObjective if an update is not finite.
FitResult solve_lasso(const LassoProblem& problem, const Vector& phi, double lambda0,
                      const Vector* warm_start = nullptr, const SolverOptions& options = {});

FitResult fit_individual(const Vector& y, const Matrix& xx, const Vector& phi, double lambda0,
                         const SolverOptions& options = {});
FitResult fit_individual(const Vector& y, const StandardizedMatrix& xx, const Vector& phi, double lambda0,
                         const SolverOptions& options = {});

FitResult fit_summary(const Vector& zm, const Matrix& sigma_m, double n, const Vector& phi, double lambda0,
                      const SolverOptions& options = {});

/// Ridge solution (G + kappa I)^{-1} c with kappa = scale * trace(G) / dim.
/// Stands in for OLS when the Gram matrix may be singular.
Vector ridge_start(const LassoProblem& problem, double scale = 1e-3);

}  // namespace annokn
