#pragma once

#include "annokn/data_model.hpp"

namespace annokn {

/// Exponent clamp applied inside phi_j = exp(sum_l lambda_l A_jl / d).
inline constexpr double kPhiExponentClamp = 30.0;

struct PenaltyState {
  Vector lambda_anno;  // L
  Vector phi;          // p
  double d = 1.0;
  double tau2 = 1.0;
  double lambda0 = 0.0;

  /// lambda = 0, phi = 1.
  static PenaltyState initial(Eigen::Index p, Eigen::Index l, double d, double tau2, double lambda0);
};

/// phi_j = exp(clamp(sum_l lambda_l A_jl / d, -30, 30)).
Vector compute_phi(const Vector& lambda_anno, const Matrix& a, double d);

/// b_j = sum_k |beta_{j + k p}| over the (M+1) blocks.
Vector beta_abs_sums(const Vector& beta, Eigen::Index p);

/// -n lambda0 sum_j phi_j b_j - |lambda|^2 / (2 tau2). The (M+1) sum_j log phi_j
/// term is identically zero because the columns of A sum to zero.
double lambda_objective(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                        double d, double tau2);
Vector lambda_gradient(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                       double d, double tau2);
Matrix lambda_hessian(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                      double d, double tau2);

struct LambdaOptions {
  double gradient_tol = 1e-8;
  int max_steps = 100;
};

/// Damped Newton ascent on lambda_objective. Never decreases the objective;
/// phi is recomputed from the returned lambda.
PenaltyState maximize_lambda(const PenaltyState& state, const Vector& b, const Matrix& a, double n,
                             const LambdaOptions& options = {});

}  // namespace annokn
