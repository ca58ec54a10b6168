#include "annokn/anno_weights.hpp"

#include <algorithm>
#include <cmath>

#include "annokn/error.hpp"

namespace annokn {

namespace {

Vector exponents(const Vector& lambda_anno, const Matrix& a, double d) {
  if (a.cols() != lambda_anno.size()) {
    throw DimensionMismatch("annotation columns vs lambda", static_cast<std::size_t>(lambda_anno.size()),
                            static_cast<std::size_t>(a.cols()));
  }
  if (a.cols() == 0) return Vector::Zero(a.rows());
  return a * lambda_anno / d;
}

// d phi_j / d(exponent) is zero where the clamp is active.
Vector unclamped_mask(const Vector& expo) {
  return (expo.array().abs() < kPhiExponentClamp).cast<double>();
}

}  // namespace

PenaltyState PenaltyState::initial(Eigen::Index p, Eigen::Index l, double d, double tau2, double lambda0) {
  PenaltyState s;
  s.lambda_anno = Vector::Zero(l);
  s.phi = Vector::Ones(p);
  s.d = d;
  s.tau2 = tau2;
  s.lambda0 = lambda0;
  return s;
}

Vector compute_phi(const Vector& lambda_anno, const Matrix& a, double d) {
  return exponents(lambda_anno, a, d).cwiseMax(-kPhiExponentClamp).cwiseMin(kPhiExponentClamp).array().exp();
}

Vector beta_abs_sums(const Vector& beta, Eigen::Index p) {
  if (p <= 0 || beta.size() % p != 0) {
    throw DimensionMismatch("coefficient length must be a multiple of p", static_cast<std::size_t>(p),
                            static_cast<std::size_t>(beta.size()));
  }
  Vector b = Vector::Zero(p);
  for (Eigen::Index k = 0; k < beta.size(); ++k) b(k % p) += std::abs(beta(k));
  return b;
}

double lambda_objective(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                        double d, double tau2) {
  const Vector phi = compute_phi(lambda_anno, a, d);
  return -n * lambda0 * phi.dot(b) - lambda_anno.squaredNorm() / (2.0 * tau2);
}

Vector lambda_gradient(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                       double d, double tau2) {
  const Vector expo = exponents(lambda_anno, a, d);
  const Vector phi = compute_phi(lambda_anno, a, d);
  const Vector w = phi.cwiseProduct(b).cwiseProduct(unclamped_mask(expo));
  return -(n * lambda0 / d) * (a.transpose() * w) - lambda_anno / tau2;
}

Matrix lambda_hessian(const Vector& lambda_anno, const Vector& b, const Matrix& a, double n, double lambda0,
                      double d, double tau2) {
  const Vector expo = exponents(lambda_anno, a, d);
  const Vector phi = compute_phi(lambda_anno, a, d);
  const Vector w = phi.cwiseProduct(b).cwiseProduct(unclamped_mask(expo));
  Matrix h = -(n * lambda0 / (d * d)) * (a.transpose() * w.asDiagonal() * a);
  h.diagonal().array() -= 1.0 / tau2;
  return h;
}

PenaltyState maximize_lambda(const PenaltyState& state, const Vector& b, const Matrix& a, double n,
                             const LambdaOptions& options) {
  if (b.size() != a.rows()) {
    throw DimensionMismatch("coefficient sums vs annotation rows", static_cast<std::size_t>(a.rows()),
                            static_cast<std::size_t>(b.size()));
  }
  PenaltyState out = state;
  if (a.cols() == 0) {
    out.phi = Vector::Ones(a.rows());
    return out;
  }
  auto f = [&](const Vector& lam) { return lambda_objective(lam, b, a, n, state.lambda0, state.d, state.tau2); };

  Vector lam = state.lambda_anno;
  double value = f(lam);
  for (int step = 0; step < options.max_steps; ++step) {
    const Vector g = lambda_gradient(lam, b, a, n, state.lambda0, state.d, state.tau2);
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tol) break;
    const Matrix h = lambda_hessian(lam, b, a, n, state.lambda0, state.d, state.tau2);

    Vector direction;
    const Eigen::LLT<Matrix> llt(-h);
    if (llt.info() == Eigen::Success) {
      direction = llt.solve(g);
    } else {
      direction = g / (1.0 + h.norm());
    }
    // backtracking line search with an Armijo condition
    double t = 1.0;
    const double slope = g.dot(direction);
    bool moved = false;
    for (int k = 0; k < 60; ++k) {
      const Vector trial = lam + t * direction;
      const double trial_value = f(trial);
      if (std::isfinite(trial_value) && trial_value >= value + 1e-4 * t * slope) {
        lam = trial;
        value = trial_value;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  out.lambda_anno = lam;
  out.phi = compute_phi(lam, a, state.d);
  return out;
}

}  // namespace annokn
