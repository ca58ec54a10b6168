#pragma once

#include <cstdint>

#include "annokn/data_model.hpp"
#include "annokn/linalg.hpp"

namespace annokn {

/// Equicorrelated diagonal: s_j = min(1, ((M+1)/M) * lambda_min(sigma)).
Vector solve_d_equicorrelated(const Matrix& sigma, int m = 1);

/// Coordinate ascent on min sum |1 - s_j| s.t. ((M+1)/M) sigma - D PSD.
/// Starts at the equicorrelated point and pushes each s_j toward 1 by
/// bisection (tolerance 1e-6) against a Cholesky feasibility check; stops
/// after `max_iter` sweeps or when a sweep changes nothing.
Vector solve_d_coordinate(const Matrix& sigma, int m = 1, int max_iter = 10);

/// Second-order Gaussian knockoff model for a correlation matrix sigma and
/// diagonal D = diag(s). Immutable once built.
class KnockoffModel {
 public:
  /// Validates s >= 0 and ((M+1)/M) sigma - D PSD (tolerance -1e-8). For
  /// M = 1 also prepares the conditional mean map I - sigma^{-1} D and a factor
  /// C of the conditional covariance 2D - D sigma^{-1} D (C^T C = V).
  static KnockoffModel build(const Matrix& sigma, const Vector& s, int m = 1);
  /// Equicorrelated D.
  static KnockoffModel equicorrelated(const Matrix& sigma, int m = 1);

  const Matrix& sigma() const noexcept { return sigma_; }
  const Vector& d_diag() const noexcept { return s_; }
  int m() const noexcept { return m_; }
  Eigen::Index p() const noexcept { return sigma_.rows(); }
  /// I - sigma^{-1} D, applied to rows: x_tilde^T = x^T * map.
  const Matrix& conditional_mean_map() const noexcept { return mean_map_; }
  /// C with C^T C = 2D - D sigma^{-1} D.
  const Matrix& conditional_cov_factor() const noexcept { return cond_factor_; }

 private:
  Matrix sigma_;
  Vector s_;
  int m_ = 1;
  Matrix mean_map_;
  Matrix cond_factor_;
};

/// X_tilde = X (I - sigma^{-1} D) + E C, E iid N(0,1) from `seed`; the
/// result is re-standardized. Requires M = 1.
StandardizedMatrix sample_knockoffs(const StandardizedMatrix& x, const KnockoffModel& model,
                                    std::uint64_t seed);

/// Z_M = (z, z_tilde) with z_tilde = (I - D sigma^{-1}) z + C^T e. Requires M = 1.
Vector sample_knockoff_zscores(const Vector& z, const KnockoffModel& model, std::uint64_t seed);

/// (M+1)p x (M+1)p block matrix: sigma on the diagonal blocks, sigma - D off it.
Matrix build_sigma_m(const Matrix& sigma, const Vector& s, int m = 1);

}  // namespace annokn
