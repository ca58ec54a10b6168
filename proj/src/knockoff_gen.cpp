#include "annokn/knockoff_gen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "annokn/error.hpp"
#include "annokn/rng.hpp"

namespace annokn {

namespace {

constexpr double kPsdTolerance = 1e-8;
constexpr double kFeasibilityJitter = 1e-10;

void require_valid_sigma(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw DimensionMismatch("sigma must be square", static_cast<std::size_t>(sigma.rows()),
                            static_cast<std::size_t>(sigma.cols()));
  }
  if (!is_positive_definite(sigma)) throw NotPositiveDefinite("sigma is not positive definite");
}

void require_m(int m) {
  if (m < 1) throw ConfigError("m", "knockoff count must be >= 1");
}

double ratio(int m) { return static_cast<double>(m + 1) / static_cast<double>(m); }

bool feasible(const Matrix& scaled_sigma, const Vector& s) {
  Matrix a = scaled_sigma;
  a.diagonal() -= s;
  a.diagonal().array() += kFeasibilityJitter;
  Eigen::LLT<Matrix> llt(a);
  return llt.info() == Eigen::Success;
}

}  // namespace

Vector solve_d_equicorrelated(const Matrix& sigma, int m) {
  require_m(m);
  require_valid_sigma(sigma);
  const double lmin = min_eigenvalue(sigma);
  const double s = std::clamp(ratio(m) * lmin, 0.0, 1.0);
  return Vector::Constant(sigma.rows(), s);
}

Vector solve_d_coordinate(const Matrix& sigma, int m, int max_iter) {
  Vector s = solve_d_equicorrelated(sigma, m);
  const Matrix scaled = ratio(m) * sigma;
  for (int sweep = 0; sweep < max_iter; ++sweep) {
    bool changed = false;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (s(j) >= 1.0) continue;
      Vector trial = s;
      trial(j) = 1.0;
      if (feasible(scaled, trial)) {
        s(j) = 1.0;
        changed = true;
        continue;
      }
      double lo = s(j);
      double hi = 1.0;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        trial(j) = mid;
        if (feasible(scaled, trial)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (lo > s(j)) {
        s(j) = lo;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return s;
}

KnockoffModel KnockoffModel::build(const Matrix& sigma, const Vector& s, int m) {
  require_m(m);
  require_valid_sigma(sigma);
  if (s.size() != sigma.rows()) {
    throw DimensionMismatch("D diagonal vs sigma", static_cast<std::size_t>(sigma.rows()),
                            static_cast<std::size_t>(s.size()));
  }
  if ((s.array() < 0.0).any()) throw NotPositiveDefinite("D has a negative entry");
  Matrix constraint = ratio(m) * sigma;
  constraint.diagonal() -= s;
  if (min_eigenvalue(constraint) < -kPsdTolerance) {
    throw NotPositiveDefinite("((M+1)/M) sigma - D is not positive semidefinite");
  }

  KnockoffModel model;
  model.sigma_ = sigma;
  model.s_ = s;
  model.m_ = m;
  if (m == 1) {
    const Eigen::LLT<Matrix> llt(sigma);
    const Matrix sigma_inv_d = llt.solve(Matrix(s.asDiagonal()));
    const Eigen::Index p = sigma.rows();
    model.mean_map_ = Matrix::Identity(p, p) - sigma_inv_d;
    Matrix cond_cov = -(s.asDiagonal() * sigma_inv_d);
    cond_cov.diagonal() += 2.0 * s;
    model.cond_factor_ = PsdFactor(cond_cov, kPsdTolerance).factor();
  }
  return model;
}

KnockoffModel KnockoffModel::equicorrelated(const Matrix& sigma, int m) {
  return build(sigma, solve_d_equicorrelated(sigma, m), m);
}

StandardizedMatrix sample_knockoffs(const StandardizedMatrix& x, const KnockoffModel& model,
                                    std::uint64_t seed) {
  if (model.m() != 1) throw ConfigError("m", "knockoff sampling supports M = 1 only");
  if (x.cols() != model.p()) {
    throw DimensionMismatch("design columns vs knockoff model", static_cast<std::size_t>(model.p()),
                            static_cast<std::size_t>(x.cols()));
  }
  Rng rng(seed);
  const Matrix noise = standard_normal(rng, x.rows(), x.cols());
  Matrix knock = x.values() * model.conditional_mean_map();
  knock.noalias() += noise * model.conditional_cov_factor();
  std::vector<std::string> names;
  for (const auto& name : x.names()) names.push_back(name + "_knockoff");
  return StandardizedMatrix::from_raw(knock, std::move(names));
}

Vector sample_knockoff_zscores(const Vector& z, const KnockoffModel& model, std::uint64_t seed) {
  if (model.m() != 1) throw ConfigError("m", "knockoff sampling supports M = 1 only");
  if (z.size() != model.p()) {
    throw DimensionMismatch("z-scores vs knockoff model", static_cast<std::size_t>(model.p()),
                            static_cast<std::size_t>(z.size()));
  }
  Rng rng(seed);
  const Vector e = standard_normal(rng, z.size());
  Vector out(2 * z.size());
  out.head(z.size()) = z;
  out.tail(z.size()) = model.conditional_mean_map().transpose() * z +
                       model.conditional_cov_factor().transpose() * e;
  return out;
}

Matrix build_sigma_m(const Matrix& sigma, const Vector& s, int m) {
  require_m(m);
  if (s.size() != sigma.rows()) {
    throw DimensionMismatch("D diagonal vs sigma", static_cast<std::size_t>(sigma.rows()),
                            static_cast<std::size_t>(s.size()));
  }
  const Eigen::Index p = sigma.rows();
  Matrix off = sigma;
  off.diagonal() -= s;
  Matrix out(p * (m + 1), p * (m + 1));
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b) out.block(a * p, b * p, p, p) = (a == b) ? sigma : off;
  return out;
}

}  // namespace annokn
