#include "annokn/adaptive_lasso.hpp"

#include <cmath>

#include "annokn/error.hpp"

namespace annokn {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void require_phi(const LassoProblem& problem, const Vector& phi) {
  if (phi.size() != problem.p()) {
    throw DimensionMismatch("penalty weights vs p", static_cast<std::size_t>(problem.p()),
                            static_cast<std::size_t>(phi.size()));
  }
}

double penalty(const Vector& beta, const Vector& phi, Eigen::Index p, double lambda0) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) total += phi(k % p) * std::abs(beta(k));
  return lambda0 * total;
}

class CoordinateDescent {
 public:
  CoordinateDescent(const LassoProblem& problem, const Vector& phi, double lambda0, Vector beta)
      : problem_(problem), phi_(phi), lambda0_(lambda0), beta_(std::move(beta)) {
    residual_ = problem_.linear() - problem_.gram() * beta_;
  }

  // Full cyclic sweep; returns the largest absolute coefficient change.
  double full_sweep() {
    const Matrix& gram = problem_.gram();
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < beta_.size(); ++j) {
      const double delta = update(j, gram(j, j), residual_(j));
      if (delta != 0.0) {
        residual_.noalias() -= delta * gram.col(j);
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    return max_change;
  }

  // Sweeps the current nonzero set until its largest change drops below
  // `tol`, working on the gathered active block of the Gram matrix. Appends
  // the objective after every sweep and returns the sweep count.
  int active_sweeps(double tol, int budget, std::vector<double>& objectives) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < beta_.size(); ++j)
      if (beta_(j) != 0.0) active.push_back(j);
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k == 0 || budget <= 0) return 0;

    const Matrix& gram = problem_.gram();
    Matrix block(k, k);
    Vector r(k);
    Vector c(k);
    Vector start(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) block(b, a) = gram(active[b], active[a]);
      r(a) = residual_(active[a]);
      c(a) = problem_.linear()(active[a]);
      start(a) = beta_(active[a]);
    }

    int sweeps = 0;
    while (sweeps < budget) {
      double max_change = 0.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        const double delta = update(active[a], block(a, a), r(a));
        if (delta != 0.0) {
          r.noalias() -= delta * block.col(a);
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      ++sweeps;
      double quad = 0.0;
      for (Eigen::Index a = 0; a < k; ++a) quad += beta_(active[a]) * (c(a) + r(a));
      objectives.push_back(-0.5 * quad + problem_.offset() + penalty(beta_, phi_, problem_.p(), lambda0_));
      if (max_change < tol) break;
    }

    Vector delta(k);
    for (Eigen::Index a = 0; a < k; ++a) delta(a) = beta_(active[a]) - start(a);
    for (Eigen::Index a = 0; a < k; ++a)
      if (delta(a) != 0.0) residual_.noalias() -= delta(a) * gram.col(active[a]);
    return sweeps;
  }

  double objective() const {
    // 1/2 b^T G b - b^T c = -1/2 b^T (c + r) with r = c - G b
    const double quad = -0.5 * beta_.dot(problem_.linear() + residual_);
    return quad + problem_.offset() + penalty(beta_, phi_, problem_.p(), lambda0_);
  }

  Vector take_beta() { return std::move(beta_); }

 private:
  // Soft-threshold update of coordinate j given its diagonal and current
  // residual; returns the change.
  double update(Eigen::Index j, double gjj, double rj) {
    if (!(gjj > 0.0)) return 0.0;
    const double old = beta_(j);
    const double updated = soft_threshold(rj + gjj * old, lambda0_ * phi_(j % problem_.p())) / gjj;
    if (!std::isfinite(updated)) throw NonFiniteObjective("coordinate update produced a non-finite value");
    beta_(j) = updated;
    return updated - old;
  }

  const LassoProblem& problem_;
  const Vector& phi_;
  double lambda0_;
  Vector beta_;
  Vector residual_;
};

}  // namespace

LassoProblem::LassoProblem(Matrix gram, Vector linear, Eigen::Index p, double offset)
    : gram_(std::move(gram)), linear_(std::move(linear)), p_(p), offset_(offset) {
  if (gram_.rows() != gram_.cols() || gram_.rows() != linear_.size()) {
    throw DimensionMismatch("gram vs linear term", static_cast<std::size_t>(linear_.size()),
                            static_cast<std::size_t>(gram_.rows()));
  }
  if (p_ <= 0 || linear_.size() % p_ != 0) {
    throw DimensionMismatch("problem size must be a multiple of p", static_cast<std::size_t>(p_),
                            static_cast<std::size_t>(linear_.size()));
  }
}

LassoProblem LassoProblem::individual(const Vector& y, const Matrix& xx, Eigen::Index p) {
  if (y.size() != xx.rows()) {
    throw DimensionMismatch("response length vs design rows", static_cast<std::size_t>(xx.rows()),
                            static_cast<std::size_t>(y.size()));
  }
  const double n = static_cast<double>(xx.rows());
  Matrix lower = Matrix::Zero(xx.cols(), xx.cols());
  lower.selfadjointView<Eigen::Lower>().rankUpdate(xx.transpose(), 1.0 / n);
  Matrix gram = lower.selfadjointView<Eigen::Lower>();
  Vector linear = xx.transpose() * y / n;
  return LassoProblem(std::move(gram), std::move(linear), p, y.squaredNorm() / (2.0 * n));
}

LassoProblem LassoProblem::summary(const Vector& zm, const Matrix& sigma_m, double n, Eigen::Index p) {
  if (!(n > 0)) throw ConfigError("n", "sample size must be positive");
  return LassoProblem(sigma_m, zm / std::sqrt(n), p);
}

double lasso_objective(const LassoProblem& problem, const Vector& beta, const Vector& phi, double lambda0) {
  require_phi(problem, phi);
  const double quad = 0.5 * beta.dot(problem.gram() * beta) - beta.dot(problem.linear());
  return quad + problem.offset() + penalty(beta, phi, problem.p(), lambda0);
}

double kkt_violation(const LassoProblem& problem, const Vector& beta, const Vector& phi, double lambda0) {
  require_phi(problem, phi);
  const Vector grad = problem.gram() * beta - problem.linear();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double t = lambda0 * phi(j % problem.p());
    const double v = beta(j) != 0.0 ? std::abs(grad(j) + t * (beta(j) > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(grad(j)) - t);
    worst = std::max(worst, v);
  }
  return worst;
}

double lambda_max(const LassoProblem& problem, const Vector& phi) {
  require_phi(problem, phi);
  double best = 0.0;
  for (Eigen::Index j = 0; j < problem.dim(); ++j) {
    best = std::max(best, std::abs(problem.linear()(j)) / phi(j % problem.p()));
  }
  return best;
}

FitResult solve_lasso(const LassoProblem& problem, const Vector& phi, double lambda0, const Vector* warm_start,
                      const SolverOptions& options) {
  require_phi(problem, phi);
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0", "must be >= 0");
  if (!phi.allFinite() || (phi.array() <= 0.0).any()) {
    throw NonFiniteObjective("penalty weights must be finite and positive");
  }
  Vector start = Vector::Zero(problem.dim());
  if (warm_start != nullptr) {
    if (warm_start->size() != problem.dim()) {
      throw DimensionMismatch("warm start length", static_cast<std::size_t>(problem.dim()),
                              static_cast<std::size_t>(warm_start->size()));
    }
    start = *warm_start;
  }

  CoordinateDescent cd(problem, phi, lambda0, std::move(start));
  FitResult result;
  while (result.iterations < options.max_sweeps) {
    const double change = cd.full_sweep();
    ++result.iterations;
    result.sweep_objectives.push_back(cd.objective());
    if (change < options.tol) {
      result.converged = true;
      break;
    }
    result.iterations += cd.active_sweeps(options.tol, options.max_sweeps - result.iterations, result.sweep_objectives);
  }
  result.objective = result.sweep_objectives.empty() ? cd.objective() : result.sweep_objectives.back();
  if (!std::isfinite(result.objective)) throw NonFiniteObjective("objective is not finite");
  result.beta = cd.take_beta();
  return result;
}

FitResult fit_individual(const Vector& y, const Matrix& xx, const Vector& phi, double lambda0,
                         const SolverOptions& options) {
  if (xx.cols() % 2 != 0) throw DimensionMismatch("[X, X_tilde] must have an even column count", 0, 1);
  const auto problem = LassoProblem::individual(y, xx, xx.cols() / 2);
  return solve_lasso(problem, phi, lambda0, nullptr, options);
}

FitResult fit_individual(const Vector& y, const StandardizedMatrix& xx, const Vector& phi, double lambda0,
                         const SolverOptions& options) {
  return fit_individual(y, xx.values(), phi, lambda0, options);
}

FitResult fit_summary(const Vector& zm, const Matrix& sigma_m, double n, const Vector& phi, double lambda0,
                      const SolverOptions& options) {
  if (phi.size() == 0 || zm.size() % phi.size() != 0) {
    throw DimensionMismatch("Z_M length vs p", static_cast<std::size_t>(phi.size()),
                            static_cast<std::size_t>(zm.size()));
  }
  const auto problem = LassoProblem::summary(zm, sigma_m, n, phi.size());
  return solve_lasso(problem, phi, lambda0, nullptr, options);
}

Vector ridge_start(const LassoProblem& problem, double scale) {
  const double kappa = scale * problem.gram().trace() / static_cast<double>(problem.dim());
  Matrix a = problem.gram();
  a.diagonal().array() += kappa;
  return Eigen::LLT<Matrix>(a).solve(problem.linear());
}

}  // namespace annokn
