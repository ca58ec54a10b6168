#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "annokn/config.hpp"
#include "annokn/data_model.hpp"
#include "annokn/pipeline.hpp"

namespace annokn {

enum class AnnotationKind { index, binary_pool, none };

struct SimScenario {
  int n = 0;
  int p = 0;
  double rho = 0.0;
  int n_causal = 0;
  /// Causal covariates are drawn from the first `causal_pool` indices.
  int causal_pool = 0;
  /// Draw weight of covariate j (1-based) is j^-exponent; 0 is uniform.
  double causal_prob_exponent = 0.0;
  /// Exactly one of h2 / amplitude. Amplitude gives beta_j = +-amplitude / sqrt(n).
  std::optional<double> h2;
  std::optional<double> amplitude;
  AnnotationKind annotation = AnnotationKind::index;
  /// Extra columns, each a random permutation of the informative one.
  int noise_annotations = 0;
  int replicates = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> methods = {"knockoffs", "annokn", "annokn_lite", "ghostknockoff", "annogk"};
  std::vector<double> q_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  /// Shrinkage applied to the in-sample LD used by summary methods.
  double ld_shrinkage = 0.0;
  PipelineConfig pipeline;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Keys: n, p, rho, n_causal, causal_pool, causal_prob_exponent, h2,
/// amplitude, annotation (index | binary | none), noise_annotations,
/// replicates, seed, methods, q_grid, ld_shrinkage and the pipeline keys.
/// Missing n, p, n_causal or signal raise ConfigError.
SimScenario scenario_from_config(const KeyValueConfig& kv);

/// Method names accepted by run_comparison.
const std::vector<std::string>& known_methods();

struct SimDataset {
  StandardizedMatrix x;
  /// Standardized response.
  Vector y;
  /// 0-based causal indices, ascending.
  std::vector<int> support;
  Vector beta;
  AnnotationMatrix annotations;
  /// AR(1) correlation rho^|s-t|.
  Matrix sigma;
};

Matrix ar1_correlation(int p, double rho);

/// Rows iid N(0, Sigma_rho) via its Cholesky factor; causal set by sequential
/// weighted draws without replacement; signs +-1 with equal probability; noise
/// variance 1 and amplitude fixed by h2 through beta^T Sigma beta when h2 is set.
SimDataset generate_ar1(const SimScenario& scenario, std::uint64_t replicate_seed);

/// |selected \ support| / max(|selected|, 1).
double false_discovery_proportion(const std::vector<int>& selected, const std::vector<int>& support);
/// |selected & support| / |support| (0 for an empty support).
double power(const std::vector<int>& selected, const std::vector<int>& support);

struct ReplicateRecord {
  std::string method;
  double q = 0;
  int replicate = 0;
  double fdp = 0;
  double power = 0;
  std::vector<int> selected;
};

struct MethodSummary {
  std::string method;
  double q = 0;
  double mean_power = 0;
  double se_power = 0;
  double mean_fdp = 0;
  double se_fdp = 0;
};

/// Fitted quantities of one method on one replicate.
struct MethodOutcome {
  std::string method;
  int replicate = 0;
  Vector w;
  Vector lambda_anno;
  double lambda0 = 0;
};

struct SimMetrics {
  /// Ordered by (method in request order, replicate, q).
  std::vector<ReplicateRecord> records;
  /// Ordered by (method, q).
  std::vector<MethodSummary> summary;
  std::vector<MethodOutcome> outcomes;
  std::vector<std::vector<int>> supports;
  /// Per replicate, FNV-1a digest of the individual-level knockoff matrix.
  std::vector<std::uint64_t> knockoff_digests;
};

/// Runs every method on every replicate. Replicate r uses seeds derived from
/// (scenario.seed, r) only, and all methods in a replicate share one knockoff
/// draw, so results do not depend on `threads`.
SimMetrics run_comparison(const SimScenario& scenario, int threads = 1);

MethodSummary summarize(const std::vector<ReplicateRecord>& records, const std::string& method, double q);

/// `method,q,replicate,fdp,power`
void write_replicates_csv(const std::filesystem::path& path, const SimMetrics& metrics);
/// `method,q,mean_power,se_power,mean_fdp,se_fdp`
void write_aggregate_csv(const std::filesystem::path& path, const SimMetrics& metrics);
/// Long format for plotting: `q,method,metric,value,se`.
void write_plot_data_csv(const std::filesystem::path& path, const SimMetrics& metrics);
/// `method,q,replicate,selected` with selected as space-separated 1-based indices.
void write_selections_csv(const std::filesystem::path& path, const SimMetrics& metrics);
/// `replicate,support` with 1-based indices.
void write_support_csv(const std::filesystem::path& path, const SimMetrics& metrics);

/// Single-linkage clustering on distance 1 - |r| cut at 1 - r_threshold, so
/// two covariates share a cluster when a chain of pairs with |r| > r_threshold
/// links them. Returns the minimum p-value index of each cluster (ties to the
/// lower index), ascending.
std::vector<int> cluster_representatives(const LdMatrix& ld, const Vector& pvals, double r_threshold);

std::uint64_t fnv1a_digest(const Matrix& m);

}  // namespace annokn
