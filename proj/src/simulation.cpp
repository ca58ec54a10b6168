#include "annokn/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "annokn/annogk_pipeline.hpp"
#include "annokn/annokn_pipeline.hpp"
#include "annokn/error.hpp"
#include "annokn/io.hpp"
#include "annokn/knockoff_gen.hpp"
#include "annokn/parallel.hpp"
#include "annokn/rng.hpp"

namespace annokn {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string join_indices(const std::vector<int>& idx) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(idx[i] + 1);
  }
  return out;
}

struct ReplicateOutput {
  std::vector<ReplicateRecord> records;
  std::vector<MethodOutcome> outcomes;
  std::vector<int> support;
  std::uint64_t digest = 0;
};

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {"knockoffs",     "annokn", "annokn_lite",
                                                   "ghostknockoff", "annogk", "annogk_insample"};
  return methods;
}

void SimScenario::validate() const {
  if (n < 2) throw ConfigError("n", "must be >= 2");
  if (p < 1) throw ConfigError("p", "must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in [0, 1)");
  if (n_causal < 0 || n_causal > causal_pool) throw ConfigError("n_causal", "must lie in [0, causal_pool]");
  if (causal_pool < 1 || causal_pool > p) throw ConfigError("causal_pool", "must lie in [1, p]");
  if (!std::isfinite(causal_prob_exponent)) throw ConfigError("causal_prob_exponent", "must be finite");
  if (h2.has_value() == amplitude.has_value()) throw ConfigError("h2", "set exactly one of h2 and amplitude");
  if (h2 && !(*h2 >= 0.0 && *h2 < 1.0)) throw ConfigError("h2", "must lie in [0, 1)");
  if (amplitude && !std::isfinite(*amplitude)) throw ConfigError("amplitude", "must be finite");
  if (annotation == AnnotationKind::binary_pool && causal_pool == p) {
    throw ConfigError("annotation", "binary annotation is constant when causal_pool = p");
  }
  if (noise_annotations < 0) throw ConfigError("noise_annotations", "must be >= 0");
  if (replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (methods.empty()) throw ConfigError("methods", "no methods requested");
  for (const auto& m : methods)
    if (!contains(known_methods(), m)) throw ConfigError("methods", "unknown method '" + m + "'");
  if (q_grid.empty()) throw ConfigError("q_grid", "empty");
  for (double q : q_grid)
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("q_grid", "values must lie in (0, 1)");
  if (!(ld_shrinkage >= 0.0 && ld_shrinkage < 1.0)) throw ConfigError("ld_shrinkage", "must lie in [0, 1)");
  pipeline.validate();
}

SimScenario scenario_from_config(const KeyValueConfig& kv) {
  std::vector<std::string> allowed = {"n",         "p",          "rho",     "n_causal",     "causal_pool",
                                      "causal_prob_exponent", "h2", "amplitude", "annotation",
                                      "noise_annotations", "replicates", "seed", "methods", "q_grid",
                                      "ld_shrinkage"};
  for (const auto& k : pipeline_keys()) allowed.push_back(k);
  kv.check_keys(allowed);

  SimScenario s;
  for (const char* key : {"n", "p", "n_causal"}) (void)kv.require(key);
  s.n = static_cast<int>(*kv.get_int("n"));
  s.p = static_cast<int>(*kv.get_int("p"));
  s.n_causal = static_cast<int>(*kv.get_int("n_causal"));
  s.causal_pool = static_cast<int>(kv.get_int("causal_pool").value_or(s.p));
  s.rho = kv.get_double("rho").value_or(0.0);
  s.causal_prob_exponent = kv.get_double("causal_prob_exponent").value_or(0.0);
  s.h2 = kv.get_double("h2");
  s.amplitude = kv.get_double("amplitude");
  if (!s.h2 && !s.amplitude) throw ConfigError("h2", "missing signal: set h2 or amplitude");
  if (auto a = kv.get("annotation")) {
    if (*a == "index") s.annotation = AnnotationKind::index;
    else if (*a == "binary") s.annotation = AnnotationKind::binary_pool;
    else if (*a == "none") s.annotation = AnnotationKind::none;
    else throw ConfigError("annotation", "expected index, binary or none");
  }
  s.noise_annotations = static_cast<int>(kv.get_int("noise_annotations").value_or(0));
  s.replicates = static_cast<int>(kv.get_int("replicates").value_or(1));
  s.seed = kv.get_u64("seed").value_or(1);
  if (auto m = kv.get("methods")) s.methods = split_commas(*m);
  if (auto q = kv.get_doubles("q_grid")) s.q_grid = *q;
  s.ld_shrinkage = kv.get_double("ld_shrinkage").value_or(0.0);
  apply_pipeline_keys(kv, s.pipeline);
  s.validate();
  return s;
}

Matrix ar1_correlation(int p, double rho) {
  Matrix sigma(p, p);
  for (int s = 0; s < p; ++s)
    for (int t = 0; t < p; ++t) sigma(s, t) = std::pow(rho, std::abs(s - t));
  return sigma;
}

SimDataset generate_ar1(const SimScenario& scenario, std::uint64_t replicate_seed) {
  scenario.validate();
  const int n = scenario.n;
  const int p = scenario.p;
  Rng rng(replicate_seed);
  SimDataset out;
  out.sigma = ar1_correlation(p, scenario.rho);
  const Matrix chol = out.sigma.llt().matrixL();
  const Matrix raw = standard_normal(rng, n, p) * chol.transpose();

  std::vector<double> weights(static_cast<std::size_t>(scenario.causal_pool));
  for (int j = 0; j < scenario.causal_pool; ++j) weights[static_cast<std::size_t>(j)] = std::pow(j + 1.0, -scenario.causal_prob_exponent);
  for (int k = 0; k < scenario.n_causal; ++k) {
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    const int j = draw(rng);
    out.support.push_back(j);
    weights[static_cast<std::size_t>(j)] = 0.0;
  }
  std::sort(out.support.begin(), out.support.end());

  Vector signs = Vector::Zero(p);
  std::bernoulli_distribution coin(0.5);
  for (int j : out.support) signs(j) = coin(rng) ? 1.0 : -1.0;
  double amp = 0.0;
  if (scenario.amplitude) {
    amp = *scenario.amplitude / std::sqrt(static_cast<double>(n));
  } else if (!out.support.empty()) {
    const double quad = signs.dot(out.sigma * signs);
    amp = std::sqrt(*scenario.h2 / ((1.0 - *scenario.h2) * quad));
  }
  out.beta = amp * signs;
  const Vector noise = standard_normal(rng, n);
  out.y = standardize_vector(raw * out.beta + noise);
  out.x = StandardizedMatrix::from_raw(raw);

  Vector informative(p);
  for (int j = 0; j < p; ++j) {
    informative(j) = scenario.annotation == AnnotationKind::binary_pool ? (j < scenario.causal_pool ? 1.0 : 0.0)
                                                                         : static_cast<double>(j + 1);
  }
  const int base = scenario.annotation == AnnotationKind::none ? 0 : 1;
  const int cols = base + scenario.noise_annotations;
  if (cols == 0) {
    out.annotations = AnnotationMatrix::empty(p);
    return out;
  }
  Matrix a(p, cols);
  if (base) a.col(0) = informative;
  std::vector<int> perm(static_cast<std::size_t>(p));
  for (int c = base; c < cols; ++c) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int j = 0; j < p; ++j) a(j, c) = informative(perm[static_cast<std::size_t>(j)]);
  }
  out.annotations = AnnotationMatrix::from_raw(a);
  return out;
}

double false_discovery_proportion(const std::vector<int>& selected, const std::vector<int>& support) {
  if (selected.empty()) return 0.0;
  std::size_t false_hits = 0;
  for (int j : selected)
    if (!std::binary_search(support.begin(), support.end(), j)) ++false_hits;
  return static_cast<double>(false_hits) / static_cast<double>(selected.size());
}

double power(const std::vector<int>& selected, const std::vector<int>& support) {
  if (support.empty()) return 0.0;
  std::size_t hits = 0;
  for (int j : selected)
    if (std::binary_search(support.begin(), support.end(), j)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(support.size());
}

std::uint64_t fnv1a_digest(const Matrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t count = static_cast<std::size_t>(m.size()) * sizeof(double);
  for (std::size_t i = 0; i < count; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

SimMetrics run_comparison(const SimScenario& scenario, int threads) {
  scenario.validate();
  const auto& methods = scenario.methods;
  const bool individual = contains(methods, "knockoffs") || contains(methods, "annokn") ||
                          contains(methods, "annokn_lite") || contains(methods, "annogk_insample");
  const bool summary = contains(methods, "ghostknockoff") || contains(methods, "annogk");
  const int p = scenario.p;
  const double n = scenario.n;

  KnockoffModel true_model;
  if (individual) true_model = KnockoffModel::equicorrelated(ar1_correlation(p, scenario.rho));

  std::vector<ReplicateOutput> reps(static_cast<std::size_t>(scenario.replicates));
  parallel_for(reps.size(), threads, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(scenario.seed, r);
    const SimDataset data = generate_ar1(scenario, derive_seed(rs, 1));
    PipelineConfig cfg = scenario.pipeline;
    cfg.seed = derive_seed(rs, 3);
    cfg.threads = 1;
    const AnnotationMatrix none = AnnotationMatrix::empty(p);
    ReplicateOutput& out = reps[r];
    out.support = data.support;

    std::optional<IndividualData> ind;
    if (individual) {
      const StandardizedMatrix knock = sample_knockoffs(data.x, true_model, derive_seed(rs, 2));
      out.digest = fnv1a_digest(knock.values());
      Matrix xx(scenario.n, 2 * p);
      xx << data.x.values(), knock.values();
      ind.emplace(data.y, xx, p, cfg.cv_folds, cfg.seed);
    }
    Vector zm;
    Matrix sigma_m;
    PsdFactor factor;
    if (summary) {
      const Matrix& x = data.x.values();
      const LdMatrix ld = LdMatrix::from_correlation(sample_correlation(x), scenario.ld_shrinkage);
      const Vector z = std::sqrt(n) * (x.transpose() * data.y) / (n - 1.0);
      const KnockoffModel model = KnockoffModel::equicorrelated(ld.sigma());
      zm = sample_knockoff_zscores(z, model, derive_seed(rs, 4));
      sigma_m = build_sigma_m(ld.sigma(), model.d_diag());
      factor = PsdFactor(sigma_m);
    }

    for (const auto& method : methods) {
      PipelineResult res;
      if (method == "knockoffs") res = knockoff_lasso_fit(*ind, cfg);
      else if (method == "annokn") res = annokn_fit(*ind, data.annotations, cfg);
      else if (method == "annokn_lite") res = annokn_lite_fit(*ind, data.annotations, cfg);
      else if (method == "ghostknockoff") res = annogk_fit_prepared(zm, sigma_m, n, none, cfg, &factor);
      else if (method == "annogk") res = annogk_fit_prepared(zm, sigma_m, n, data.annotations, cfg, &factor);
      else if (method == "annogk_insample") {
        const Vector zin = std::sqrt(n) * ind->full().linear();
        res = annogk_fit_prepared(zin, ind->full().gram(), n, data.annotations, cfg);
      }
      out.outcomes.push_back({method, static_cast<int>(r), res.stats.w, res.penalty.lambda_anno,
                              res.penalty.lambda0});
      for (double q : scenario.q_grid) {
        const SelectionResult sel = knockoff_threshold(res.stats, q);
        out.records.push_back({method, q, static_cast<int>(r), false_discovery_proportion(sel.selected, data.support),
                               power(sel.selected, data.support), sel.selected});
      }
    }
  });

  SimMetrics metrics;
  for (const auto& method : methods) {
    for (const auto& rep : reps) {
      for (const auto& rec : rep.records)
        if (rec.method == method) metrics.records.push_back(rec);
      for (const auto& o : rep.outcomes)
        if (o.method == method) metrics.outcomes.push_back(o);
    }
  }
  for (auto& rep : reps) {
    metrics.supports.push_back(std::move(rep.support));
    metrics.knockoff_digests.push_back(rep.digest);
  }
  for (const auto& method : methods)
    for (double q : scenario.q_grid) metrics.summary.push_back(summarize(metrics.records, method, q));
  return metrics;
}

MethodSummary summarize(const std::vector<ReplicateRecord>& records, const std::string& method, double q) {
  MethodSummary s;
  s.method = method;
  s.q = q;
  std::vector<double> pw;
  std::vector<double> fd;
  for (const auto& r : records) {
    if (r.method == method && r.q == q) {
      pw.push_back(r.power);
      fd.push_back(r.fdp);
    }
  }
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    mean = se = 0.0;
    if (v.empty()) return;
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  };
  mean_se(pw, s.mean_power, s.se_power);
  mean_se(fd, s.mean_fdp, s.se_fdp);
  return s;
}

void write_replicates_csv(const std::filesystem::path& path, const SimMetrics& metrics) {
  auto out = open_csv(path);
  out << "method,q,replicate,fdp,power\n";
  for (const auto& r : metrics.records) {
    out << r.method << ',' << format_double(r.q) << ',' << r.replicate << ',' << format_double(r.fdp) << ','
        << format_double(r.power) << '\n';
  }
}

void write_aggregate_csv(const std::filesystem::path& path, const SimMetrics& metrics) {
  auto out = open_csv(path);
  out << "method,q,mean_power,se_power,mean_fdp,se_fdp\n";
  for (const auto& s : metrics.summary) {
    out << s.method << ',' << format_double(s.q) << ',' << format_double(s.mean_power) << ','
        << format_double(s.se_power) << ',' << format_double(s.mean_fdp) << ',' << format_double(s.se_fdp) << '\n';
  }
}

void write_plot_data_csv(const std::filesystem::path& path, const SimMetrics& metrics) {
  auto out = open_csv(path);
  out << "q,method,metric,value,se\n";
  for (const auto& s : metrics.summary) {
    out << format_double(s.q) << ',' << s.method << ",power," << format_double(s.mean_power) << ','
        << format_double(s.se_power) << '\n';
    out << format_double(s.q) << ',' << s.method << ",fdr," << format_double(s.mean_fdp) << ','
        << format_double(s.se_fdp) << '\n';
  }
}

void write_selections_csv(const std::filesystem::path& path, const SimMetrics& metrics) {
  auto out = open_csv(path);
  out << "method,q,replicate,selected\n";
  for (const auto& r : metrics.records) {
    out << r.method << ',' << format_double(r.q) << ',' << r.replicate << ',' << join_indices(r.selected) << '\n';
  }
}

void write_support_csv(const std::filesystem::path& path, const SimMetrics& metrics) {
  auto out = open_csv(path);
  out << "replicate,support\n";
  for (std::size_t r = 0; r < metrics.supports.size(); ++r) out << r << ',' << join_indices(metrics.supports[r]) << '\n';
}

std::vector<int> cluster_representatives(const LdMatrix& ld, const Vector& pvals, double r_threshold) {
  const Eigen::Index p = ld.size();
  if (pvals.size() != p) {
    throw DimensionMismatch("p-values vs LD size", static_cast<std::size_t>(p), static_cast<std::size_t>(pvals.size()));
  }
  if (!((pvals.array() > 0.0) && (pvals.array() <= 1.0)).all()) throw NonFiniteInput("p-values must lie in (0, 1]");
  const Matrix& r = ld.sigma();
  const double cut = 1.0 - r_threshold;

  // Prim's minimum spanning tree on 1 - |r|; single-linkage clusters at
  // height `cut` are the components left after dropping tree edges >= cut.
  std::vector<int> parent(static_cast<std::size_t>(p), -1);
  std::vector<double> best(static_cast<std::size_t>(p), std::numeric_limits<double>::infinity());
  std::vector<bool> in_tree(static_cast<std::size_t>(p), false);
  std::vector<int> label(static_cast<std::size_t>(p));
  std::iota(label.begin(), label.end(), 0);
  std::function<int(int)> find = [&](int i) { return label[i] == i ? i : label[i] = find(label[i]); };
  if (p > 0) best[0] = 0.0;
  for (Eigen::Index step = 0; step < p; ++step) {
    int u = -1;
    for (Eigen::Index j = 0; j < p; ++j)
      if (!in_tree[j] && (u < 0 || best[j] < best[u])) u = static_cast<int>(j);
    in_tree[u] = true;
    if (parent[u] >= 0 && best[u] < cut) label[find(u)] = find(parent[u]);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double dist = 1.0 - std::abs(r(u, j));
      if (!in_tree[j] && dist < best[j]) {
        best[j] = dist;
        parent[j] = u;
      }
    }
  }

  std::vector<int> rep(static_cast<std::size_t>(p), -1);
  for (int j = 0; j < static_cast<int>(p); ++j) {
    int& current = rep[find(j)];
    if (current < 0 || pvals(j) < pvals(current)) current = j;
  }
  std::vector<int> out;
  for (int c : rep)
    if (c >= 0) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace annokn
