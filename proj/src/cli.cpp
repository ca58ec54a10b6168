#include "annokn/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "annokn/annogk_pipeline.hpp"
#include "annokn/annokn_pipeline.hpp"
#include "annokn/config.hpp"
#include "annokn/error.hpp"
#include "annokn/io.hpp"
#include "annokn/knockoff_gen.hpp"
#include "annokn/rng.hpp"
#include "annokn/simulation.hpp"

namespace annokn {

namespace {

/// Options shared by the fitting subcommands. Optional fields are unset
/// unless given on the command line, so config-file values survive.
struct CommonFlags {
  std::optional<double> q;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<double> d;
  std::optional<double> tau2;
  std::optional<std::string> lambda0_grid;
  std::optional<std::string> config;
  std::string out_dir;
};

class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void set(const std::string& key, const std::string& value) { config_[key] = value; }
  void input(const std::string& role, const std::filesystem::path& path) {
    inputs_.emplace_back(role, path.string() + " sha256=" + sha256_file(path));
  }

  void write(const std::filesystem::path& dir) const {
    std::ofstream out(dir / "manifest.txt", std::ios::binary);
    if (!out) throw Error("cannot write manifest in " + dir.string());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    out << "command: " << command_ << '\n';
    out << "tool_version: " << kToolVersion << '\n';
    for (const auto& [k, v] : config_) out << "config." << k << ": " << v << '\n';
    for (const auto& [role, text] : inputs_) out << "input." << role << ": " << text << '\n';
    out << "wall_time_seconds: " << format_double(seconds) << '\n';
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> config_;
  std::vector<std::pair<std::string, std::string>> inputs_;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool fitting) {
  cmd->add_option("--seed", f.seed, "RNG seed; a random seed is generated, printed and recorded when absent");
  cmd->add_option("--threads", f.threads, "worker threads (0 = available cores); output does not depend on it");
  cmd->add_option("--out", f.out_dir, "output directory")->required();
  if (!fitting) return;
  cmd->add_option("--config", f.config, "key=value config file; flags override its keys, which override defaults");
  cmd->add_option("--q", f.q, "target FDR in (0, 1) (default 0.1)");
  cmd->add_option("--d", f.d, "annotation scale d (default sqrt(n / 10))");
  cmd->add_option("--tau2", f.tau2, "prior variance of the annotation weights (default 1)");
  cmd->add_option("--lambda0-grid", f.lambda0_grid, "'a,b,c' descending or 'auto:<count>:<min_ratio>' (default auto:20:0.01)");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const std::optional<std::uint64_t>& config,
                           std::ostream& out) {
  if (flag) return *flag;
  if (config) return *config;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  out << "seed: " << seed << '\n';
  return seed;
}

/// Config file (if any) then flags on top of defaults.
PipelineConfig pipeline_config(const CommonFlags& f, const KeyValueConfig& kv, Manifest& manifest,
                               std::ostream& out) {
  PipelineConfig cfg;
  apply_pipeline_keys(kv, cfg);
  if (f.q) cfg.q = *f.q;
  if (f.d) cfg.d = *f.d;
  if (f.tau2) cfg.tau2 = *f.tau2;
  if (f.lambda0_grid) parse_lambda_grid(*f.lambda0_grid, cfg);
  cfg.threads = f.threads;
  cfg.seed = resolve_seed(f.seed, kv.get_u64("seed"), out);
  cfg.validate();

  manifest.set("seed", std::to_string(cfg.seed));
  manifest.set("q", format_double(cfg.q));
  manifest.set("d", format_double(cfg.d));
  manifest.set("tau2", format_double(cfg.tau2));
  manifest.set("cv_folds", std::to_string(cfg.cv_folds));
  manifest.set("max_outer_iter", std::to_string(cfg.max_outer_iter));
  manifest.set("outer_tol", format_double(cfg.outer_tol));
  std::string grid;
  if (cfg.lambda0_grid.empty()) {
    grid = "auto:" + std::to_string(cfg.grid_size) + ":" + format_double(cfg.grid_min_ratio);
  } else {
    for (double v : cfg.lambda0_grid) grid += (grid.empty() ? "" : ",") + format_double(v);
  }
  manifest.set("lambda0_grid", grid);
  return cfg;
}

KeyValueConfig load_config(const CommonFlags& f, const std::vector<std::string>& extra_keys, Manifest& manifest) {
  if (!f.config) return {};
  KeyValueConfig kv = KeyValueConfig::load(*f.config);
  std::vector<std::string> allowed = pipeline_keys();
  allowed.push_back("seed");
  allowed.insert(allowed.end(), extra_keys.begin(), extra_keys.end());
  kv.check_keys(allowed);
  manifest.input("config", *f.config);
  return kv;
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v(i));
  return s;
}

std::string join(const std::vector<double>& v) {
  return join(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void write_fit_outputs(const std::filesystem::path& dir, const std::string& method,
                       const std::vector<std::string>& ids, const std::vector<std::string>& anno_names,
                       const PipelineResult& res) {
  {
    std::ofstream sel(dir / "selection.tsv", std::ios::binary);
    if (!sel) throw Error("cannot write selection.tsv");
    write_selection_tsv(sel, ids, res.stats.w, res.selection);
  }
  std::ofstream rep(dir / "report.txt", std::ios::binary);
  if (!rep) throw Error("cannot write report.txt");
  rep << "method: " << method << '\n';
  rep << "p: " << ids.size() << '\n';
  rep << "q: " << format_double(res.selection.q) << '\n';
  rep << "chosen_lambda0: " << format_double(res.lambda0_grid[res.chosen_index]) << '\n';
  rep << "lambda0_grid: " << join(res.lambda0_grid) << '\n';
  rep << "tuning_scores: " << join(res.cv_errors) << '\n';
  rep << "annotations: " << join(anno_names) << '\n';
  rep << "lambda: " << join(res.penalty.lambda_anno) << '\n';
  rep << "outer_iterations: " << res.outer_iterations << '\n';
  rep << "outer_converged: " << (res.outer_converged ? "true" : "false") << '\n';
  rep << "solver_sweeps: " << res.fit.iterations << '\n';
  rep << "objective_trace: " << join(res.trace) << '\n';
  rep << "threshold: " << format_double(res.selection.threshold) << '\n';
  rep << "fdp_estimate: " << format_double(res.selection.fdp_estimate) << '\n';
  rep << "selected_count: " << res.selection.selected.size() << '\n';
}

AnnotationMatrix annotations_for(const std::optional<std::string>& path, bool disabled,
                                 const std::vector<std::string>& ids, Eigen::Index p, Manifest& manifest,
                                 std::vector<std::string>& names) {
  if (!path || disabled) return AnnotationMatrix::empty(p);
  manifest.input("annotations", *path);
  AnnotationTable table = load_annotations(*path);
  require_same_ids(ids, table.snp_ids, "annotation SNP ids");
  names = table.annotations.names();
  return std::move(table.annotations);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  CommonFlags common;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  Manifest manifest("simulate");
  manifest.input("scenario", args.scenario);
  KeyValueConfig kv = KeyValueConfig::load(args.scenario);
  const std::optional<std::uint64_t> file_seed = kv.get_u64("seed");
  const std::uint64_t seed = resolve_seed(args.common.seed, file_seed, out);
  kv.set("seed", std::to_string(seed));
  const SimScenario scenario = scenario_from_config(kv);
  for (const auto& [k, v] : kv.entries()) manifest.set(k, v);

  const SimMetrics metrics = run_comparison(scenario, args.common.threads);
  const auto dir = prepare_out(args.common.out_dir);
  write_replicates_csv(dir / "replicates.csv", metrics);
  write_aggregate_csv(dir / "aggregate.csv", metrics);
  write_plot_data_csv(dir / "plot_data.csv", metrics);
  write_selections_csv(dir / "selections.csv", metrics);
  write_support_csv(dir / "support.csv", metrics);
  manifest.write(dir);
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string design;
  std::optional<std::string> annotations;
  double shrinkage = 0.0;
  bool lite = false;
  bool no_annotations = false;
  CommonFlags common;
};

int cmd_fit(const FitArgs& args, std::ostream& out, const CLI::App& cmd) {
  Manifest manifest("fit");
  const KeyValueConfig kv = load_config(args.common, {"shrinkage", "lite"}, manifest);
  PipelineConfig cfg = pipeline_config(args.common, kv, manifest, out);
  const double shrinkage = cmd.count("--shrinkage") ? args.shrinkage : kv.get_double("shrinkage").value_or(0.0);
  const bool lite = args.lite || kv.get_bool("lite").value_or(false);
  manifest.set("shrinkage", format_double(shrinkage));
  manifest.set("lite", lite ? "true" : "false");

  manifest.input("design", args.design);
  const DesignData design = load_design(args.design);
  const auto& ids = design.x.names();
  std::vector<std::string> names;
  const AnnotationMatrix a =
      annotations_for(args.annotations, args.no_annotations, ids, design.x.cols(), manifest, names);

  const LdMatrix ld = LdMatrix::from_correlation(sample_correlation(design.x.values()), shrinkage);
  const KnockoffModel model = KnockoffModel::equicorrelated(ld.sigma());
  const StandardizedMatrix knock = sample_knockoffs(design.x, model, derive_seed(cfg.seed, 0x6b));
  const PipelineResult res = lite ? annokn_lite_fit(design.y, design.x.values(), knock.values(), a, cfg)
                                  : annokn_fit(design.y, design.x.values(), knock.values(), a, cfg);
  const auto dir = prepare_out(args.common.out_dir);
  write_fit_outputs(dir, lite ? "annokn_lite" : "annokn", ids, names, res);
  manifest.write(dir);
  out << "selected " << res.selection.selected.size() << " of " << ids.size() << " at q = " << format_double(cfg.q)
      << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ fit-ss

struct FitSsArgs {
  std::string sumstats;
  std::string ld;
  std::optional<double> n;
  std::optional<std::string> annotations;
  std::optional<double> shrinkage;
  bool no_annotations = false;
  CommonFlags common;
};

int cmd_fit_ss(const FitSsArgs& args, std::ostream& out) {
  Manifest manifest("fit-ss");
  const KeyValueConfig kv = load_config(args.common, {"shrinkage", "n"}, manifest);
  PipelineConfig cfg = pipeline_config(args.common, kv, manifest, out);
  const std::optional<double> n = args.n ? args.n : kv.get_double("n");
  if (!n) throw ConfigError("n", "sample size is required (--n or config key n)");
  const double shrinkage = args.shrinkage.value_or(kv.get_double("shrinkage").value_or(0.1));
  manifest.set("n", format_double(*n));
  manifest.set("shrinkage", format_double(shrinkage));

  manifest.input("sumstats", args.sumstats);
  manifest.input("ld", args.ld);
  const SummaryStats z = load_summary_stats(args.sumstats, *n);
  z.validate();
  const LdMatrix ld = load_ld(args.ld, shrinkage);
  if (ld.size() != z.size()) {
    throw DimensionMismatch("LD matrix size vs z-scores", static_cast<std::size_t>(z.size()),
                            static_cast<std::size_t>(ld.size()));
  }
  std::vector<std::string> names;
  const AnnotationMatrix a = annotations_for(args.annotations, args.no_annotations, z.snp_ids, z.size(), manifest, names);
  const PipelineResult res = annogk_fit(z, ld, a, cfg);
  const auto dir = prepare_out(args.common.out_dir);
  write_fit_outputs(dir, a.cols() > 0 ? "annogk" : "ghostknockoff", z.snp_ids, names, res);
  manifest.write(dir);
  out << "selected " << res.selection.selected.size() << " of " << z.size() << " at q = " << format_double(cfg.q)
      << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ knockoff-gen

struct KnockoffGenArgs {
  std::optional<std::string> design;
  std::optional<std::string> ld;
  std::optional<std::string> sumstats;
  double shrinkage = 0.0;
  CommonFlags common;
};

int cmd_knockoff_gen(const KnockoffGenArgs& args, std::ostream& out) {
  Manifest manifest("knockoff-gen");
  if (args.design.has_value() == args.ld.has_value()) throw ConfigError("design", "give exactly one of --design and --ld");
  const std::uint64_t seed = resolve_seed(args.common.seed, std::nullopt, out);
  manifest.set("seed", std::to_string(seed));
  manifest.set("shrinkage", format_double(args.shrinkage));
  const auto dir = prepare_out(args.common.out_dir);

  if (args.design) {
    manifest.input("design", *args.design);
    const DesignData design = load_design(*args.design);
    const LdMatrix ld = LdMatrix::from_correlation(sample_correlation(design.x.values()), args.shrinkage);
    const KnockoffModel model = KnockoffModel::equicorrelated(ld.sigma());
    const StandardizedMatrix knock = sample_knockoffs(design.x, model, seed);
    write_design_tsv(dir / "knockoffs.tsv", design.sample_ids, knock.names(), knock.values(), design.y);
  } else {
    if (!args.sumstats) throw ConfigError("sumstats", "--ld requires --sumstats");
    manifest.input("ld", *args.ld);
    manifest.input("sumstats", *args.sumstats);
    const SummaryStats z = load_summary_stats(*args.sumstats, 2);
    z.validate();
    const LdMatrix ld = load_ld(*args.ld, args.shrinkage);
    if (ld.size() != z.size()) {
      throw DimensionMismatch("LD matrix size vs z-scores", static_cast<std::size_t>(z.size()),
                              static_cast<std::size_t>(ld.size()));
    }
    const KnockoffModel model = KnockoffModel::equicorrelated(ld.sigma());
    const Vector zm = sample_knockoff_zscores(z.z, model, seed);
    std::vector<std::string> ids = z.snp_ids;
    for (const auto& id : z.snp_ids) ids.push_back(id + "_knockoff");
    write_summary_stats(dir / "knockoff_z.tsv", ids, zm);
  }
  manifest.write(dir);
  return kExitOk;
}

// ------------------------------------------------------------------ report

struct ReportArgs {
  std::vector<std::string> selections;
  std::optional<std::string> region_map;
  CommonFlags common;
};

int cmd_report(const ReportArgs& args, std::ostream& out) {
  Manifest manifest("report");
  std::vector<std::set<std::string>> chosen;
  std::set<std::string> all_union;
  for (const auto& path : args.selections) {
    manifest.input("selection." + std::to_string(chosen.size()), path);
    const SelectionTable table = read_selection_tsv(path);
    std::set<std::string> s;
    for (std::size_t j = 0; j < table.snp_ids.size(); ++j)
      if (table.selected[j]) s.insert(table.snp_ids[j]);
    all_union.insert(s.begin(), s.end());
    chosen.push_back(std::move(s));
  }
  std::set<std::string> all_inter = chosen.empty() ? std::set<std::string>{} : chosen.front();
  for (const auto& s : chosen) {
    std::set<std::string> keep;
    for (const auto& id : all_inter)
      if (s.count(id)) keep.insert(id);
    all_inter = std::move(keep);
  }

  const auto dir = prepare_out(args.common.out_dir);
  {
    std::ofstream sum(dir / "summary.tsv", std::ios::binary);
    if (!sum) throw Error("cannot write summary.tsv");
    sum << "set\tselected\n";
    for (std::size_t i = 0; i < chosen.size(); ++i) sum << args.selections[i] << '\t' << chosen[i].size() << '\n';
    sum << "union\t" << all_union.size() << '\n';
    sum << "intersection\t" << all_inter.size() << '\n';
  }
  if (args.region_map) {
    manifest.input("region_map", *args.region_map);
    std::ifstream in(*args.region_map);
    if (!in) throw Error("cannot open " + *args.region_map);
    std::map<std::string, std::string> region_of;
    std::vector<std::string> order;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || number == 1) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(number, "expected 'snp<TAB>region'");
      const std::string region = line.substr(tab + 1);
      if (std::find(order.begin(), order.end(), region) == order.end()) order.push_back(region);
      region_of[line.substr(0, tab)] = region;
    }
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& id : all_union)
      if (region_of.count(id)) ++counts[region_of[id]].first;
    for (const auto& id : all_inter)
      if (region_of.count(id)) ++counts[region_of[id]].second;
    std::ofstream reg(dir / "regions.tsv", std::ios::binary);
    reg << "region\tunion\tintersection\n";
    for (const auto& r : order) reg << r << '\t' << counts[r].first << '\t' << counts[r].second << '\n';
  }
  manifest.write(dir);
  out << "union " << all_union.size() << ", intersection " << all_inter.size() << " over " << chosen.size()
      << " selection files\n";
  return kExitOk;
}

bool is_input_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const DimensionMismatch*>(&e) || dynamic_cast<const DuplicateSnpId*>(&e) ||
         dynamic_cast<const InvalidQ*>(&e) || dynamic_cast<const ZeroVarianceColumn*>(&e) ||
         dynamic_cast<const NonFiniteInput*>(&e);
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[digest[i] >> 4];
    s += hex[digest[i] & 15];
  }
  return s;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Annotation-informed knockoff selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.footer("Exit codes: 0 success, 1 runtime failure, 2 usage, config or input error.\n"
             "Settings precedence: command-line flags, then --config keys, then defaults.");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a simulation scenario and write CSV summaries");
  simulate->add_option("--scenario", sim.scenario, "scenario key=value file")->required()->check(CLI::ExistingFile);
  add_common(simulate, sim.common, false);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "individual-level fit from a design TSV (id <covariates> y)");
  fit_cmd->add_option("--design", fit.design, "design TSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--annotations", fit.annotations, "annotation TSV (snp <anno...>)")->check(CLI::ExistingFile);
  fit_cmd->add_option("--shrinkage", fit.shrinkage, "shrinkage of the in-sample correlation toward I");
  fit_cmd->add_flag("--lite", fit.lite, "use the lite tuning scheme");
  fit_cmd->add_flag("--no-annotations", fit.no_annotations, "ignore annotations (plain lasso knockoffs)");
  add_common(fit_cmd, fit.common, true);

  FitSsArgs ss;
  auto* ss_cmd = app.add_subcommand("fit-ss", "summary-statistics fit from z-scores and an LD matrix");
  ss_cmd->add_option("--sumstats", ss.sumstats, "z-score TSV (snp z)")->required()->check(CLI::ExistingFile);
  ss_cmd->add_option("--ld", ss.ld, "LD matrix (binary LDMX or text)")->required()->check(CLI::ExistingFile);
  ss_cmd->add_option("--n", ss.n, "GWAS sample size");
  ss_cmd->add_option("--annotations", ss.annotations, "annotation TSV (snp <anno...>)")->check(CLI::ExistingFile);
  ss_cmd->add_option("--shrinkage", ss.shrinkage, "LD shrinkage toward I in [0, 1) (default 0.1)");
  ss_cmd->add_flag("--no-annotations", ss.no_annotations, "ignore annotations (GhostKnockoff)");
  add_common(ss_cmd, ss.common, true);

  KnockoffGenArgs kg;
  auto* kg_cmd = app.add_subcommand("knockoff-gen", "write knockoff copies of a design or of z-scores");
  kg_cmd->add_option("--design", kg.design, "design TSV")->check(CLI::ExistingFile);
  kg_cmd->add_option("--ld", kg.ld, "LD matrix")->check(CLI::ExistingFile);
  kg_cmd->add_option("--sumstats", kg.sumstats, "z-score TSV, with --ld")->check(CLI::ExistingFile);
  kg_cmd->add_option("--shrinkage", kg.shrinkage, "shrinkage toward I in [0, 1)");
  add_common(kg_cmd, kg.common, false);

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "merge selection TSVs into union / intersection counts");
  rep_cmd->add_option("selections", rep.selections, "selection TSV files")->required()->check(CLI::ExistingFile);
  rep_cmd->add_option("--region-map", rep.region_map, "TSV with header, columns snp region")->check(CLI::ExistingFile);
  add_common(rep_cmd, rep.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (fit_cmd->parsed()) return cmd_fit(fit, out, *fit_cmd);
    if (ss_cmd->parsed()) return cmd_fit_ss(ss, out);
    if (kg_cmd->parsed()) return cmd_knockoff_gen(kg, out);
    if (rep_cmd->parsed()) return cmd_report(rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return is_input_error(e) ? kExitUsage : kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace annokn
