#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <sys/wait.h>

#include "annokn/cli.hpp"
#include "annokn/io.hpp"
#include "annokn/knockoff_filter.hpp"
#include "support.hpp"

using namespace annokn;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "annokn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// n x p design where columns 0, 5 and 10 drive y; annotation "hot" marks them.
void write_toy_inputs(const test::TempDir& dir, int n, int p) {
  const Matrix x = test::random_matrix(31, n, p);
  Vector y = 1.2 * (x.col(0) + x.col(5) - x.col(10)) + test::random_vector(32, n);
  std::vector<std::string> ids, names;
  for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  for (int j = 0; j < p; ++j) names.push_back("snp" + std::to_string(j));
  write_design_tsv(dir / "design.tsv", ids, names, x, y);

  Matrix a(p, 2);
  for (int j = 0; j < p; ++j) {
    a(j, 0) = (j % 5 == 0) ? 1.0 : 0.0;
    a(j, 1) = std::sin(0.7 * j);
  }
  write_annotations_tsv(dir / "anno.tsv", names, {"hot", "wave"}, a);
}

std::string manifest_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  return {};
}

}  // namespace

TEST_CASE("help and version exit 0; bad usage exits 2") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"fit", "--help"}).code == kExitOk);
  const auto v = run({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find(kToolVersion) != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  test::TempDir dir("cli_usage");
  write_toy_inputs(dir, 50, 4);
  CHECK(run({"fit", "--design", (dir / "design.tsv").string(), "--out", dir.path().string(), "--bogus"}).code ==
        kExitUsage);
  CHECK(run({"fit", "--design", (dir / "missing.tsv").string(), "--out", dir.path().string()}).code == kExitUsage);
}

TEST_CASE("fit on a 200 x 20 design with 2 annotations") {
  test::TempDir dir("cli_fit");
  write_toy_inputs(dir, 200, 20);
  const auto out = dir / "fit";
  const auto r = run({"fit", "--design", (dir / "design.tsv").string(), "--annotations", (dir / "anno.tsv").string(),
                      "--q", "0.2", "--seed", "5", "--lambda0-grid", "auto:8:0.05", "--out", out.string()});
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("seed:") == std::string::npos);

  const SelectionTable table = read_selection_tsv((out / "selection.tsv").string());
  REQUIRE(table.snp_ids.size() == 20);
  CHECK(table.snp_ids.front() == "snp0");
  for (std::size_t j = 0; j < table.snp_ids.size(); ++j)
    if (table.selected[j]) CHECK(table.q_values(static_cast<Eigen::Index>(j)) <= 0.2);

  const std::string report = test::read_file(out / "report.txt");
  CHECK(manifest_value(report, "method") == "annokn");
  CHECK(manifest_value(report, "annotations") == "hot,wave");
  CHECK(manifest_value(report, "q") == "0.2");

  const std::string manifest = test::read_file(out / "manifest.txt");
  CHECK(manifest_value(manifest, "command") == "fit");
  CHECK(manifest_value(manifest, "tool_version") == kToolVersion);
  CHECK(manifest_value(manifest, "config.seed") == "5");
  CHECK(manifest_value(manifest, "config.q") == "0.2");
  CHECK(manifest_value(manifest, "config.lambda0_grid") == "auto:8:0.05");
  CHECK(manifest_value(manifest, "input.design").find("sha256=" + sha256_file(dir / "design.tsv")) !=
        std::string::npos);
  CHECK_FALSE(manifest_value(manifest, "input.annotations").empty());
  CHECK_FALSE(manifest_value(manifest, "wall_time_seconds").empty());

  SUBCASE("same seed reproduces the selection file") {
    const auto again = dir / "fit2";
    REQUIRE(run({"fit", "--design", (dir / "design.tsv").string(), "--annotations", (dir / "anno.tsv").string(),
                 "--q", "0.2", "--seed", "5", "--lambda0-grid", "auto:8:0.05", "--out", again.string()})
                .code == kExitOk);
    CHECK(test::read_file(again / "selection.tsv") == test::read_file(out / "selection.tsv"));
  }
}

TEST_CASE("fit flags override config keys") {
  test::TempDir dir("cli_config");
  write_toy_inputs(dir, 120, 8);
  const auto cfg = dir.write("run.cfg", "q = 0.3\nseed = 11\nlambda0_grid = auto:5:0.1\nlite = true\n");
  const auto out = dir / "o";
  const auto r = run({"fit", "--design", (dir / "design.tsv").string(), "--config", cfg.string(), "--q", "0.15",
                      "--out", out.string()});
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  const std::string manifest = test::read_file(out / "manifest.txt");
  CHECK(manifest_value(manifest, "config.q") == "0.15");
  CHECK(manifest_value(manifest, "config.seed") == "11");
  CHECK(manifest_value(manifest, "config.lite") == "true");
  CHECK(manifest_value(test::read_file(out / "report.txt"), "method") == "annokn_lite");

  const auto bad = dir.write("bad.cfg", "qq = 0.3\n");
  const auto rb = run({"fit", "--design", (dir / "design.tsv").string(), "--config", bad.string(), "--out",
                       out.string()});
  CHECK(rb.code == kExitUsage);
  CHECK(rb.err.find("qq") != std::string::npos);

  const auto rq = run({"fit", "--design", (dir / "design.tsv").string(), "--q", "1.5", "--seed", "1", "--out",
                       out.string()});
  CHECK(rq.code == kExitUsage);
}

TEST_CASE("an absent seed is generated, printed and recorded") {
  test::TempDir dir("cli_seed");
  write_toy_inputs(dir, 60, 5);
  const auto r = run({"knockoff-gen", "--design", (dir / "design.tsv").string(), "--out", (dir / "k").string()});
  REQUIRE(r.code == kExitOk);
  REQUIRE(r.out.rfind("seed: ", 0) == 0);
  const std::string printed = r.out.substr(6, r.out.find('\n') - 6);
  CHECK(manifest_value(test::read_file(dir / "k" / "manifest.txt"), "config.seed") == printed);
}

TEST_CASE("fit-ss with a mismatched LD size names both dimensions") {
  test::TempDir dir("cli_ss");
  dir.write("z.tsv", "snp\tz\na\t1.5\nb\t-0.2\nc\t3.1\nd\t0.4\ne\t-2.2\n");
  write_ld_text(dir / "ld.txt", test::ar1(4, 0.3));
  const auto r = run({"fit-ss", "--sumstats", (dir / "z.tsv").string(), "--ld", (dir / "ld.txt").string(), "--n",
                      "1000", "--seed", "1", "--out", (dir / "o").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find('5') != std::string::npos);
  CHECK(r.err.find('4') != std::string::npos);

  const auto missing_n = run({"fit-ss", "--sumstats", (dir / "z.tsv").string(), "--ld", (dir / "ld.txt").string(),
                              "--seed", "1", "--out", (dir / "o").string()});
  CHECK(missing_n.code == kExitUsage);
  CHECK(missing_n.err.find("'n'") != std::string::npos);
}

TEST_CASE("fit-ss end to end on binary LD") {
  test::TempDir dir("cli_ss_ok");
  const int p = 30;
  const Matrix sigma = test::ar1(p, 0.4);
  Vector beta = Vector::Zero(p);
  beta(3) = beta(12) = beta(25) = 0.12;
  const double n = 2000;
  const Matrix chol = sigma.llt().matrixL();
  const Vector z = std::sqrt(n) * sigma * beta + chol * test::random_vector(8, p);
  std::vector<std::string> ids;
  for (int j = 0; j < p; ++j) ids.push_back("rs" + std::to_string(j));
  write_summary_stats(dir / "z.tsv", ids, z);
  write_ld_binary(dir / "ld.bin", sigma);
  Matrix a(p, 1);
  for (int j = 0; j < p; ++j) a(j, 0) = (j == 3 || j == 12 || j == 25) ? 1.0 : 0.0;
  write_annotations_tsv(dir / "a.tsv", ids, {"mark"}, a);

  const auto r = run({"fit-ss", "--sumstats", (dir / "z.tsv").string(), "--ld", (dir / "ld.bin").string(), "--n",
                      "2000", "--annotations", (dir / "a.tsv").string(), "--seed", "3", "--lambda0-grid",
                      "auto:6:0.05", "--out", (dir / "o").string()});
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  CHECK(manifest_value(test::read_file(dir / "o" / "report.txt"), "method") == "annogk");
  CHECK(manifest_value(test::read_file(dir / "o" / "manifest.txt"), "config.shrinkage") == "0.1");
  CHECK(read_selection_tsv((dir / "o" / "selection.tsv").string()).snp_ids.size() == static_cast<std::size_t>(p));

  const auto plain = run({"fit-ss", "--sumstats", (dir / "z.tsv").string(), "--ld", (dir / "ld.bin").string(),
                          "--n", "2000", "--no-annotations", "--seed", "3", "--lambda0-grid", "auto:6:0.05", "--out",
                          (dir / "g").string()});
  REQUIRE(plain.code == kExitOk);
  CHECK(manifest_value(test::read_file(dir / "g" / "report.txt"), "method") == "ghostknockoff");
}

TEST_CASE("knockoff-gen writes knockoff z-scores") {
  test::TempDir dir("cli_kg");
  dir.write("z.tsv", "snp\tz\na\t1.5\nb\t-0.2\nc\t3.1\n");
  write_ld_text(dir / "ld.txt", test::ar1(3, 0.3));
  const auto r = run({"knockoff-gen", "--ld", (dir / "ld.txt").string(), "--sumstats", (dir / "z.tsv").string(),
                      "--seed", "2", "--out", (dir / "o").string()});
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  const std::string text = test::read_file(dir / "o" / "knockoff_z.tsv");
  CHECK(text.rfind("snp\tz\na\t1.5\n", 0) == 0);
  CHECK(text.find("c_knockoff\t") != std::string::npos);

  CHECK(run({"knockoff-gen", "--seed", "2", "--out", (dir / "o").string()}).code == kExitUsage);
}

TEST_CASE("report over 10 selection files") {
  test::TempDir dir("cli_report");
  std::vector<std::string> args = {"report"};
  std::vector<std::size_t> counts;
  for (int f = 0; f < 10; ++f) {
    std::string text = "snp\tw\tq_value\tselected\n";
    std::size_t count = 0;
    for (int j = 0; j < 12; ++j) {
      const bool chosen = (j * 7 + f * 3) % 5 < 2;
      count += chosen;
      text += "v" + std::to_string(j) + "\t0.5\t" + (chosen ? "0.05" : "1") + '\t' + (chosen ? "1" : "0") + '\n';
    }
    counts.push_back(count);
    args.push_back(dir.write("sel" + std::to_string(f) + ".tsv", text).string());
  }
  std::string regions = "snp\tregion\n";
  for (int j = 0; j < 12; ++j) regions += "v" + std::to_string(j) + "\tr" + std::to_string(j / 4) + '\n';
  args.push_back("--region-map");
  args.push_back(dir.write("regions.tsv", regions).string());
  args.push_back("--out");
  args.push_back((dir / "o").string());

  const auto r = run(args);
  INFO(r.err);
  REQUIRE(r.code == kExitOk);
  std::istringstream summary(test::read_file(dir / "o" / "summary.tsv"));
  std::string line;
  std::getline(summary, line);
  CHECK(line == "set\tselected");
  std::size_t uni = 0, inter = 0;
  std::vector<std::size_t> listed;
  while (std::getline(summary, line)) {
    const auto tab = line.find('\t');
    const std::size_t v = std::stoul(line.substr(tab + 1));
    if (line.rfind("union", 0) == 0) uni = v;
    else if (line.rfind("intersection", 0) == 0) inter = v;
    else listed.push_back(v);
  }
  CHECK(listed == counts);
  for (std::size_t c : counts) {
    CHECK(uni >= c);
    CHECK(inter <= c);
  }
  CHECK(uni == 12);

  const std::string reg = test::read_file(dir / "o" / "regions.tsv");
  CHECK(reg.rfind("region\tunion\tintersection\nr0\t4\t", 0) == 0);
}

TEST_CASE("simulate: required keys, determinism and thread invariance") {
  test::TempDir dir("cli_sim");
  const auto missing = dir.write("missing.cfg", "p = 10\nn_causal = 2\namplitude = 3\n");
  const auto rm = run({"simulate", "--scenario", missing.string(), "--seed", "1", "--out", (dir / "m").string()});
  CHECK(rm.code == kExitUsage);
  CHECK(rm.err.find("'n'") != std::string::npos);

  const auto scenario = dir.write("s.cfg",
                                  "n = 150\np = 16\nrho = 0.3\nn_causal = 3\namplitude = 4\nannotation = index\n"
                                  "replicates = 2\nmethods = knockoffs,annokn,annogk\nq_grid = 0.1,0.2\n"
                                  "lambda0_grid = auto:5:0.05\n");
  auto sim = [&](const std::string& out, const std::string& threads) {
    const auto r = run({"simulate", "--scenario", scenario.string(), "--seed", "9", "--threads", threads, "--out",
                        (dir / out).string()});
    INFO(r.err);
    REQUIRE(r.code == kExitOk);
  };
  sim("a", "1");
  sim("b", "1");
  sim("c", "2");
  for (const char* file : {"replicates.csv", "aggregate.csv", "plot_data.csv", "selections.csv", "support.csv"}) {
    CAPTURE(file);
    const std::string a = test::read_file(dir / "a" / file);
    CHECK_FALSE(a.empty());
    CHECK(a == test::read_file(dir / "b" / file));
    CHECK(a == test::read_file(dir / "c" / file));
  }
  const std::string agg = test::read_file(dir / "a" / "aggregate.csv");
  CHECK(agg.rfind("method,q,mean_power,se_power,mean_fdp,se_fdp\n", 0) == 0);
  CHECK(agg.find("annogk,0.2,") != std::string::npos);
  CHECK(manifest_value(test::read_file(dir / "a" / "manifest.txt"), "config.seed") == "9");
}

TEST_CASE("sha256 of known content") {
  test::TempDir dir("cli_sha");
  CHECK(sha256_file(dir.write("abc", "abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_file(dir.write("empty", "")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

#ifdef ANNOKN_CLI_PATH
TEST_CASE("installed binary maps input errors to exit code 2") {
  test::TempDir dir("cli_bin");
  const auto cfg = dir.write("s.cfg", "p = 10\n");
  const std::string cmd = std::string("\"") + ANNOKN_CLI_PATH + "\" simulate --scenario \"" + cfg.string() +
                          "\" --seed 1 --out \"" + (dir / "o").string() + "\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == kExitUsage);
}
#endif
