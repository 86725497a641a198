#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "sclust/partition.hpp"
#include "sclust_cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = sclust::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp_root() {
  const char* env = std::getenv("SCLUST_TEST_TMP");
  fs::path root = env != nullptr ? fs::path(env) : fs::temp_directory_path() / "sclust_cli_tests";
  fs::create_directories(root);
  return root;
}

fs::path fresh(const std::string& name) {
  const auto p = tmp_root() / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_same_tree(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names_a;
  std::vector<std::string> names_b;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    names_a.push_back(fs::relative(e.path(), a).string());
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    names_b.push_back(fs::relative(e.path(), b).string());
  }
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  REQUIRE(names_a == names_b);
  for (const auto& n : names_a) {
    if (fs::is_directory(a / n)) continue;
    INFO(n);
    CHECK(slurp(a / n) == slurp(b / n));
  }
}

// Tiny planted dataset shared by the tests: 3 blocks of 10 items.
const fs::path& tiny_data() {
  static const fs::path dir = [] {
    auto d = fresh("tiny_data");
    const auto r = run_cli({"synth", "--preset", "tiny", "--seed", "5", "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::string responses() { return (tiny_data() / "responses.csv").string(); }

}  // namespace

TEST_CASE("version and usage errors") {
  const auto v = run_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(sclust::cli::version()) != std::string::npos);
  CHECK(run_cli({}).code == sclust::cli::kExitConfig);
  CHECK(run_cli({"frobnicate"}).code == sclust::cli::kExitConfig);
  CHECK(run_cli({"cluster", "--bogus"}).code == sclust::cli::kExitConfig);
  CHECK(run_cli({"cluster", "--help"}).code == 0);
}

TEST_CASE("exit codes follow the error kind") {
  const auto out = fresh("exit_codes");
  CHECK(run_cli({"cluster", "--responses", "/nonexistent.csv", "--out", out.string()}).code ==
        sclust::cli::kExitIo);
  for (const std::string sigma : {"0", "-0.5"}) {
    CHECK(run_cli({"cluster", "--responses", responses(), "--sigma", sigma, "--out",
                   out.string()})
              .code == sclust::cli::kExitConfig);
  }
  CHECK(run_cli({"spectrum", "--responses", responses(), "--sigma", "0:1:0.5", "--out",
                 out.string()})
            .code == sclust::cli::kExitConfig);
  CHECK(run_cli({"cluster", "--responses", responses(), "--distance", "euclid", "--out",
                 out.string()})
            .code == sclust::cli::kExitConfig);

  const auto bad = tmp_root() / "bad_responses.csv";
  {
    std::ofstream f(bad);
    f << "a,b,c\n1,2,3\n4,9,1\n2,2,2\n";
  }
  const auto r = run_cli({"cluster", "--responses", bad.string(), "--out", out.string()});
  CHECK(r.code == sclust::cli::kExitData);
  CHECK(r.err.find("error (cluster)") != std::string::npos);

  // k larger than the item count cannot be clustered.
  CHECK(run_cli({"cluster", "--responses", responses(), "--k", "31", "--l", "4", "--out",
                 out.string()})
            .code != 0);
}

TEST_CASE("sigma grid parsing") {
  using sclust::cli::parse_sigma_grid;
  CHECK(parse_sigma_grid("0.35:1:0.05").size() == 14);
  CHECK(parse_sigma_grid("0.35:1:0.05").back() == 1.0);
  CHECK(parse_sigma_grid("0.1:1:0.05").size() == 19);
  CHECK(parse_sigma_grid("0.5") == std::vector<double>{0.5});
  CHECK(parse_sigma_grid("0.4,0.5,0.75") == std::vector<double>{0.4, 0.5, 0.75});
  CHECK_THROWS(parse_sigma_grid("0:1:0.1"));
  CHECK_THROWS(parse_sigma_grid("1:0.5:0.1"));
  CHECK_THROWS(parse_sigma_grid("0.5:1:0"));
  CHECK_THROWS(parse_sigma_grid("a,b"));
  CHECK(sclust::cli::parse_int_list("2,3,5") == std::vector<int>{2, 3, 5});
}

TEST_CASE("cluster output does not depend on the worker count") {
  const auto a = fresh("workers_1");
  const auto b = fresh("workers_3");
  const std::vector<std::string> base = {"cluster", "--responses", responses(), "--k", "3",
                                         "--l", "2", "--n-runs", "20", "--save-matrices"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--workers", "1", "--out", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--workers", "3", "--out", b.string()});
  REQUIRE(run_cli(args_a).code == 0);
  REQUIRE(run_cli(args_b).code == 0);
  check_same_tree(a, b);
  for (const char* f : {"partition.csv", "partition.json", "spectrum.csv", "embedding.csv",
                        "config.toml", "provenance.json", "correlations.bin", "adjacency.bin"}) {
    CHECK(fs::exists(a / f));
  }
}

TEST_CASE("stability output does not depend on the worker count") {
  const auto a = fresh("stab_workers_1");
  const auto b = fresh("stab_workers_2");
  const std::vector<std::string> base = {
      "stability", "--responses", responses(), "--sigma", "0.5,0.75", "--k-min", "2",
      "--k-max",   "4",           "--l",       "2",       "--n-trials", "5",
      "--subsample-size", "20", "--reference-runs", "5", "--restarts", "3"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--workers", "1", "--out", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--workers", "2", "--out", b.string()});
  REQUIRE(run_cli(args_a).code == 0);
  REQUIRE(run_cli(args_b).code == 0);
  check_same_tree(a, b);
  CHECK(fs::exists(a / "grid_summary.csv"));
  CHECK(fs::exists(a / "grid.md"));
}

TEST_CASE("provenance records inputs, variants and seeds") {
  const auto out = fresh("provenance");
  REQUIRE(run_cli({"cluster", "--responses", responses(), "--k", "3", "--l", "2", "--seed",
                   "42", "--kernel", "plain_ratio", "--out", out.string()})
              .code == 0);
  const auto prov = nlohmann::json::parse(slurp(out / "provenance.json"));
  CHECK(prov["tool"] == "sclust");
  CHECK(prov["command"] == "cluster");
  CHECK(prov["input"]["n_items"] == 30);
  CHECK(prov["input"]["responses_fnv1a64"].get<std::string>().size() == 16);
  CHECK(prov.dump().find("plain_ratio") != std::string::npos);
  CHECK(prov.dump().find("42") != std::string::npos);
  CHECK(prov.contains("outputs"));
}

TEST_CASE("saved configuration reproduces the run") {
  const auto first = fresh("config_first");
  const auto second = fresh("config_second");
  REQUIRE(run_cli({"cluster", "--responses", responses(), "--k", "3", "--l", "2", "--sigma",
                   "0.6", "--seed", "7", "--out", first.string()})
              .code == 0);
  REQUIRE(run_cli({"--config", (first / "config.toml").string(), "cluster", "--out",
                   second.string()})
              .code == 0);
  check_same_tree(first, second);
  const auto third = fresh("config_override");
  REQUIRE(run_cli({"--config", (first / "config.toml").string(), "cluster", "--k", "4", "--out",
                   third.string()})
              .code == 0);
  CHECK(sclust::read_partition_csv(third / "partition.csv").k == 4);
}

TEST_CASE("cluster recovers the planted blocks and compare agrees with the truth") {
  const auto out = fresh("recover");
  REQUIRE(run_cli({"cluster", "--responses", responses(), "--k", "3", "--l", "2", "--out",
                   out.string()})
              .code == 0);
  const auto cmp = fresh("recover_cmp");
  REQUIRE(run_cli({"compare", "--partition-a", (out / "partition.csv").string(),
                   "--partition-b", (tiny_data() / "truth.csv").string(), "--out", cmp.string()})
              .code == 0);
  CHECK(slurp(cmp / "table.md").find("30/30 (0 off-diagonal)") != std::string::npos);

  const auto six = fresh("six");
  REQUIRE(run_cli({"cluster", "--responses", responses(), "--sigma", "0.75", "--k", "6",
                   "--out", six.string()})
              .code == 0);
  CHECK(sclust::read_partition_csv(six / "partition.csv").k == 6);
}

TEST_CASE("compare a partition with itself and with the factor baseline") {
  const auto self = fresh("self_cmp");
  const auto truth = (tiny_data() / "truth.csv").string();
  REQUIRE(run_cli({"compare", "--partition-a", truth, "--partition-b", truth, "--out",
                   self.string()})
              .code == 0);
  CHECK(slurp(self / "table.md").find("30/30 (0 off-diagonal)") != std::string::npos);
  CHECK(slurp(self / "table.md").find("Column size") != std::string::npos);

  const auto fa = fresh("fa_cmp");
  REQUIRE(run_cli({"compare", "--responses", responses(), "--metadata",
                   (tiny_data() / "metadata.csv").string(), "--partition-a", truth, "--fa-k",
                   "3", "--out", fa.string()})
              .code == 0);
  for (const char* f : {"table.csv", "table.md", "loadings.csv", "factor_partition.csv",
                        "factor_ties.csv", "annotation.md", "reassignments.csv"}) {
    CHECK(fs::exists(fa / f));
  }
  CHECK(slurp(fa / "table.md").find("30/30") != std::string::npos);

  const auto both = fresh("both_cmp");
  CHECK(run_cli({"compare", "--responses", responses(), "--partition-a", truth,
                 "--partition-b", truth, "--fa-k", "3", "--out", both.string()})
            .code == sclust::cli::kExitConfig);
}

TEST_CASE("report needs metadata") {
  const auto out = fresh("report");
  const auto truth = (tiny_data() / "truth.csv").string();
  CHECK(run_cli({"report", "--responses", responses(), "--partition-a", truth, "--fa-k", "3",
                 "--out", out.string()})
            .code == sclust::cli::kExitConfig);
  REQUIRE(run_cli({"report", "--responses", responses(), "--metadata",
                   (tiny_data() / "metadata.csv").string(), "--partition-a", truth, "--fa-k",
                   "3", "--out", out.string()})
              .code == 0);
  CHECK(fs::exists(out / "report.md"));
}

TEST_CASE("spectrum writes one series per sigma") {
  const auto out = fresh("spectrum_one");
  REQUIRE(run_cli({"spectrum", "--responses", responses(), "--sigma", "0.5", "--l-probe", "5",
                   "--out", out.string()})
              .code == 0);
  CHECK(fs::exists(out / "eigenvalues_sigma_0.5.csv"));
  std::ifstream in(out / "eigenvalues.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "sigma,index,eigenvalue");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("0.5,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 6);
  const auto summary = slurp(out / "summary.csv");
  CHECK(summary.find("0.5,") != std::string::npos);
}

TEST_CASE("synth is reproducible and honors missing fractions") {
  const auto a = fresh("synth_a");
  const auto b = fresh("synth_b");
  REQUIRE(run_cli({"synth", "--preset", "tiny", "--seed", "3", "--missing-fraction", "0.01",
                   "--out", a.string()})
              .code == 0);
  REQUIRE(run_cli({"synth", "--preset", "tiny", "--seed", "3", "--missing-fraction", "0.01",
                   "--out", b.string()})
              .code == 0);
  check_same_tree(a, b);
  const auto text = slurp(a / "responses.csv");
  CHECK(text.find(",,") != std::string::npos);

  const auto spec = tmp_root() / "spec.toml";
  {
    std::ofstream f(spec);
    f << "block_sizes = 4,4\nn_subjects = 50\nwithin_r = 0.5\nseed = 9\n";
  }
  const auto c = fresh("synth_spec");
  REQUIRE(run_cli({"synth", "--spec", spec.string(), "--out", c.string()}).code == 0);
  CHECK(sclust::read_partition_csv(c / "truth.csv").k == 2);

  const auto bad_spec = tmp_root() / "bad_spec.toml";
  {
    std::ofstream f(bad_spec);
    f << "block_sizes = 4,4\nn_subjects = 50\nwithin_r = 1.5\n";
  }
  CHECK(run_cli({"synth", "--spec", bad_spec.string(), "--out", fresh("synth_bad").string()})
            .code == sclust::cli::kExitConfig);
}
