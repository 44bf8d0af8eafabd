// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string command = env + " '" SPLITEQ_CLI_PATH "' " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe);
  Run run;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) run.output += buf;
  const int status = pclose(pipe);
  run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return run;
}

fs::path dir() {
  const auto d = fs::temp_directory_path() / "spliteq_cli_test";
  fs::create_directories(d);
  return d;
}

std::string path(const std::string& name) { return (dir() / name).string(); }

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

const std::string& problem() {
  static const std::string p = [] {
    const std::string out = path("prob.json");
    const auto r = cli("generate --n 3 --m 2 --d1 4 --d2 3 --seed 7 --unique -o " + out);
    REQUIRE(r.code == 0);
    return out;
  }();
  return p;
}

}  // namespace

TEST_CASE("version") {
  const auto r = cli("version");
  CHECK(r.code == 0);
  CHECK(r.output.find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("generate --n 0 --m 2 --d1 4 --d2 3 --seed 7 -o " + path("zero.json")).code == 2);
  CHECK_FALSE(fs::exists(path("zero.json")));
  CHECK(cli("solve " + problem() + " --mode sideways").code == 2);
  CHECK(cli("solve " + problem() + " --x0 1,2").code == 2);
}

TEST_CASE("generate writes a certified, reproducible file") {
  const auto& p = problem();
  REQUIRE(fs::exists(p));
  const auto doc = nlohmann::json::parse(slurp(p));
  CHECK(doc["f"].size() == 3);
  CHECK(doc["F"].size() == 2);
  const auto again = path("prob_again.json");
  const auto r = cli("generate --n 3 --m 2 --d1 4 --d2 3 --seed 7 --unique -o " + again);
  CHECK(r.code == 0);
  CHECK(slurp(again) == slurp(p));
  CHECK(cli("validate " + p).code == 0);
}

TEST_CASE("solve weak") {
  const auto trace = path("weak.csv");
  const auto solution = path("weak.json");
  const auto r = cli("solve " + problem() + " --mode weak --tol 1e-6 --trace " + trace +
                     " --solution " + solution);
  REQUIRE(r.code == 0);
  const auto rows = read_csv(trace);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"n", "residual", "dist_to_known_solution",
                                             "norm_zbar_minus_x", "norm_wbar_minus_Azbar",
                                             "inner_iters_total", "halfspace_count",
                                             "elapsed_ms"});
  CHECK(std::stod(rows.back()[2]) <= 1e-4);
  CHECK(std::stod(rows.back()[1]) <= 1e-6);

  const auto doc = nlohmann::json::parse(slurp(solution));
  CHECK(doc["status"] == "converged");
  CHECK(doc["x"].size() == 4);
  CHECK(doc["iterations"].get<std::size_t>() + 2 == rows.size());
  CHECK(doc["config"]["tol_residual"].get<double>() == 1e-6);
}

TEST_CASE("solve hybrid records two cuts per iteration") {
  const auto trace = path("hybrid.csv");
  const auto r = cli("solve " + problem() + " --mode hybrid --trace " + trace);
  REQUIRE(r.code == 0);
  const auto rows = read_csv(trace);
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stoul(rows[i][6]) == 2 * std::stoul(rows[i][0]));
  }
}

TEST_CASE("bound violations") {
  const auto blocked = cli("solve " + problem() + " --lambda 10");
  CHECK(blocked.code == 1);

  const auto forced = cli("solve " + problem() + " --lambda 10 --force --max-iter 200");
  CHECK((forced.code == 3 || forced.code == 0));
  CHECK(forced.output.find("lambda") != std::string::npos);
  CHECK(forced.output.find("warning") != std::string::npos);

  CHECK(cli("validate " + problem() + " --lambda 10").code == 1);
}

TEST_CASE("validate rejects a non-monotone F and names it") {
  auto doc = nlohmann::json::parse(slurp(problem()));
  doc["F"][1]["M"] = {{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto edited = path("edited.json");
  std::ofstream(edited) << doc.dump();
  const auto r = cli("validate " + edited);
  CHECK(r.code == 1);
  CHECK(r.output.find("F[1]") != std::string::npos);
}

TEST_CASE("lambda at the exact boundary fails validation") {
  // f(x,y) = (y - x) x has c1 = c2 = 1/2, so the bound is lambda < 1.
  const auto scalar = path("scalar.json");
  std::ofstream(scalar) << R"({"version": 1, "d1": 1, "d2": 1, "A": [[1]],
    "C": {"kind": "box", "lo": [-10], "hi": [10]},
    "Q": {"kind": "box", "lo": [-10], "hi": [10]},
    "f": [{"P": [[1]], "Q": [[0]], "q": [0]}],
    "F": [{"M": [[1]], "b": [0]}], "known_solution": [0]})";
  CHECK(cli("validate " + scalar + " --lambda 1").code == 1);
  CHECK(cli("validate " + scalar + " --lambda 0.999").code == 0);
}

TEST_CASE("invalid files exit 2") {
  const auto broken = path("broken.json");
  std::ofstream(broken) << "{ not json";
  const auto r = cli("solve " + broken);
  CHECK(r.code == 2);
  CHECK_FALSE(r.output.empty());
  CHECK(cli("validate " + path("does_not_exist.json")).code == 2);
}

TEST_CASE("worker count leaves the trace unchanged") {
  std::string reference;
  for (const char* workers : {"1", "2", "8"}) {
    const auto trace = path(std::string("w") + workers + ".csv");
    const auto r = cli("solve " + problem() + " --mode hybrid --no-timing --workers " +
                       workers + " --trace " + trace);
    REQUIRE(r.code == 0);
    if (reference.empty()) reference = slurp(trace);
    CHECK(slurp(trace) == reference);
  }
  const auto env_trace = path("env.csv");
  CHECK(cli("solve " + problem() + " --mode hybrid --no-timing --trace " + env_trace,
            "SPLIT_EQ_WORKERS=3")
            .code == 0);
  CHECK(slurp(env_trace) == reference);
}

TEST_CASE("max-iter exits 3") {
  const auto r = cli("solve " + problem() + " --max-iter 2");
  CHECK(r.code == 3);
}
