#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"

#include "cli.hpp"
#include "sigkit/io.hpp"

namespace {

namespace fs = std::filesystem;
using sigkit::io::json;

struct Workspace {
  fs::path dir;

  Workspace() {
    dir = fs::temp_directory_path() / ("sigkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string file(const std::string& name, const std::string& body) const {
    const auto p = dir / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sigkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "json"});
  const auto r = run(args);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

const Workspace& ws() {
  static const Workspace w;
  return w;
}

const std::string& s1() {
  static const auto p = ws().file("s1.json", R"j({"n": 4, "path_sets": [[1, 2]]})j");
  return p;
}
const std::string& s2() {
  static const auto p = ws().file("s2.json", R"j({"n": 4, "path_sets": [[2, 4], [3, 4]]})j");
  return p;
}
const std::string& iid_exp() {
  static const auto p = ws().file("iid.json", R"j({"n": 4, "kind": "iid", "marginal": {"exponential": 1.0}})j");
  return p;
}
const std::string& rates12() {
  static const auto p = ws().file(
      "rates12.json", R"j({"n": 2, "kind": "independent", "marginals": [{"exponential": 1}, {"exponential": 2}]})j");
  return p;
}

}  // namespace

TEST_CASE("signature command") {
  auto r = run({"signature", s1()});
  CHECK(r.code == 0);
  CHECK(r.out == "signature: 6/12 4/12 2/12 0\ntail: 1 6/12 2/12 0 0\n");

  const auto series2 = ws().file("series2.json", R"j({"n": 2, "truth_table": "0001"})j");
  r = run({"signature", series2});
  CHECK(r.code == 0);
  CHECK(r.out.starts_with("signature: 1 0\n"));

  const auto j = run_json({"signature", s1()});
  CHECK(j["signature"] == json({"1/2", "1/3", "1/6", "0/1"}));
  CHECK(j["metadata"]["quality"] == "q0");
}

TEST_CASE("signature command with a model") {
  const auto model = ws().file("m2.json", R"j({"n": 2, "probs": {"(1,2)": "3/10", "(2,1)": "7/10"}})j");
  const auto x1 = ws().file("x1.json", R"j({"n": 2, "path_sets": [[1]]})j");
  const auto j = run_json({"signature", x1, "--model", model});
  CHECK(j["signature"] == json({"3/10", "7/10"}));
  CHECK(j["metadata"]["quality"] == "model");
}

TEST_CASE("input errors exit 2 with context") {
  const auto bad = ws().file("bad.json", "{\"n\": 4, \"path_sets\": [[1, 2]");
  auto r = run({"signature", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.json") != std::string::npos);
  CHECK(r.err.find("malformed JSON") != std::string::npos);

  const auto wrong = ws().file("wrong.json", R"j({"n": 3, "path_sets": [[1], [2, "x"]]})j");
  r = run({"signature", wrong});
  CHECK(r.code == 2);
  CHECK(r.err.find("/path_sets/1/1") != std::string::npos);

  CHECK(run({"signature", (ws().dir / "missing.json").string()}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--format", "yaml", "signature", s1()}).code == 2);
}

TEST_CASE("joint command reproduces the reference matrices") {
  const auto r = run({"joint", s1(), s2()});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "tail:\n(1/12) x\n12  9  4  0  0\n 6  3  1  0  0\n 2  1  0  0  0\n 0  0  0  0  0\n 0  0  0  0  0\n"
        "signature:\n(1/12) x\n0 3 3 0\n2 1 1 0\n1 1 0 0\n0 0 0 0\n");
  const auto j = run_json({"joint", s1(), s2()});
  CHECK(j["signature"][0] == json({"0/1", "1/4", "1/4", "0/1"}));
  CHECK(j["tail"][0][1] == "3/4");
}

TEST_CASE("joint command edge cases") {
  const auto j = run_json({"joint", s2(), s2()});
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      if (k != l) CHECK(j["signature"][k][l] == "0/1");
    }
  }
  const auto small = ws().file("small.json", R"j({"n": 2, "path_sets": [[1]]})j");
  const auto r = run({"joint", s1(), small});
  CHECK(r.code == 2);
  CHECK(r.err.find("differ in n") != std::string::npos);
  CHECK(run({"joint", s1()}).code == 2);
}

TEST_CASE("multi and q0 commands") {
  const auto two = run_json({"multi", s1(), s2()});
  const auto joint = run_json({"joint", s1(), s2()});
  for (const auto& cell : two["nonzero_tail"]) {
    CHECK(joint["tail"][cell["index"][0].get<int>()][cell["index"][1].get<int>()] == cell["value"]);
  }
  CHECK(run({"q0", "--n", "4", "1,2", "2"}).out == "1/12\n");
  CHECK(run({"q0", "--n", "3", "1,2", "3"}).out == "0\n");
  CHECK(run({"q0", "--n", "3", "1,x"}).code == 2);
  CHECK(run({"q0", "--n", "3", "4"}).code == 2);
}

TEST_CASE("simulate command") {
  const std::vector<std::string> args = {"simulate", s1(), s2(), "--lifetimes", iid_exp(), "-N", "20000", "--seed", "99"};
  const auto a = run(args);
  const auto b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  auto threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "3"});
  CHECK(run(threaded).out == a.out);

  auto other = args;
  other.back() = "100";
  CHECK(run(other).out != a.out);

  auto with_compare = args;
  with_compare.push_back("--compare");
  const auto j = run_json(with_compare);
  CHECK(j["metadata"]["samples"] == 20000);
  CHECK(j["max_standard_errors_from_structure_signature"].get<double>() < 5.0);

  auto zero = args;
  zero[6] = "0";
  const auto r = run(zero);
  CHECK(r.code == 2);
  CHECK(r.err.find("samples") != std::string::npos);
}

TEST_CASE("decompose-check command") {
  const auto iid = run_json({"decompose-check", s1(), s2(), "--lifetimes", iid_exp(), "--grid", "0:2:5"});
  CHECK(iid["points"].size() == 25);
  CHECK(iid["max_residual"].get<double>() <= 1e-10);
  CHECK(iid["decomposition_fails"] == false);

  const auto x1 = ws().file("x1.json", R"j({"n": 2, "path_sets": [[1]]})j");
  const auto x1x2 = ws().file("x1x2.json", R"j({"n": 2, "path_sets": [[1, 2]]})j");
  const auto r = run({"decompose-check", x1, x1x2, "--lifetimes", rates12(), "--grid", "0,0.5,1,2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("decomposition fails") != std::string::npos);
  const auto ce = run_json({"decompose-check", x1, x1x2, "--lifetimes", rates12(), "--grid", "0,0.5,1,2"});
  CHECK(ce["max_residual"].get<double>() > 1e-6);

  const auto diag = run_json({"decompose-check", x1, x1x2, "--lifetimes", rates12(), "--grid", "1,1,2"});
  for (const auto& p : diag["points"]) {
    if (p["t1"] == p["t2"]) CHECK(p["residual"].get<double>() <= 1e-12);
  }

  CHECK(run({"decompose-check", x1, x1x2, "--lifetimes", rates12(), "--grid", "-1,2"}).code == 2);
  CHECK(run({"decompose-check", x1, x1x2, "--lifetimes", rates12(), "--grid", "0:1"}).code == 2);
  CHECK(run({"decompose-check", x1, x1x2, "--lifetimes", iid_exp()}).code == 2);
}

TEST_CASE("check-cond12 command") {
  const auto iid = run_json({"check-cond12", "--lifetimes", iid_exp(), "--t1", "0.5", "--t2", "1.5"});
  CHECK(iid["joint_invariance"]["holds"] == true);
  CHECK(iid["state_exchangeability"]["holds"] == true);

  const auto ind = run_json({"check-cond12", "--lifetimes", rates12(), "--t1", "1", "--t2", "2"});
  CHECK(ind["joint_invariance"]["holds"] == false);
  CHECK(ind["joint_invariance"]["witness"]["sigma"] == json({2, 1}));
  CHECK(ind["state_exchangeability"]["holds"] == false);

  const auto mixture = ws().file("mix.json", R"j({"n": 3, "kind": "exchangeable-mixture", "components": [
    {"weight": 0.5, "marginal": {"exponential": 1}}, {"weight": 0.5, "marginal": {"uniform": 2}}]})j");
  const auto emp = run_json(
      {"check-cond12", "--lifetimes", mixture, "--t1", "0.5", "--t2", "1", "--samples", "200000", "--seed", "5"});
  CHECK(emp["metadata"]["states"] == "empirical");
  CHECK(emp["joint_invariance"]["holds"] == true);
}

TEST_CASE("SIGKIT_THREADS is validated") {
  ::setenv("SIGKIT_THREADS", "0", 1);
  CHECK(run({"signature", s1()}).code == 2);
  ::setenv("SIGKIT_THREADS", "2", 1);
  CHECK(run({"signature", s1()}).code == 0);
  ::unsetenv("SIGKIT_THREADS");
}
