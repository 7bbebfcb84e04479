#include "cli.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rluroth");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = rluroth::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rluroth_test_" + name);
}

}  // namespace

TEST_CASE("classify") {
  const auto r = run({"classify", "--c", "1/3", "--x", "6/7"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["class"] == "uncountably-many");
  const auto& loops = j["witness"]["loops"];
  REQUIRE(loops.size() >= 2);
  CHECK(loops[0]["anchor"] == "3/7");
  CHECK(loops[1]["anchor"] == "3/7");

  const auto e = run({"classify", "--c", "1/3", "--x", "3/4", "--expansions", "10"});
  REQUIRE(e.code == 0);
  CHECK(e.json()["class"] == "countably-periodic");
  CHECK(e.json()["expansions"].size() == 2);

  const auto dot = run({"classify", "--c", "1/3", "--x", "6/7", "--emit-graph", "-"});
  CHECK(dot.out.find("\"3/7\" -> \"3/7\" [label=\"(1,3);1\"]") != std::string::npos);
  CHECK(dot.out.find("\"6/7\" -> \"5/7\" [label=\"(0,2);0,1\"]") != std::string::npos);
}

TEST_CASE("density") {
  const auto r = run({"density", "--c", "1/3", "--p", "2/5"});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["breakpoints"] == nlohmann::json::array({"1/3", "2/3", "1/1"}));
  CHECK(j["values"] == nlohmann::json::array({"9/8", "15/8"}));
  CHECK(j["merged"] == true);
  CHECK(j["p"] == "2/5");

  const auto e = run({"density", "--c", "1/4", "--p", "3/10", "--eval", "0.6"});
  CHECK(e.json()["eval"]["value"] == "8/9");
  const auto m = run({"density", "--c", "1/4", "--p", "0.3333333"});
  CHECK(m.json()["p"] == "1/3");
  CHECK(m.json()["p_mapped_from_decimal"] == true);
  const auto csv = run({"density", "--c", "1/3", "--p", "1/2", "--format", "csv"});
  CHECK(lines(csv.out) == std::vector<std::string>{"left,right,value", "1/3,2/3,9/8", "2/3,1/1,15/8"});
}

TEST_CASE("expand") {
  const auto r = run({"expand", "--c", "1/3", "--x", "3/4", "--omega", "111", "--steps", "3"});
  REQUIRE(r.code == 0);
  const auto steps = r.json()["steps"];
  REQUIRE(steps.size() == 3);
  CHECK(steps[0]["s"] == 1);
  CHECK(steps[0]["d"] == 2);
  CHECK(steps[1]["s"] == 1);
  CHECK(steps[2]["s"] == 0);
  CHECK(steps[2]["x"] == "1/1");

  const auto real = run({"expand", "--c", "1/3", "--x", "6/7", "--omega", "(011)", "--steps", "4", "--real",
                         "--format", "csv"});
  REQUIRE(real.code == 0);
  CHECK(lines(real.out)[0] == "n,omega_bit,s,d,x,p_n,q_n,theta_n");
}

TEST_CASE("expand then psi reproduces x") {
  for (const char* x : {"6/7", "3/4", "123/356", "999/1000"}) {
    const auto path = temp_file("expand.csv");
    const auto r = run({"expand", "--c", "1/3", "--x", x, "--omega", "random", "--seed", "5", "--steps", "30",
                        "--format", "csv", "--out", path.string()});
    REQUIRE(r.code == 0);
    const auto back = run({"psi", "--csv", path.string()});
    REQUIRE(back.code == 0);
    CHECK(back.json()["value"] == x);
    std::filesystem::remove(path);
  }
  const auto p = run({"psi", "--period", "(0,2)(1,2)(1,2)"});
  CHECK(p.json()["value"] == "6/7");
  const auto pre = run({"psi", "--digits", "(1,2)", "--period", "(0,2)"});
  CHECK(pre.json()["value"] == "1/2");
}

TEST_CASE("markov") {
  const auto r = run({"markov", "--c", "1/4"});
  REQUIRE(r.code == 0);
  const auto pts = r.json()["points"];
  CHECK(pts.size() == 11);
  CHECK(std::find(pts.begin(), pts.end(), "5/16") != pts.end());
}

TEST_CASE("exact statistics") {
  const auto f = run({"freq", "--c", "1/3", "--p", "1/2", "--exact"});
  REQUIRE(f.code == 0);
  CHECK(f.json()["digit"]["2"] == "13/16");
  const auto l = run({"lyapunov", "--c", "1/3", "--p", "1/2", "--exact"});
  CHECK(std::abs(l.json()["lyapunov"].get<double>() - 0.899136984685) < 1e-11);
  const auto s = run({"lyapunov", "--series", "1000000"});
  CHECK(s.json()["width"].get<double>() < 1e-4);
}

TEST_CASE("stochastic subcommands embed the seed and are deterministic") {
  for (const std::vector<std::string>& cmd :
       {std::vector<std::string>{"lyapunov", "--c", "1/3", "--p", "0.4", "--steps", "5000"},
        std::vector<std::string>{"freq", "--c", "1/3", "--p", "0.5", "--steps", "5000"},
        std::vector<std::string>{"theta-stats", "--c", "0", "--p", "0.8", "--steps", "5000"},
        std::vector<std::string>{"simulate", "--c", "1/4", "--p", "0.5", "--steps", "100", "--trajectories", "3"},
        std::vector<std::string>{"coverage", "--c", "1/3", "--p", "0.5", "--steps", "5000"},
        std::vector<std::string>{"hitting", "--c", "2/5", "--p", "0.5", "--trajectories", "100"}}) {
    auto args = cmd;
    args.insert(args.end(), {"--seed", "42"});
    const auto a = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.json()["seed"] == 42);
    CHECK(run(args).out == a.out);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    CHECK(run(threaded).out == a.out);
  }
}

TEST_CASE("csv outputs") {
  const auto t = run({"simulate", "--c", "1/3", "--steps", "10", "--trace", "5", "--format", "csv", "--x0", "6/7"});
  REQUIRE(t.code == 0);
  const auto rows = lines(t.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "trajectory,step,omega_bit,s,d,x_prev,x_next,theta");
  const auto h = run({"hitting", "--c", "1/3", "--x0", "6/7", "--trajectories", "20", "--format", "csv"});
  CHECK(lines(h.out) == std::vector<std::string>{"steps,count", "1,20"});
  const auto l = run({"lyapunov", "--c", "1/3", "--steps", "100", "--format", "csv"});
  CHECK(lines(l.out)[0] == "estimate,std_error,n_samples,reference,seed");
  const auto g = run({"theta-stats", "--c", "0", "--steps", "100", "--grid-points", "4", "--format", "csv"});
  CHECK(lines(g.out).size() == 5);
}

TEST_CASE("help documents the schemas") {
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("n,omega_bit,s,d,x_num,x_den,p_n,q_n,theta_n") != std::string::npos);
  CHECK(h.out.find("Exit codes") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == rluroth::cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == rluroth::cli::kExitUsage);
  CHECK(run({"density", "--c"}).code == rluroth::cli::kExitUsage);
  CHECK(run({"expand", "--c", "1/3", "--x", "3/4"}).code == rluroth::cli::kExitUsage);
  CHECK(run({"density", "--c", "1/3", "--format", "xml"}).code == rluroth::cli::kExitUsage);
  const auto bad_c = run({"density", "--c", "3/5"});
  CHECK(bad_c.code == rluroth::cli::kExitDomain);
  CHECK(std::count(bad_c.err.begin(), bad_c.err.end(), '\n') == 1);
  CHECK(run({"density", "--c", "1/3", "--p", "2"}).code == rluroth::cli::kExitDomain);
  CHECK(run({"expand", "--c", "1/3", "--x", "1/5", "--omega", "0"}).code == rluroth::cli::kExitDomain);
  CHECK(run({"expand", "--c", "1/3", "--x", "6/7", "--omega", "01", "--steps", "5"}).code ==
        rluroth::cli::kExitDomain);
  CHECK(run({"classify", "--c", "1/3", "--x", "6/7", "--node-cap", "2"}).code == rluroth::cli::kExitCap);
  CHECK(run({"markov", "--c", "1/3", "--cap", "3"}).code == rluroth::cli::kExitCap);
}
