/*
 * Copyright (c) 2026, The fedcsp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fedcsp/cli/cli.hh"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = fedcsp::cli::RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path Scratch() {
  fs::path dir = fs::temp_directory_path() / "fedcsp_cli_test";
  fs::create_directories(dir);
  return dir;
}

struct Golden {
  std::string name;
  int code;
  std::vector<std::string> args;
};

const std::vector<Golden>& Goldens() {
  static const std::vector<Golden> cases = {
      {"check_ce3_all", 0,
       {"check", "--model", "centralised", "--nodes", "3", "--server-id", "2", "--assert", "all"}},
      {"check_de2_all_bfs", 0,
       {"check", "--model", "decentralised", "--nodes", "2", "--assert", "all", "--search",
        "bfs"}},
      {"check_ce3_extra", 1,
       {"check", "--model", "centralised", "--nodes", "3", "--server-id", "2", "--mutation",
        "expect-extra-update", "--assert", "deadlockfree", "--search", "bfs"}},
      {"check_ce2_skip", 1,
       {"check", "--model", "centralised", "--nodes", "2", "--mutation", "skip-reply", "--assert",
        "all"}},
      {"check_de3_strict", 1,
       {"check", "--model", "decentralised", "--nodes", "3", "--mutation", "strict-phase-order",
        "--assert", "always-eventually-terminated"}},
      {"sim_ce3_mean", 0,
       {"sim", "--model", "centralised", "--nodes", "3", "--server-id", "2", "--seed", "42",
        "--ldata", "0,1,2", "--sfun", "mean"}},
      {"sim_ce3_sum_iters", 0,
       {"sim", "--model", "centralised", "--nodes", "3", "--server-id", "2", "--seed", "42",
        "--ldata", "0,1,2", "--sfun", "sum", "--iters", "2"}},
      {"sim_de1", 0, {"sim", "--model", "decentralised", "--nodes", "1", "--seed", "7"}},
      {"sim_de3_conf", 0,
       {"sim", "--model", "decentralised", "--nodes", "3", "--seed", "9", "--conformance"}},
  };
  return cases;
}

}  // namespace

TEST_CASE("golden reports and traces, three repeats") {
  const fs::path golden = FEDCSP_GOLDEN_DIR;
  for (const auto& g : Goldens()) {
    CAPTURE(g.name);
    const fs::path want_trace = golden / (g.name + ".trace.jsonl");
    for (int rep = 0; rep < 3; ++rep) {
      const fs::path trace = Scratch() / (g.name + ".jsonl");
      fs::remove(trace);
      auto args = g.args;
      args.push_back("--trace-out");
      args.push_back(trace.string());
      auto r = Cli(args);
      CHECK(r.code == g.code);
      CHECK(r.out == Slurp(golden / (g.name + ".out")));
      CHECK(fs::exists(trace) == fs::exists(want_trace));
      if (fs::exists(want_trace)) CHECK(Slurp(trace) == Slurp(want_trace));
    }
  }
}

TEST_CASE("report schema") {
  using json = nlohmann::ordered_json;
  auto r = Cli({"check", "--model", "centralised", "--nodes", "3", "--server-id", "2", "--assert",
                "deadlockfree", "--timing"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"model", "nodes", "serverId", "assertion", "strategy",
                                         "verdict", "states", "transitions", "elapsedMs"});

  auto v = json::parse(Cli({"check", "--model", "centralised", "--nodes", "2", "--mutation",
                            "skip-reply", "--assert", "reaches-terminated"})
                           .out);
  CHECK(v["verdict"] == "violated");
  CHECK(!v.contains("counterexample"));
  auto d = json::parse(
      Cli({"check", "--model", "decentralised", "--nodes", "2", "--assert", "deadlockfree"}).out);
  CHECK(!d.contains("serverId"));

  auto lasso = json::parse(Slurp(FEDCSP_GOLDEN_DIR "/check_de3_strict.out"));
  CHECK(lasso["counterexample"].contains("cycleStart"));
  std::istringstream lines(Slurp(FEDCSP_GOLDEN_DIR "/check_de3_strict.trace.jsonl"));
  std::string line;
  while (std::getline(lines, line)) CHECK(json::parse(line).contains("cycleStart"));
}

TEST_CASE("exit code 2 on usage errors") {
  const std::vector<std::vector<std::string>> bad = {
      {},
      {"frobnicate"},
      {"check", "--model", "centralised", "--nodes", "3", "--assert", "all", "--bogus"},
      {"check", "--model", "decentralised", "--nodes", "3", "--server-id", "1", "--assert", "all"},
      {"check", "--model", "centralised", "--nodes", "3", "--server-id", "3", "--assert", "all"},
      {"check", "--model", "centralised", "--nodes", "0", "--assert", "all"},
      {"check", "--model", "ring", "--nodes", "3", "--assert", "all"},
      {"check", "--model", "centralised", "--nodes", "3", "--assert", "sometimes"},
      {"check", "--model", "centralised", "--nodes", "3", "--assert", "all", "--mutation",
       "strict-phase-order"},
      {"check", "--model", "centralised", "--nodes", "3", "--assert", "all", "--capacity",
       "tonode=1"},
      {"check", "--model", "decentralised", "--nodes", "3", "--assert", "all", "--capacity",
       "tonode=0"},
      {"check", "--model", "decentralised", "--nodes", "3", "--assert", "all", "--capacity",
       "tonode"},
      {"sim", "--model", "centralised", "--nodes", "3", "--seed", "1", "--ldata", "1,2"},
      {"sim", "--model", "centralised", "--nodes", "3", "--seed", "1", "--ldata", "1,x,2"},
      {"sim", "--model", "centralised", "--nodes", "3"},
      {"sim", "--model", "centralised", "--nodes", "3", "--seed", "1", "--iters", "0"},
      {"sim", "--model", "centralised", "--nodes", "3", "--seed", "1", "--sfun", "max"},
  };
  for (const auto& args : bad) {
    auto r = Cli(args);
    CAPTURE(r.out);
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
  }
}

TEST_CASE("resource exhaustion is exit 2 with a report") {
  auto r = Cli({"check", "--model", "decentralised", "--nodes", "3", "--assert", "deadlockfree",
                "--max-states", "500"});
  CHECK(r.code == 2);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "resource-exceeded");
}

TEST_CASE("capacity override flips verdicts") {
  auto r = Cli({"check", "--model", "decentralised", "--nodes", "3", "--assert", "deadlockfree",
                "--capacity", "tonode=1", "--search", "bfs"});
  CHECK(r.code == 1);
  auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(j["capacity"]["tonode"] == 1);
  CHECK(j["states"] == 1126);
}

TEST_CASE("help exits 0") {
  auto r = Cli({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("check") != std::string::npos);
}
