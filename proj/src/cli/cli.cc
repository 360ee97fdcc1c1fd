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

#include "fedcsp/cli/cli.hh"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fedcsp/checker/checker.hh"
#include "fedcsp/kernel/semantics.hh"
#include "fedcsp/models/models.hh"
#include "fedcsp/runtime/runtime.hh"

namespace fedcsp {
namespace cli {

using json = nlohmann::ordered_json;

namespace {

// Signals exit code 2 with a diagnostic.
struct UsageError {
  std::string what;
};

json Number(double v) {
  double whole;
  if (std::modf(v, &whole) == 0.0 && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

struct CommonOpts {
  std::string model;
  int nodes = 0;
  std::optional<int> server_id;
  std::string granularity = "micro";
};

void AddCommon(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--model", o->model, "centralised or decentralised")
      ->required()
      ->check(CLI::IsMember({"centralised", "decentralised"}));
  cmd->add_option("--nodes", o->nodes, "number of nodes")->required();
  cmd->add_option("--server-id", o->server_id, "server node (centralised only)");
  cmd->add_option("--granularity", o->granularity, "micro or atomic")
      ->check(CLI::IsMember({"micro", "atomic"}));
}

models::ModelConfig ToModelConfig(const CommonOpts& o) {
  models::ModelConfig mc;
  mc.variant = *models::ParseVariant(o.model);
  if (o.nodes < 1) throw UsageError{"--nodes must be at least 1"};
  mc.nodes = o.nodes;
  if (o.server_id) {
    if (mc.variant != models::Variant::kCentralised) {
      throw UsageError{"--server-id only applies to the centralised model"};
    }
    if (*o.server_id < 0 || *o.server_id >= o.nodes) {
      throw UsageError{"--server-id out of range"};
    }
    mc.server_id = *o.server_id;
  }
  mc.granularity = o.granularity == "atomic" ? kernel::Granularity::kAtomic
                                             : kernel::Granularity::kMicroStep;
  return mc;
}

void Header(json* r, const CommonOpts& o, const models::ModelConfig& mc) {
  (*r)["model"] = o.model;
  (*r)["nodes"] = o.nodes;
  if (mc.variant == models::Variant::kCentralised) (*r)["serverId"] = mc.server_id;
  if (o.granularity != "micro") (*r)["granularity"] = o.granularity;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError{"cannot write " + path};
  f << text;
}

// ---------------------------------------------------------------- check

struct CheckOpts {
  CommonOpts common;
  std::string assertion;
  std::string search = "dfs";
  std::string mutation;
  std::vector<std::string> capacities;
  std::string trace_out;
  std::size_t max_states = 10'000'000;
  bool timing = false;
};

struct Outcome {
  std::string assertion;
  std::string verdict;
  checker::StateSpaceStats stats;
  std::optional<checker::CounterexampleTrace> trace;
};

std::vector<runtime::TraceEvent> Events(const checker::CounterexampleTrace& t) {
  std::vector<runtime::TraceEvent> out;
  for (std::size_t i = 0; i < t.prefix.size(); ++i) {
    out.push_back(runtime::MakeEvent(i, t.prefix[i].node, t.prefix[i].label));
  }
  return out;
}

json InlineTrace(const checker::CounterexampleTrace& t) {
  json c;
  if (t.cycle_start) c["cycleStart"] = *t.cycle_start;
  json events = json::array();
  for (const auto& e : Events(t)) events.push_back(json::parse(runtime::EventToJson(e)));
  c["events"] = std::move(events);
  return c;
}

std::string TraceJsonl(const checker::CounterexampleTrace& t) {
  std::string out;
  for (const auto& e : Events(t)) {
    json j = json::parse(runtime::EventToJson(e));
    if (t.cycle_start) j["cycleStart"] = *t.cycle_start;
    out += j.dump() + "\n";
  }
  return out;
}

Outcome RunAssertion(const std::string& assertion, const models::SystemModel& sys,
                     checker::Strategy strategy, const checker::Budget& budget) {
  Outcome o{assertion, "", {}, std::nullopt};
  try {
    checker::CheckResult r;
    if (assertion == "deadlockfree") {
      r = checker::CheckDeadlockFree(sys, strategy, budget);
    } else if (assertion == "reaches-terminated") {
      r = checker::CheckReaches(sys, checker::Terminated(), strategy, budget);
    } else {
      r = checker::CheckAlwaysEventually(sys, checker::Terminated(), budget);
    }
    o.verdict = r.verdict.valid() ? "valid" : "violated";
    o.stats = r.stats;
    o.trace = r.verdict.trace();
  } catch (const checker::ResourceExceeded& e) {
    o.verdict = "resource-exceeded";
    o.stats = e.stats();
  }
  return o;
}

void PutOutcome(json* j, const Outcome& o, bool timing) {
  (*j)["verdict"] = o.verdict;
  (*j)["states"] = o.stats.states;
  (*j)["transitions"] = o.stats.transitions;
  if (timing) (*j)["elapsedMs"] = o.stats.elapsed.count();
  if (o.trace) (*j)["counterexample"] = InlineTrace(*o.trace);
}

int CmdCheck(const CheckOpts& opts, std::ostream& out, std::ostream& err) {
  models::ModelConfig mc = ToModelConfig(opts.common);
  models::SystemModel sys;
  json capacity = json::object();
  try {
    sys = models::Build(mc);
    if (!opts.mutation.empty()) {
      models::Mutation m;
      if (opts.mutation == "expect-extra-update") {
        m = models::ExpectExtraUpdate{};
      } else if (opts.mutation == "skip-reply") {
        m = models::SkipReply{};
      } else {
        m = models::StrictPhaseOrder{};
      }
      sys = models::ApplyMutation(sys, m);
    }
    for (const auto& item : opts.capacities) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError{"--capacity expects KIND=V: " + item};
      auto kind = kernel::ParseChannelKind(item.substr(0, eq));
      if (!kind) throw UsageError{"unknown channel kind in --capacity: " + item};
      std::size_t value = 0;
      try {
        std::size_t used = 0;
        long long v = std::stoll(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1 || v < 1) throw std::invalid_argument(item);
        value = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw UsageError{"--capacity needs a positive integer: " + item};
      }
      sys = models::ApplyMutation(sys, models::CapacityOverride{*kind, value});
      capacity[kernel::ChannelKindName(*kind)] = value;
    }
  } catch (const kernel::ModelError& e) {
    throw UsageError{e.what()};
  }

  checker::Budget budget;
  budget.max_states = opts.max_states;
  const auto strategy = opts.search == "bfs" ? checker::Strategy::kBfs : checker::Strategy::kDfs;

  std::vector<std::string> assertions;
  if (opts.assertion == "all") {
    assertions = {"deadlockfree", "reaches-terminated", "always-eventually-terminated"};
  } else {
    assertions = {opts.assertion};
  }
  std::vector<Outcome> outcomes;
  for (const auto& a : assertions) outcomes.push_back(RunAssertion(a, sys, strategy, budget));

  json report;
  Header(&report, opts.common, mc);
  if (!opts.mutation.empty()) report["mutation"] = opts.mutation;
  if (!capacity.empty()) report["capacity"] = capacity;
  report["assertion"] = opts.assertion;
  report["strategy"] = opts.search;
  if (outcomes.size() == 1) {
    PutOutcome(&report, outcomes[0], opts.timing);
  } else {
    std::string overall = "valid";
    for (const auto& o : outcomes) {
      if (o.verdict == "resource-exceeded") overall = o.verdict;
      if (o.verdict == "violated" && overall == "valid") overall = o.verdict;
    }
    report["verdict"] = overall;
    report["states"] = outcomes[0].stats.states;
    report["transitions"] = outcomes[0].stats.transitions;
    if (opts.timing) {
      double total = 0;
      for (const auto& o : outcomes) total += o.stats.elapsed.count();
      report["elapsedMs"] = total;
    }
    json checks = json::array();
    for (const auto& o : outcomes) {
      json c;
      c["assertion"] = o.assertion;
      PutOutcome(&c, o, opts.timing);
      checks.push_back(std::move(c));
    }
    report["checks"] = std::move(checks);
  }
  out << report.dump() << '\n';

  if (!opts.trace_out.empty()) {
    for (const auto& o : outcomes) {
      if (o.trace) {
        WriteFile(opts.trace_out, TraceJsonl(*o.trace));
        break;
      }
    }
  }

  int code = 0;
  for (const auto& o : outcomes) {
    if (o.verdict == "resource-exceeded") {
      err << "resource budget exceeded during " << o.assertion << "\n";
      return 2;
    }
    if (o.verdict == "violated") code = 1;
  }
  return code;
}

// ---------------------------------------------------------------- sim

struct SimOpts {
  CommonOpts common;
  std::uint64_t seed = 0;
  int iters = 1;
  std::string cfun = "add";
  std::string sfun = "mean";
  std::string ldata;
  std::string trace_out;
  bool conformance = false;
};

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError{"bad --ldata value: '" + item + "'"};
    }
  }
  return out;
}

int CmdSim(const SimOpts& opts, std::ostream& out, std::ostream& err) {
  models::ModelConfig mc = ToModelConfig(opts.common);
  runtime::RunConfig cfg;
  cfg.variant = mc.variant;
  cfg.nodes = mc.nodes;
  cfg.server_id = mc.server_id;
  cfg.granularity = mc.granularity;
  cfg.seed = opts.seed;
  if (opts.iters < 1) throw UsageError{"--iters must be at least 1"};
  cfg.iters = opts.iters;
  if (!opts.ldata.empty()) {
    cfg.ldata = ParseList(opts.ldata);
    if (cfg.ldata.size() != static_cast<std::size_t>(mc.nodes)) {
      throw UsageError{"--ldata needs exactly " + std::to_string(mc.nodes) + " values"};
    }
  }
  cfg.callbacks.cfun = runtime::AddClient();
  cfg.callbacks.sfun = opts.sfun == "sum" ? runtime::SumServer() : runtime::MeanServer();

  std::vector<runtime::ConcreteTrace> traces;
  runtime::RoundResult result;
  try {
    result = runtime::Run(cfg, &traces);
  } catch (const runtime::RunError& e) {
    err << "run failed: " << e.what() << "\n";
    if (!opts.trace_out.empty()) {
      std::ostringstream os;
      for (const auto& t : traces) runtime::WriteJsonl(os, t);
      runtime::WriteJsonl(os, e.partial_trace());
      WriteFile(opts.trace_out, os.str());
    }
    return 2;
  }

  if (!opts.trace_out.empty()) {
    std::ostringstream os;
    for (const auto& t : traces) runtime::WriteJsonl(os, t);
    WriteFile(opts.trace_out, os.str());
  }

  json r;
  json values = json::array();
  for (double v : result.final_ldata) values.push_back(Number(v));
  r["finalLdata"] = std::move(values);
  out << r.dump() << '\n';

  if (opts.conformance) {
    models::SystemModel sys = runtime::AbstractModel(cfg);
    for (std::size_t k = 0; k < traces.size(); ++k) {
      auto c = runtime::Conforms(sys, traces[k]);
      if (!c.ok) {
        err << "round " << k << " diverges from the model at event " << c.divergence << "\n";
        return 1;
      }
    }
  }
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification and simulation of federated-learning orchestration", "fedcsp"};
  app.require_subcommand(1);

  CheckOpts check;
  CLI::App* check_cmd = app.add_subcommand("check", "model-check a protocol model");
  AddCommon(check_cmd, &check.common);
  check_cmd->add_option("--assert", check.assertion)
      ->required()
      ->check(CLI::IsMember(
          {"deadlockfree", "reaches-terminated", "always-eventually-terminated", "all"}));
  check_cmd->add_option("--search", check.search)->check(CLI::IsMember({"dfs", "bfs"}));
  check_cmd->add_option("--mutation", check.mutation)
      ->check(CLI::IsMember({"expect-extra-update", "skip-reply", "strict-phase-order"}));
  check_cmd->add_option("--capacity", check.capacities, "KIND=V, repeatable");
  check_cmd->add_option("--trace-out", check.trace_out);
  check_cmd->add_option("--max-states", check.max_states)->check(CLI::PositiveNumber);
  check_cmd->add_flag("--timing", check.timing, "add elapsedMs to the report");

  SimOpts sim;
  CLI::App* sim_cmd = app.add_subcommand("sim", "run seeded concrete rounds");
  AddCommon(sim_cmd, &sim.common);
  sim_cmd->add_option("--seed", sim.seed)->required();
  sim_cmd->add_option("--iters", sim.iters);
  sim_cmd->add_option("--cfun", sim.cfun)->check(CLI::IsMember({"add"}));
  sim_cmd->add_option("--sfun", sim.sfun)->check(CLI::IsMember({"sum", "mean"}));
  sim_cmd->add_option("--ldata", sim.ldata, "comma-separated, one per node");
  sim_cmd->add_option("--trace-out", sim.trace_out);
  sim_cmd->add_flag("--conformance", sim.conformance);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (check_cmd->parsed()) return CmdCheck(check, out, err);
    return CmdSim(sim, out, err);
  } catch (const UsageError& e) {
    err << e.what << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cli
}  // namespace fedcsp
