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

#include "fedcsp/runtime/runtime.hh"

#include <numeric>
#include <set>
#include <sstream>

#include "fedcsp/kernel/encoding.hh"
#include "fedcsp/kernel/semantics.hh"

namespace fedcsp {
namespace runtime {

using kernel::Value;

namespace {

// Upper bound on steps of one round; the models unfold finitely, so hitting
// it means something is badly wrong.
constexpr std::size_t kMaxRoundSteps = 1 << 22;

class Real : public kernel::HostValue {
 public:
  explicit Real(double v) : v_(v) {}

  bool Equals(const HostValue& other) const override {
    const auto* r = dynamic_cast<const Real*>(&other);
    return r != nullptr && r->v_ == v_;
  }
  double ToDouble() const override { return v_; }
  std::string Describe() const override {
    std::ostringstream os;
    os << v_;
    return os.str();
  }

 private:
  double v_;
};

Value MakeReal(double v) { return Value(std::make_shared<const Real>(v)); }

double At(const std::vector<double>& v, int i) {
  return v.empty() ? 0.0 : v[static_cast<std::size_t>(i)];
}

models::ModelConfig ModelConfigFor(const RunConfig& cfg, bool concrete) {
  models::ModelConfig mc;
  mc.variant = cfg.variant;
  mc.nodes = cfg.nodes;
  mc.server_id = cfg.server_id;
  mc.granularity = cfg.granularity;
  if (concrete) {
    for (int i = 0; i < cfg.nodes; ++i) {
      mc.ldata.push_back(MakeReal(At(cfg.ldata, i)));
      mc.pdata.push_back(MakeReal(At(cfg.pdata, i)));
    }
  }
  return mc;
}

bool SentBy(const TraceEvent& e, kernel::NodeId node, Action action, kernel::ChannelId ch) {
  return e.node == node && e.action == action && e.channel == ch;
}

}  // namespace

std::uint64_t SplitMix64::Next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::Uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    std::uint64_t x = Next();
    if (x >= threshold) return x % bound;
  }
}

ClientFn AddClient() {
  return [](double ldata, double, double server_data) { return ldata + server_data; };
}

ServerFn MeanServer() {
  return [](double ldata, double, const std::vector<double>& updates) {
    if (updates.empty()) return ldata;
    return std::accumulate(updates.begin(), updates.end(), 0.0) /
           static_cast<double>(updates.size());
  };
}

ServerFn SumServer() {
  return [](double ldata, double, const std::vector<double>& updates) {
    if (updates.empty()) return ldata;
    return std::accumulate(updates.begin(), updates.end(), 0.0);
  };
}

void Validate(const RunConfig& cfg) {
  if (cfg.nodes < 1) throw std::invalid_argument("nodes must be at least 1");
  if (cfg.iters < 1) throw std::invalid_argument("iters must be at least 1");
  auto n = static_cast<std::size_t>(cfg.nodes);
  if (!cfg.ldata.empty() && cfg.ldata.size() != n) {
    throw std::invalid_argument("ldata needs one value per node");
  }
  if (!cfg.pdata.empty() && cfg.pdata.size() != n) {
    throw std::invalid_argument("pdata needs one value per node");
  }
  if (cfg.variant == models::Variant::kCentralised &&
      (cfg.server_id < 0 || cfg.server_id >= cfg.nodes)) {
    throw std::invalid_argument("server id out of range");
  }
  if (!cfg.callbacks.cfun || !cfg.callbacks.sfun) {
    throw std::invalid_argument("both callbacks are required");
  }
}

models::SystemModel AbstractModel(const RunConfig& cfg) {
  return models::Build(ModelConfigFor(cfg, false));
}

RoundResult RunRound(const RunConfig& cfg, ConcreteTrace* trace) {
  Validate(cfg);
  models::DataHooks hooks;
  ClientFn cfun = cfg.callbacks.cfun;
  hooks.client_update = [cfun](std::span<const Value> args) {
    return MakeReal(cfun(args[0].ToDouble(), args[1].ToDouble(), args[2].ToDouble()));
  };
  models::SystemModel sys = models::Build(ModelConfigFor(cfg, true), &hooks);

  ConcreteTrace events;
  SplitMix64 rng(cfg.seed);
  kernel::GlobalState state = sys.initial;
  for (;;) {
    std::vector<kernel::Transition> ts;
    try {
      ts = kernel::EnabledTransitions(state);
    } catch (const std::exception& e) {
      throw RunError(std::string("step failed: ") + e.what(), std::move(events));
    }
    if (ts.empty()) {
      if (kernel::AllDone(state)) break;
      throw RunError("no enabled step before completion", std::move(events));
    }
    if (events.size() >= kMaxRoundSteps) {
      throw RunError("round step limit reached", std::move(events));
    }
    auto& t = ts[rng.Uniform(ts.size())];
    events.push_back(MakeEvent(events.size(), t.node, t.label));
    state = std::move(t.successor);
  }

  const int n = cfg.nodes;
  RoundResult result;
  result.final_ldata.resize(static_cast<std::size_t>(n));
  try {
    auto aggregate = [&](kernel::NodeId node, kernel::ChannelId from) {
      std::vector<double> updates;
      for (const auto& e : events) {
        if (SentBy(e, node, Action::kRecv, from)) updates.push_back(e.msg->data);
      }
      return cfg.callbacks.sfun(At(cfg.ldata, node), At(cfg.pdata, node), updates);
    };
    for (kernel::NodeId i = 0; i < n; ++i) {
      double& out = result.final_ldata[static_cast<std::size_t>(i)];
      if (cfg.variant == models::Variant::kDecentralised) {
        out = aggregate(i, {kernel::ChannelKind::kBuffer, i});
      } else if (i == cfg.server_id) {
        out = aggregate(i, {kernel::ChannelKind::kClientsToServer, 0});
      } else {
        // A client keeps the update it sent.
        out = At(cfg.ldata, i);
        for (const auto& e : events) {
          if (SentBy(e, i, Action::kSend, {kernel::ChannelKind::kClientsToServer, 0})) {
            out = e.msg->data;
          }
        }
      }
    }
  } catch (const std::exception& e) {
    throw RunError(std::string("server callback failed: ") + e.what(), std::move(events));
  }
  if (trace != nullptr) *trace = std::move(events);
  return result;
}

RoundResult Run(const RunConfig& cfg, std::vector<ConcreteTrace>* traces) {
  Validate(cfg);
  RunConfig round = cfg;
  RoundResult result;
  for (int k = 0; k < cfg.iters; ++k) {
    round.seed = cfg.seed ^ static_cast<std::uint64_t>(k);
    ConcreteTrace trace;
    result = RunRound(round, &trace);
    if (traces != nullptr) traces->push_back(std::move(trace));
    round.ldata = result.final_ldata;
  }
  return result;
}

ConformanceResult Conforms(const models::SystemModel& sys, const ConcreteTrace& trace) {
  const auto& program = sys.program();
  const auto n = static_cast<kernel::NodeId>(sys.initial.nodes.size());
  for (const auto& e : trace) {
    if (e.node < 0 || e.node >= n) {
      throw kernel::ContractViolation("trace names node " + std::to_string(e.node) +
                                      " of a " + std::to_string(n) + "-node model");
    }
    if (e.channel && !program.ChannelSlot(*e.channel)) {
      throw kernel::ContractViolation("trace names channel " + kernel::ChannelName(*e.channel) +
                                      " absent from the model");
    }
  }

  std::vector<kernel::GlobalState> frontier{sys.initial};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].step != i) return {false, i};
    const AbstractEvent want = Abstract(trace[i]);
    std::vector<kernel::GlobalState> next;
    std::set<std::vector<std::uint8_t>> seen;
    for (const auto& s : frontier) {
      for (auto& t : kernel::EnabledTransitions(s)) {
        if (t.node != want.node) continue;
        if (!(Abstract(MakeEvent(i, t.node, t.label)) == want)) continue;
        if (seen.insert(kernel::EncodeState(t.successor)).second) {
          next.push_back(std::move(t.successor));
        }
      }
    }
    if (next.empty()) return {false, i};
    frontier = std::move(next);
  }
  return {true, 0};
}

}  // namespace runtime
}  // namespace fedcsp
