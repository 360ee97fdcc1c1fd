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

#include "fedcsp/models/models.hh"

#include <string>

#include "fedcsp/kernel/semantics.hh"

namespace fedcsp {
namespace models {

using kernel::ChannelId;
using kernel::Env;
using kernel::ExprId;
using kernel::ModelError;
using kernel::ProgramBuilder;
using kernel::TermId;
using kernel::Value;

std::string VariantName(Variant v) {
  return v == Variant::kCentralised ? "centralised" : "decentralised";
}

std::optional<Variant> ParseVariant(const std::string& name) {
  if (name == "centralised") return Variant::kCentralised;
  if (name == "decentralised") return Variant::kDecentralised;
  return std::nullopt;
}

std::string MutationName(const Mutation& m) {
  return std::visit(
      [](const auto& mut) -> std::string {
        using T = std::decay_t<decltype(mut)>;
        if constexpr (std::is_same_v<T, ExpectExtraUpdate>) {
          return "expect-extra-update";
        } else if constexpr (std::is_same_v<T, SkipReply>) {
          return "skip-reply";
        } else if constexpr (std::is_same_v<T, StrictPhaseOrder>) {
          return "strict-phase-order";
        } else {
          return "capacity:" + kernel::ChannelKindName(mut.kind) + "=" +
                 std::to_string(mut.capacity);
        }
      },
      m);
}

std::size_t DefaultCapacity(ChannelKind kind, int nodes) {
  switch (kind) {
    case ChannelKind::kServerToClient:
      return 1;
    case ChannelKind::kClientsToServer:
      return static_cast<std::size_t>(nodes - 1);
    case ChannelKind::kToNode:
      return static_cast<std::size_t>(2 * (nodes - 1));
    case ChannelKind::kBuffer:
      return static_cast<std::size_t>(nodes - 1);
  }
  return 1;
}

namespace {

// Effective shape of a build after folding in the mutation list.
struct Shape {
  bool expect_extra_update = false;
  std::optional<NodeId> silent_node;
  bool strict_phase_order = false;
  std::map<ChannelKind, std::size_t> capacity;
};

bool KindBelongsTo(ChannelKind kind, Variant v) {
  if (v == Variant::kCentralised) {
    return kind == ChannelKind::kServerToClient || kind == ChannelKind::kClientsToServer;
  }
  return kind == ChannelKind::kToNode || kind == ChannelKind::kBuffer;
}

void ValidateConfig(const ModelConfig& cfg) {
  if (cfg.nodes < 1) throw ModelError("at least one node is required");
  if (cfg.variant == Variant::kCentralised &&
      (cfg.server_id < 0 || cfg.server_id >= cfg.nodes)) {
    throw ModelError("server id " + std::to_string(cfg.server_id) +
                     " out of range for " + std::to_string(cfg.nodes) + " nodes");
  }
  auto check_len = [&](const std::vector<Value>& v, const char* what) {
    if (!v.empty() && v.size() != static_cast<std::size_t>(cfg.nodes)) {
      throw ModelError(std::string(what) + " has " + std::to_string(v.size()) +
                       " entries, expected " + std::to_string(cfg.nodes));
    }
  };
  check_len(cfg.ldata, "ldata");
  check_len(cfg.pdata, "pdata");
  for (const auto& [kind, cap] : cfg.capacity_override) {
    if (!KindBelongsTo(kind, cfg.variant)) {
      throw ModelError("channel kind " + kernel::ChannelKindName(kind) +
                       " does not exist in the " + VariantName(cfg.variant) + " model");
    }
    if (cap == 0) throw ModelError("channel capacity must be at least 1");
  }
}

Shape ResolveShape(const ModelConfig& cfg, const std::vector<Mutation>& mutations) {
  Shape shape;
  shape.capacity = cfg.capacity_override;
  for (const auto& m : mutations) {
    if (std::holds_alternative<ExpectExtraUpdate>(m)) {
      if (cfg.variant != Variant::kCentralised) {
        throw ModelError("expect-extra-update applies to the centralised model only");
      }
      if (cfg.nodes < 2) throw ModelError("expect-extra-update needs at least two nodes");
      shape.expect_extra_update = true;
    } else if (const auto* skip = std::get_if<SkipReply>(&m)) {
      if (cfg.nodes < 2) throw ModelError("skip-reply needs at least two nodes");
      NodeId node = skip->node.value_or(
          cfg.variant == Variant::kCentralised && cfg.server_id == 0 ? 1 : 0);
      if (node < 0 || node >= cfg.nodes) {
        throw ModelError("skip-reply node " + std::to_string(node) + " out of range");
      }
      if (cfg.variant == Variant::kCentralised && node == cfg.server_id) {
        throw ModelError("skip-reply must designate a client, not the server");
      }
      shape.silent_node = node;
    } else if (std::holds_alternative<StrictPhaseOrder>(m)) {
      if (cfg.variant != Variant::kDecentralised) {
        throw ModelError("strict-phase-order applies to the decentralised model only");
      }
      shape.strict_phase_order = true;
    } else {
      const auto& cap = std::get<CapacityOverride>(m);
      if (!KindBelongsTo(cap.kind, cfg.variant)) {
        throw ModelError("channel kind " + kernel::ChannelKindName(cap.kind) +
                         " does not exist in the " + VariantName(cfg.variant) + " model");
      }
      if (cap.capacity == 0) throw ModelError("channel capacity must be at least 1");
      shape.capacity[cap.kind] = cap.capacity;
    }
  }
  return shape;
}

std::size_t CapacityOf(const Shape& shape, ChannelKind kind, int nodes) {
  auto it = shape.capacity.find(kind);
  return it != shape.capacity.end() ? it->second : DefaultCapacity(kind, nodes);
}

Value InitialAt(const std::vector<Value>& v, int i) {
  return v.empty() ? Value{0} : v[static_cast<std::size_t>(i)];
}

// Client reply payload: ldata + received, or the host update callback.
ExprId ReplyExpr(ProgramBuilder& b, const DataHooks* hooks, std::optional<kernel::HostFnId> fn,
                 const std::string& received) {
  if (hooks != nullptr && fn) {
    return b.HostCall(*fn, {b.Var("ldata"), b.Var("pdata"), b.Var(received)});
  }
  return b.Add(b.Var("ldata"), b.Var(received));
}

void DeclareSharedState(ProgramBuilder& b) {
  b.DeclareShared("terminated");
  b.DeclareSharedArray("ldataArr");
  b.DeclareSharedArray("pdataArr");
}

kernel::GlobalState InitialState(std::shared_ptr<const kernel::Program> program,
                                 const ModelConfig& cfg) {
  auto s = kernel::EmptyState(std::move(program), static_cast<std::size_t>(cfg.nodes));
  for (int i = 0; i < cfg.nodes; ++i) {
    s.arrays[0].push_back(InitialAt(cfg.ldata, i));
    s.arrays[1].push_back(InitialAt(cfg.pdata, i));
  }
  return s;
}

Env Bind(const kernel::Program& p, std::initializer_list<std::pair<const char*, Value>> vars) {
  Env env;
  for (const auto& [name, value] : vars) env.Bind(*p.FindSymbol(name), value);
  return env;
}

SystemModel BuildCentralisedImpl(const ModelConfig& cfg,
                                 const std::vector<Mutation>& mutations,
                                 std::shared_ptr<const DataHooks> hooks) {
  ValidateConfig(cfg);
  const Shape shape = ResolveShape(cfg, mutations);
  const int n = cfg.nodes;

  ProgramBuilder b;
  b.SetGranularity(cfg.granularity);
  DeclareSharedState(b);
  if (n >= 2) {
    for (NodeId i = 0; i < n; ++i) {
      b.DeclareChannel({ChannelKind::kServerToClient, i},
                       CapacityOf(shape, ChannelKind::kServerToClient, n));
    }
    b.DeclareChannel({ChannelKind::kClientsToServer, 0},
                     CapacityOf(shape, ChannelKind::kClientsToServer, n));
  }
  std::optional<kernel::HostFnId> update_fn;
  if (hooks && hooks->client_update) update_fn = b.AddHostFunction(*hooks->client_update);

  const std::vector<std::string> node_params = {"noNodes", "nodeId", "flSrvId", "ldata",
                                                "pdata"};
  b.Sym("update");
  b.Sym("srvLdata");
  for (const auto& s : node_params) b.Sym(s);

  // CeServer = {terminated = False} -> CeBroadcastMsg(0, ...); CeRcvMsgs(0, noNodes-1);
  //            {terminated = True} -> Skip
  ExprId expected = shape.expect_extra_update ? b.Var("noNodes")
                                              : b.Sub(b.Var("noNodes"), b.Lit(1));
  b.Define("CeServer", node_params,
           b.Assign("terminated", b.Lit(0),
                    b.Seq({b.Call("CeBroadcastMsg", {b.Lit(0), b.Var("noNodes"),
                                                     b.Var("nodeId"), b.Var("ldata")}),
                           b.Call("CeRcvMsgs", {b.Lit(0), expected}),
                           b.Assign("terminated", b.Lit(1), b.Skip())})));

  b.Define("CeBroadcastMsg", {"id", "noNodes", "nodeId", "ldata"},
           b.Seq(b.If(b.Ne(b.Var("id"), b.Var("nodeId")),
                      b.Send(b.Chan(ChannelKind::kServerToClient, b.Var("id")),
                             b.Plain(b.Var("ldata")), b.Skip())),
                 b.If(b.Lt(b.Var("id"), b.Sub(b.Var("noNodes"), b.Lit(1))),
                      b.Call("CeBroadcastMsg",
                             {b.Add(b.Var("id"), b.Lit(1)), b.Var("noNodes"),
                              b.Var("nodeId"), b.Var("ldata")}))));

  b.Define("CeRcvMsgs", {"i", "noMsgs"},
           b.If(b.Lt(b.Var("i"), b.Var("noMsgs")),
                b.Recv(b.Chan(ChannelKind::kClientsToServer, b.Lit(0)), {"update"},
                       std::nullopt,
                       b.Call("CeRcvMsgs", {b.Add(b.Var("i"), b.Lit(1)),
                                            b.Var("noMsgs")}))));

  b.Define("CeClient", node_params,
           b.Recv(b.Chan(ChannelKind::kServerToClient, b.Var("nodeId")), {"srvLdata"},
                  std::nullopt,
                  b.Send(b.Chan(ChannelKind::kClientsToServer, b.Lit(0)),
                         b.Plain(ReplyExpr(b, hooks.get(), update_fn, "srvLdata")),
                         b.Skip())));

  if (shape.silent_node) {
    b.Define("CeClientNoReply", node_params,
             b.Recv(b.Chan(ChannelKind::kServerToClient, b.Var("nodeId")),
                    {"srvLdata"}, std::nullopt, b.Skip()));
  }

  auto program = b.Build();
  auto state = InitialState(program, cfg);
  for (NodeId i = 0; i < n; ++i) {
    std::string role = i == cfg.server_id ? "CeServer"
                       : (shape.silent_node == i ? "CeClientNoReply" : "CeClient");
    const kernel::Definition* def = program->FindDefinition(*program->FindSymbol(role));
    Env env = Bind(*program, {{"noNodes", n},
                              {"nodeId", i},
                              {"flSrvId", cfg.server_id},
                              {"ldata", state.arrays[0][i]},
                              {"pdata", state.arrays[1][i]}});
    state.nodes[i] = kernel::StartNode(*program, def->body, std::move(env));
  }
  return SystemModel{std::move(state), cfg, mutations, std::move(hooks)};
}

SystemModel BuildDecentralisedImpl(const ModelConfig& cfg,
                                   const std::vector<Mutation>& mutations,
                                   std::shared_ptr<const DataHooks> hooks) {
  ValidateConfig(cfg);
  const Shape shape = ResolveShape(cfg, mutations);
  const int n = cfg.nodes;

  ProgramBuilder b;
  b.SetGranularity(cfg.granularity);
  DeclareSharedState(b);
  if (n >= 2) {
    for (NodeId i = 0; i < n; ++i) {
      b.DeclareChannel({ChannelKind::kToNode, i}, CapacityOf(shape, ChannelKind::kToNode, n));
    }
    for (NodeId i = 0; i < n; ++i) {
      b.DeclareChannel({ChannelKind::kBuffer, i}, CapacityOf(shape, ChannelKind::kBuffer, n));
    }
  }
  std::optional<kernel::HostFnId> update_fn;
  if (hooks && hooks->client_update) update_fn = b.AddHostFunction(*hooks->client_update);
  const bool with_pdata = update_fn.has_value();

  for (const char* s : {"noNodes", "nodeId", "ldata", "pdata", "phase", "from",
                        "nodeldata", "update"}) {
    b.Sym(s);
  }

  // Phase-2 processing receives the pdata parameter only when a host update
  // callback needs it.
  std::vector<std::string> rcv_params = {"i", "noNodes", "nodeId", "ldata"};
  if (with_pdata) rcv_params.push_back("pdata");
  auto rcv_args = [&](ExprId first) {
    std::vector<ExprId> args = {first, b.Var("noNodes"), b.Var("nodeId"), b.Var("ldata")};
    if (with_pdata) args.push_back(b.Var("pdata"));
    return args;
  };

  // FlDecentralised = {terminated = False} -> DeBroadcastMsg(0, ...);
  //   DeRcvMsgs(0, ...); DeRcvMsgs2(0, ...); {terminated = True} -> Skip
  auto node_body = [&](const std::string& rcv) {
    return b.Assign(
        "terminated", b.Lit(0),
        b.Seq({b.Call("DeBroadcastMsg",
                      {b.Lit(0), b.Var("noNodes"), b.Var("nodeId"), b.Var("ldata")}),
               b.Call(rcv, rcv_args(b.Lit(0))),
               b.Call("DeRcvMsgs2", {b.Lit(0), b.Var("noNodes"), b.Var("nodeId")}),
               b.Assign("terminated", b.Lit(1), b.Skip())}));
  };
  const std::vector<std::string> node_params = {"noNodes", "nodeId", "ldata", "pdata"};
  b.Define("FlDecentralised", node_params, node_body("DeRcvMsgs"));

  b.Define("DeBroadcastMsg", {"id", "noNodes", "nodeId", "ldata"},
           b.Seq(b.If(b.Ne(b.Var("id"), b.Var("nodeId")),
                      b.Send(b.Chan(ChannelKind::kToNode, b.Var("id")),
                             b.Tagged(b.Lit(1), b.Var("nodeId"), b.Var("ldata")),
                             b.Skip())),
                 b.If(b.Lt(b.Var("id"), b.Sub(b.Var("noNodes"), b.Lit(1))),
                      b.Call("DeBroadcastMsg",
                             {b.Add(b.Var("id"), b.Lit(1)), b.Var("noNodes"),
                              b.Var("nodeId"), b.Var("ldata")}))));

  auto reply = [&](const std::string& self) {
    return b.Send(b.Chan(ChannelKind::kToNode, b.Var("from")),
                  b.Tagged(b.Lit(2), b.Var("nodeId"),
                           ReplyExpr(b, hooks.get(), update_fn, "nodeldata")),
                  b.Call(self, rcv_args(b.Add(b.Var("i"), b.Lit(1)))));
  };
  const std::vector<std::string> tagged = {"phase", "from", "nodeldata"};
  auto define_rcv = [&](const std::string& name, bool silent) {
    TermId on_phase1 = silent ? b.Call(name, rcv_args(b.Add(b.Var("i"), b.Lit(1))))
                              : reply(name);
    if (shape.strict_phase_order) {
      // if(i < noNodes-1) { tonode[nodeId]?[phase == 1]phase.from.nodeldata -> reply }
      b.Define(name, rcv_params,
               b.If(b.Lt(b.Var("i"), b.Sub(b.Var("noNodes"), b.Lit(1))),
                    b.Recv(b.Chan(ChannelKind::kToNode, b.Var("nodeId")), tagged,
                           b.Eq(b.Var("phase"), b.Lit(1)), on_phase1)));
      return;
    }
    TermId forward =
        b.Send(b.Chan(ChannelKind::kBuffer, b.Var("nodeId")),
               b.Tagged(b.Var("phase"), b.Var("from"), b.Var("nodeldata")),
               b.Call(name, rcv_args(b.Add(b.Var("i"), b.Lit(1)))));
    b.Define(name, rcv_params,
             b.If(b.Lt(b.Var("i"), b.Sub(b.Mul(b.Lit(2), b.Var("noNodes")), b.Lit(2))),
                  b.Recv(b.Chan(ChannelKind::kToNode, b.Var("nodeId")), tagged,
                         std::nullopt,
                         b.If(b.Eq(b.Var("phase"), b.Lit(1)), on_phase1, forward))));
  };
  define_rcv("DeRcvMsgs", false);
  if (shape.silent_node) {
    define_rcv("DeRcvMsgsNoReply", true);
    b.Define("FlDecentralisedNoReply", node_params, node_body("DeRcvMsgsNoReply"));
  }

  // Without buffering the phase-2 replies are read straight from tonode.
  ChannelKind phase3 = shape.strict_phase_order ? ChannelKind::kToNode : ChannelKind::kBuffer;
  b.Define("DeRcvMsgs2", {"i", "noNodes", "nodeId"},
           b.If(b.Lt(b.Var("i"), b.Sub(b.Var("noNodes"), b.Lit(1))),
                b.Recv(b.Chan(phase3, b.Var("nodeId")), {"phase", "from", "update"},
                       std::nullopt,
                       b.Call("DeRcvMsgs2", {b.Add(b.Var("i"), b.Lit(1)), b.Var("noNodes"),
                                             b.Var("nodeId")}))));

  auto program = b.Build();
  auto state = InitialState(program, cfg);
  for (NodeId i = 0; i < n; ++i) {
    std::string role = shape.silent_node == i ? "FlDecentralisedNoReply" : "FlDecentralised";
    const kernel::Definition* def = program->FindDefinition(*program->FindSymbol(role));
    Env env = Bind(*program, {{"noNodes", n},
                              {"nodeId", i},
                              {"ldata", state.arrays[0][i]},
                              {"pdata", state.arrays[1][i]}});
    state.nodes[i] = kernel::StartNode(*program, def->body, std::move(env));
  }
  return SystemModel{std::move(state), cfg, mutations, std::move(hooks)};
}

SystemModel BuildImpl(const ModelConfig& cfg, const std::vector<Mutation>& mutations,
                      std::shared_ptr<const DataHooks> hooks) {
  if (cfg.variant == Variant::kCentralised) {
    return BuildCentralisedImpl(cfg, mutations, std::move(hooks));
  }
  return BuildDecentralisedImpl(cfg, mutations, std::move(hooks));
}

std::shared_ptr<const DataHooks> ShareHooks(const DataHooks* hooks) {
  if (hooks == nullptr) return nullptr;
  return std::make_shared<const DataHooks>(*hooks);
}

}  // namespace

SystemModel BuildCentralised(const ModelConfig& cfg, const DataHooks* hooks) {
  if (cfg.variant != Variant::kCentralised) {
    throw ModelError("BuildCentralised called with a decentralised configuration");
  }
  return BuildImpl(cfg, {}, ShareHooks(hooks));
}

SystemModel BuildDecentralised(const ModelConfig& cfg, const DataHooks* hooks) {
  if (cfg.variant != Variant::kDecentralised) {
    throw ModelError("BuildDecentralised called with a centralised configuration");
  }
  return BuildImpl(cfg, {}, ShareHooks(hooks));
}

SystemModel Build(const ModelConfig& cfg, const DataHooks* hooks) {
  return BuildImpl(cfg, {}, ShareHooks(hooks));
}

SystemModel ApplyMutation(const SystemModel& system, const Mutation& mutation) {
  auto mutations = system.mutations;
  mutations.push_back(mutation);
  return BuildImpl(system.config, mutations, system.hooks);
}

}  // namespace models
}  // namespace fedcsp
