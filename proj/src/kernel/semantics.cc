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

#include "fedcsp/kernel/semantics.hh"

#include <algorithm>
#include <optional>

namespace fedcsp {
namespace kernel {

namespace {

// Upper bound on consecutive silent steps of one node; exceeding it means an
// unguarded recursion such as P = P.
constexpr int kMaxSilentSteps = 1 << 16;

const Value& Lookup(const Program& p, Symbol var, const Env& env,
                    const GlobalState& state) {
  if (const Value* v = env.Lookup(var)) return *v;
  if (auto slot = p.SharedSlot(var)) return state.shared[*slot];
  throw ModelError("unbound variable '" + p.SymbolName(var) + "'");
}

Value Eval(const Program& p, ExprId id, const Env& env, const GlobalState& state) {
  const ExprNode& e = p.expr(id);
  switch (e.op) {
    case ExprOp::kLiteral:
      return e.literal;
    case ExprOp::kVar:
      return Lookup(p, e.var, env, state);
    case ExprOp::kAdd:
    case ExprOp::kSub:
    case ExprOp::kMul: {
      std::int64_t a = Eval(p, e.args[0], env, state).as_int();
      std::int64_t b = Eval(p, e.args[1], env, state).as_int();
      if (e.op == ExprOp::kAdd) return a + b;
      if (e.op == ExprOp::kSub) return a - b;
      return a * b;
    }
    case ExprOp::kHostCall: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (ExprId a : e.args) args.push_back(Eval(p, a, env, state));
      return p.host_function(e.fn)(args);
    }
  }
  throw ModelError("bad expression");
}

bool Holds(const Program& p, const Cond& c, const Env& env, const GlobalState& state) {
  Value a = Eval(p, c.lhs, env, state);
  Value b = Eval(p, c.rhs, env, state);
  switch (c.op) {
    case CmpOp::kEq:
      return a == b;
    case CmpOp::kNe:
      return a != b;
    case CmpOp::kLt:
      return a.as_int() < b.as_int();
  }
  return false;
}

ChannelId EvalChannel(const Program& p, const ChannelExpr& ch, const Env& env,
                      const GlobalState& state) {
  if (ch.kind == ChannelKind::kClientsToServer) return {ch.kind, 0};
  std::int64_t index = Eval(p, ch.index, env, state).as_int();
  return {ch.kind, static_cast<NodeId>(index)};
}

std::size_t SlotOf(const Program& p, const ChannelId& id) {
  auto slot = p.ChannelSlot(id);
  if (!slot) throw ModelError("use of undeclared channel " + ChannelName(id));
  return *slot;
}

Message EvalMessage(const Program& p, const MessageExpr& m, const Env& env,
                    const GlobalState& state) {
  if (!m.tagged) return PlainMsg{Eval(p, m.data, env, state)};
  TaggedMsg t;
  t.phase = Eval(p, m.phase, env, state).as_int();
  std::int64_t from = Eval(p, m.from, env, state).as_int();
  if (t.phase != 1 && t.phase != 2) {
    throw ModelError("tagged message with phase " + std::to_string(t.phase));
  }
  if (from < 0 || from >= static_cast<std::int64_t>(state.nodes.size())) {
    throw ModelError("tagged message from unknown node " + std::to_string(from));
  }
  t.from = static_cast<NodeId>(from);
  t.data = Eval(p, m.data, env, state);
  return t;
}

Env BindMessage(const TermNode& recv, const Message& msg, Env env) {
  if (const auto* plain = std::get_if<PlainMsg>(&msg)) {
    if (recv.binders.size() != 1) {
      throw ModelError("tagged receive on a channel carrying plain messages");
    }
    env.Bind(recv.binders[0], plain->data);
    return env;
  }
  const auto& tagged = std::get<TaggedMsg>(msg);
  if (recv.binders.size() != 3) {
    throw ModelError("plain receive on a channel carrying tagged messages");
  }
  env.Bind(recv.binders[0], tagged.phase);
  env.Bind(recv.binders[1], std::int64_t{tagged.from});
  env.Bind(recv.binders[2], tagged.data);
  return env;
}

// Runs the silent steps of the top frame until a visible action is at the
// head of the node or the node is done.
void Normalize(const Program& p, NodeState* node, const GlobalState& state) {
  const bool atomic = p.granularity() == Granularity::kAtomic;
  for (int steps = 0; steps < kMaxSilentSteps; ++steps) {
    if (node->stack.empty()) return;
    Frame& top = node->stack.back();
    const TermNode& t = p.term(top.term);
    switch (t.kind) {
      case TermKind::kCall: {
        const Definition* def = p.FindDefinition(t.callee);
        if (def == nullptr || def->params.size() != t.args.size()) {
          throw ModelError("unresolvable call to '" + p.SymbolName(t.callee) + "'");
        }
        Env callee_env;
        for (std::size_t i = 0; i < def->params.size(); ++i) {
          callee_env.Bind(def->params[i], Eval(p, t.args[i], top.env, state));
        }
        top.term = def->body;
        top.env = std::move(callee_env);
        break;
      }
      case TermKind::kSeq: {
        Frame rest{t.next, top.env};
        top.term = t.first;
        node->stack.insert(node->stack.end() - 1, std::move(rest));
        break;
      }
      case TermKind::kSkip:
        if (!atomic && node->stack.size() > 1) return;
        node->stack.pop_back();
        break;
      case TermKind::kIf:
        if (!atomic) return;
        top.term = Holds(p, t.cond, top.env, state) ? t.then_branch : t.else_branch;
        break;
      default:
        return;
    }
  }
  throw ModelError("unguarded recursion: no visible action after " +
                   std::to_string(kMaxSilentSteps) + " silent steps");
}

std::optional<Transition> NodeStep(const GlobalState& state, NodeId id) {
  const Program& p = *state.program;
  const NodeState& node = state.nodes[id];
  if (node.done()) return std::nullopt;
  const Frame& top = node.stack.back();
  const TermNode& t = p.term(top.term);

  Transition tr;
  tr.node = id;
  switch (t.kind) {
    case TermKind::kSend: {
      ChannelId ch = EvalChannel(p, t.channel, top.env, state);
      std::size_t slot = SlotOf(p, ch);
      if (state.channels[slot].size() >= p.channels()[slot].capacity) {
        return std::nullopt;
      }
      Message msg = EvalMessage(p, t.message, top.env, state);
      tr.successor = state;
      tr.successor.channels[slot].push_back(msg);
      tr.successor.nodes[id].stack.back().term = t.next;
      tr.label = SendAct{ch, std::move(msg)};
      break;
    }
    case TermKind::kRecv: {
      ChannelId ch = EvalChannel(p, t.channel, top.env, state);
      std::size_t slot = SlotOf(p, ch);
      const auto& queue = state.channels[slot];
      if (queue.empty()) return std::nullopt;
      const Message& head = queue.front();
      Env bound = BindMessage(t, head, top.env);
      if (t.guard && !Holds(p, *t.guard, bound, state)) return std::nullopt;
      tr.label = RecvAct{ch, head};
      tr.successor = state;
      auto& q = tr.successor.channels[slot];
      q.erase(q.begin());
      tr.successor.nodes[id].stack.back() = Frame{t.next, std::move(bound)};
      break;
    }
    case TermKind::kAssign: {
      Value v = Eval(p, t.value, top.env, state);
      std::size_t slot = *p.SharedSlot(t.target);
      tr.successor = state;
      tr.successor.shared[slot] = v;
      tr.successor.nodes[id].stack.back().term = t.next;
      tr.label = AssignAct{t.target, std::move(v)};
      break;
    }
    case TermKind::kIf: {
      tr.successor = state;
      tr.successor.nodes[id].stack.back().term =
          Holds(p, t.cond, top.env, state) ? t.then_branch : t.else_branch;
      tr.label = SkipAct{};
      break;
    }
    case TermKind::kSkip: {
      tr.successor = state;
      tr.successor.nodes[id].stack.pop_back();
      tr.label = SkipAct{};
      break;
    }
    default:
      throw ModelError("node " + std::to_string(id) + " is not normalized");
  }
  Normalize(p, &tr.successor.nodes[id], tr.successor);
  return tr;
}

}  // namespace

NodeState StartNode(const Program& program, TermId term, Env env) {
  NodeState node;
  node.stack.push_back(Frame{term, std::move(env)});
  GlobalState scratch;
  Normalize(program, &node, scratch);
  return node;
}

GlobalState EmptyState(std::shared_ptr<const Program> program,
                       std::size_t node_count) {
  GlobalState s;
  s.nodes.resize(node_count);
  s.channels.resize(program->channels().size());
  s.shared.assign(program->shared_vars().size(), Value{0});
  s.arrays.resize(program->shared_arrays().size());
  s.program = std::move(program);
  return s;
}

std::vector<Transition> EnabledTransitions(const GlobalState& state) {
  std::vector<Transition> out;
  for (NodeId i = 0; i < static_cast<NodeId>(state.nodes.size()); ++i) {
    if (auto t = NodeStep(state, i)) out.push_back(std::move(*t));
  }
  return out;
}

GlobalState Apply(const GlobalState& state, NodeId node, const ActionLabel& label) {
  if (node < 0 || node >= static_cast<NodeId>(state.nodes.size())) {
    throw ContractViolation("apply: node " + std::to_string(node) + " out of range");
  }
  auto t = NodeStep(state, node);
  if (!t || !(t->label == label)) {
    throw ContractViolation("apply: step " + Describe(*state.program, label) +
                            " of node " + std::to_string(node) + " is not enabled");
  }
  return std::move(t->successor);
}

GlobalState Apply(const GlobalState& state, const Transition& t) {
  return Apply(state, t.node, t.label);
}

bool AllDone(const GlobalState& state) {
  return std::all_of(state.nodes.begin(), state.nodes.end(),
                     [](const NodeState& n) { return n.done(); });
}

Status Classify(const GlobalState& state) {
  if (AllDone(state)) return Status::kAllDone;
  for (NodeId i = 0; i < static_cast<NodeId>(state.nodes.size()); ++i) {
    if (NodeStep(state, i)) return Status::kRunning;
  }
  return Status::kDeadlock;
}

const char* StatusName(Status s) {
  switch (s) {
    case Status::kAllDone:
      return "all-done";
    case Status::kDeadlock:
      return "deadlock";
    case Status::kRunning:
      return "running";
  }
  return "?";
}

}  // namespace kernel
}  // namespace fedcsp
