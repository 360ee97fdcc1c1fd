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

#ifndef FEDCSP_KERNEL_PROGRAM_HH_
#define FEDCSP_KERNEL_PROGRAM_HH_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedcsp/kernel/value.hh"

namespace fedcsp {
namespace kernel {

using Symbol = std::uint32_t;
using ExprId = std::uint32_t;
using TermId = std::uint32_t;
using HostFnId = std::uint32_t;

using HostFunction = std::function<Value(std::span<const Value>)>;

enum class ExprOp : std::uint8_t { kLiteral, kVar, kAdd, kSub, kMul, kHostCall };

struct ExprNode {
  ExprOp op = ExprOp::kLiteral;
  std::int64_t literal = 0;
  Symbol var = 0;
  HostFnId fn = 0;
  std::vector<ExprId> args;
};

enum class CmpOp : std::uint8_t { kEq, kNe, kLt };

struct Cond {
  CmpOp op = CmpOp::kEq;
  ExprId lhs = 0;
  ExprId rhs = 0;
};

/// Channel reference whose index is computed in the sender's environment.
struct ChannelExpr {
  ChannelKind kind = ChannelKind::kClientsToServer;
  ExprId index = 0;
};

struct MessageExpr {
  bool tagged = false;
  ExprId phase = 0;
  ExprId from = 0;
  ExprId data = 0;
};

enum class TermKind : std::uint8_t {
  kSkip,
  kSend,
  kRecv,
  kAssign,
  kIf,
  kCall,
  kSeq,
};

/**
 * One node of the process-term arena. Only the fields relevant to `kind` are
 * meaningful; `next` is the continuation of Send, Recv and Assign and the
 * second component of Seq.
 */
struct TermNode {
  TermKind kind = TermKind::kSkip;

  ChannelExpr channel;
  MessageExpr message;

  // Recv: one binder for plain messages, three (phase, from, data) for tagged.
  std::vector<Symbol> binders;
  std::optional<Cond> guard;

  Symbol target = 0;
  ExprId value = 0;

  Cond cond;
  TermId then_branch = 0;
  TermId else_branch = 0;

  Symbol callee = 0;
  std::vector<ExprId> args;

  TermId first = 0;
  TermId next = 0;
};

struct Definition {
  Symbol name = 0;
  std::vector<Symbol> params;
  TermId body = 0;
};

struct ChannelDecl {
  ChannelId id;
  std::size_t capacity = 1;
};

/**
 * Step granularity of the operational semantics.
 *
 * kMicroStep: assignments, if-resolution and skip-elimination in front of a
 * sequential continuation are each one visible transition.
 * kAtomic: if-resolution and skip-elimination are folded into the preceding
 * step, so only Send, Recv and Assign are visible.
 * Call unfolding and sequence splitting are silent in both modes.
 */
enum class Granularity : std::uint8_t { kMicroStep, kAtomic };

/// Immutable program: term arena, definitions, channel and variable layout.
class Program {
 public:
  const ExprNode& expr(ExprId id) const { return exprs_[id]; }
  const TermNode& term(TermId id) const { return terms_[id]; }
  std::size_t term_count() const { return terms_.size(); }

  const Definition* FindDefinition(Symbol name) const;

  const std::string& SymbolName(Symbol s) const { return symbols_[s]; }
  std::optional<Symbol> FindSymbol(const std::string& name) const;

  const std::vector<ChannelDecl>& channels() const { return channels_; }
  std::optional<std::size_t> ChannelSlot(const ChannelId& id) const;

  const std::vector<Symbol>& shared_vars() const { return shared_vars_; }
  std::optional<std::size_t> SharedSlot(Symbol var) const;

  const std::vector<Symbol>& shared_arrays() const { return shared_arrays_; }

  const HostFunction& host_function(HostFnId id) const { return host_fns_[id]; }

  Granularity granularity() const { return granularity_; }
  TermId skip() const { return skip_; }

 private:
  friend class ProgramBuilder;

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> symbol_index_;
  std::vector<ExprNode> exprs_;
  std::vector<TermNode> terms_;
  std::unordered_map<Symbol, Definition> definitions_;
  std::vector<ChannelDecl> channels_;
  std::map<ChannelId, std::size_t> channel_slots_;
  std::vector<Symbol> shared_vars_;
  std::vector<Symbol> shared_arrays_;
  std::vector<HostFunction> host_fns_;
  Granularity granularity_ = Granularity::kMicroStep;
  TermId skip_ = 0;
};

/**
 * Incremental construction of a Program. Calls may reference definitions
 * that are added later; Build() checks that every call resolves with the
 * right arity and that every channel has a positive capacity.
 */
class ProgramBuilder {
 public:
  ProgramBuilder();

  Symbol Sym(const std::string& name);

  ExprId Lit(std::int64_t v);
  ExprId Var(const std::string& name);
  ExprId Add(ExprId a, ExprId b);
  ExprId Sub(ExprId a, ExprId b);
  ExprId Mul(ExprId a, ExprId b);
  ExprId HostCall(HostFnId fn, std::vector<ExprId> args);

  Cond Eq(ExprId a, ExprId b) const { return {CmpOp::kEq, a, b}; }
  Cond Ne(ExprId a, ExprId b) const { return {CmpOp::kNe, a, b}; }
  Cond Lt(ExprId a, ExprId b) const { return {CmpOp::kLt, a, b}; }

  ChannelExpr Chan(ChannelKind kind, ExprId index) const { return {kind, index}; }
  MessageExpr Plain(ExprId data) const { return {false, 0, 0, data}; }
  MessageExpr Tagged(ExprId phase, ExprId from, ExprId data) const {
    return {true, phase, from, data};
  }

  TermId Skip() const { return program_->skip_; }
  TermId Send(ChannelExpr ch, MessageExpr msg, TermId next);
  TermId Recv(ChannelExpr ch, const std::vector<std::string>& binders,
              std::optional<Cond> guard, TermId next);
  TermId Assign(const std::string& shared_var, ExprId value, TermId next);
  TermId If(Cond cond, TermId then_branch, TermId else_branch);
  TermId If(Cond cond, TermId then_branch) { return If(cond, then_branch, Skip()); }
  TermId Call(const std::string& name, std::vector<ExprId> args);
  TermId Seq(TermId first, TermId next);
  TermId Seq(std::initializer_list<TermId> parts);

  void Define(const std::string& name, const std::vector<std::string>& params,
              TermId body);

  void DeclareChannel(ChannelId id, std::size_t capacity);
  void DeclareShared(const std::string& name);
  void DeclareSharedArray(const std::string& name);
  HostFnId AddHostFunction(HostFunction fn);
  void SetGranularity(Granularity g) { program_->granularity_ = g; }

  std::shared_ptr<const Program> Build();

 private:
  TermId AddTerm(TermNode node);
  ExprId AddExpr(ExprNode node);

  std::shared_ptr<Program> program_;
};

}  // namespace kernel
}  // namespace fedcsp

#endif  // FEDCSP_KERNEL_PROGRAM_HH_
