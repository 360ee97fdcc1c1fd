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

#include "fedcsp/kernel/program.hh"

#include <algorithm>

namespace fedcsp {
namespace kernel {

const Definition* Program::FindDefinition(Symbol name) const {
  auto it = definitions_.find(name);
  return it == definitions_.end() ? nullptr : &it->second;
}

std::optional<Symbol> Program::FindSymbol(const std::string& name) const {
  auto it = symbol_index_.find(name);
  if (it == symbol_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Program::ChannelSlot(const ChannelId& id) const {
  auto it = channel_slots_.find(id);
  if (it == channel_slots_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Program::SharedSlot(Symbol var) const {
  auto it = std::find(shared_vars_.begin(), shared_vars_.end(), var);
  if (it == shared_vars_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - shared_vars_.begin());
}

ProgramBuilder::ProgramBuilder() : program_(std::make_shared<Program>()) {
  program_->skip_ = AddTerm(TermNode{});
}

Symbol ProgramBuilder::Sym(const std::string& name) {
  auto [it, inserted] = program_->symbol_index_.try_emplace(
      name, static_cast<Symbol>(program_->symbols_.size()));
  if (inserted) program_->symbols_.push_back(name);
  return it->second;
}

ExprId ProgramBuilder::AddExpr(ExprNode node) {
  program_->exprs_.push_back(std::move(node));
  return static_cast<ExprId>(program_->exprs_.size() - 1);
}

TermId ProgramBuilder::AddTerm(TermNode node) {
  program_->terms_.push_back(std::move(node));
  return static_cast<TermId>(program_->terms_.size() - 1);
}

ExprId ProgramBuilder::Lit(std::int64_t v) {
  ExprNode n;
  n.op = ExprOp::kLiteral;
  n.literal = v;
  return AddExpr(std::move(n));
}

ExprId ProgramBuilder::Var(const std::string& name) {
  ExprNode n;
  n.op = ExprOp::kVar;
  n.var = Sym(name);
  return AddExpr(std::move(n));
}

namespace {
ExprNode Binary(ExprOp op, ExprId a, ExprId b) {
  ExprNode n;
  n.op = op;
  n.args = {a, b};
  return n;
}
}  // namespace

ExprId ProgramBuilder::Add(ExprId a, ExprId b) { return AddExpr(Binary(ExprOp::kAdd, a, b)); }
ExprId ProgramBuilder::Sub(ExprId a, ExprId b) { return AddExpr(Binary(ExprOp::kSub, a, b)); }
ExprId ProgramBuilder::Mul(ExprId a, ExprId b) { return AddExpr(Binary(ExprOp::kMul, a, b)); }

ExprId ProgramBuilder::HostCall(HostFnId fn, std::vector<ExprId> args) {
  if (fn >= program_->host_fns_.size()) {
    throw ModelError("unknown host function #" + std::to_string(fn));
  }
  ExprNode n;
  n.op = ExprOp::kHostCall;
  n.fn = fn;
  n.args = std::move(args);
  return AddExpr(std::move(n));
}

TermId ProgramBuilder::Send(ChannelExpr ch, MessageExpr msg, TermId next) {
  TermNode t;
  t.kind = TermKind::kSend;
  t.channel = ch;
  t.message = msg;
  t.next = next;
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::Recv(ChannelExpr ch, const std::vector<std::string>& binders,
                            std::optional<Cond> guard, TermId next) {
  if (binders.size() != 1 && binders.size() != 3) {
    throw ModelError("receive needs 1 (plain) or 3 (tagged) binders");
  }
  TermNode t;
  t.kind = TermKind::kRecv;
  t.channel = ch;
  for (const auto& b : binders) t.binders.push_back(Sym(b));
  t.guard = guard;
  t.next = next;
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::Assign(const std::string& shared_var, ExprId value,
                              TermId next) {
  TermNode t;
  t.kind = TermKind::kAssign;
  t.target = Sym(shared_var);
  t.value = value;
  t.next = next;
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::If(Cond cond, TermId then_branch, TermId else_branch) {
  TermNode t;
  t.kind = TermKind::kIf;
  t.cond = cond;
  t.then_branch = then_branch;
  t.else_branch = else_branch;
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::Call(const std::string& name, std::vector<ExprId> args) {
  TermNode t;
  t.kind = TermKind::kCall;
  t.callee = Sym(name);
  t.args = std::move(args);
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::Seq(TermId first, TermId next) {
  TermNode t;
  t.kind = TermKind::kSeq;
  t.first = first;
  t.next = next;
  return AddTerm(std::move(t));
}

TermId ProgramBuilder::Seq(std::initializer_list<TermId> parts) {
  if (parts.size() == 0) return Skip();
  std::vector<TermId> v(parts);
  TermId acc = v.back();
  for (auto it = v.rbegin() + 1; it != v.rend(); ++it) acc = Seq(*it, acc);
  return acc;
}

void ProgramBuilder::Define(const std::string& name,
                            const std::vector<std::string>& params, TermId body) {
  Definition d;
  d.name = Sym(name);
  for (const auto& p : params) d.params.push_back(Sym(p));
  d.body = body;
  if (!program_->definitions_.emplace(d.name, d).second) {
    throw ModelError("process '" + name + "' defined twice");
  }
}

void ProgramBuilder::DeclareChannel(ChannelId id, std::size_t capacity) {
  if (capacity == 0) {
    throw ModelError("channel " + ChannelName(id) + " declared with capacity 0");
  }
  if (program_->channel_slots_.count(id)) {
    throw ModelError("channel " + ChannelName(id) + " declared twice");
  }
  program_->channel_slots_[id] = program_->channels_.size();
  program_->channels_.push_back({id, capacity});
}

void ProgramBuilder::DeclareShared(const std::string& name) {
  Symbol s = Sym(name);
  if (!program_->SharedSlot(s)) program_->shared_vars_.push_back(s);
}

void ProgramBuilder::DeclareSharedArray(const std::string& name) {
  program_->shared_arrays_.push_back(Sym(name));
}

HostFnId ProgramBuilder::AddHostFunction(HostFunction fn) {
  program_->host_fns_.push_back(std::move(fn));
  return static_cast<HostFnId>(program_->host_fns_.size() - 1);
}

std::shared_ptr<const Program> ProgramBuilder::Build() {
  const Program& p = *program_;
  for (const auto& t : p.terms_) {
    if (t.kind == TermKind::kCall) {
      const Definition* d = p.FindDefinition(t.callee);
      if (d == nullptr) {
        throw ModelError("call to undefined process '" + p.SymbolName(t.callee) + "'");
      }
      if (d->params.size() != t.args.size()) {
        throw ModelError("process '" + p.SymbolName(t.callee) + "' expects " +
                         std::to_string(d->params.size()) + " arguments, got " +
                         std::to_string(t.args.size()));
      }
    }
    if (t.kind == TermKind::kAssign && !p.SharedSlot(t.target)) {
      throw ModelError("assignment to undeclared shared variable '" +
                       p.SymbolName(t.target) + "'");
    }
  }
  auto out = std::move(program_);
  program_ = std::make_shared<Program>();
  return out;
}

}  // namespace kernel
}  // namespace fedcsp
