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

#ifndef FEDCSP_KERNEL_STATE_HH_
#define FEDCSP_KERNEL_STATE_HH_

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fedcsp/kernel/program.hh"
#include "fedcsp/kernel/value.hh"

namespace fedcsp {
namespace kernel {

struct Binding {
  Symbol var = 0;
  Value value;

  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Variable environment, kept sorted by symbol so equality is structural.
class Env {
 public:
  Env() = default;

  const Value* Lookup(Symbol var) const;
  void Bind(Symbol var, Value value);

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }

  friend bool operator==(const Env&, const Env&) = default;

 private:
  std::vector<Binding> bindings_;
};

struct Frame {
  TermId term = 0;
  Env env;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/**
 * Remaining behaviour of one node. The continuation is a stack of closures;
 * the top frame (back) runs first and each frame below is what follows it
 * sequentially. An empty stack is the terminated process Skip.
 */
struct NodeState {
  std::vector<Frame> stack;

  bool done() const { return stack.empty(); }

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct GlobalState {
  std::shared_ptr<const Program> program;
  std::vector<NodeState> nodes;
  // Queues indexed by the program's channel slots; front is the oldest.
  std::vector<std::vector<Message>> channels;
  std::vector<Value> shared;
  std::vector<std::vector<Value>> arrays;

  const std::vector<Message>& Queue(const ChannelId& id) const;
  const Value& Shared(const std::string& name) const;
  const std::vector<Value>& Array(const std::string& name) const;

  friend bool operator==(const GlobalState& a, const GlobalState& b);
};

struct SendAct {
  ChannelId channel;
  Message msg;
  friend bool operator==(const SendAct&, const SendAct&) = default;
};

struct RecvAct {
  ChannelId channel;
  Message msg;
  friend bool operator==(const RecvAct&, const RecvAct&) = default;
};

struct AssignAct {
  Symbol var = 0;
  Value value;
  friend bool operator==(const AssignAct&, const AssignAct&) = default;
};

/// If-resolution or skip-elimination; only produced at micro-step granularity.
struct SkipAct {
  friend bool operator==(const SkipAct&, const SkipAct&) = default;
};

using ActionLabel = std::variant<SendAct, RecvAct, AssignAct, SkipAct>;

std::string Describe(const Program& program, const ActionLabel& label);

struct Transition {
  NodeId node = 0;
  ActionLabel label;
  GlobalState successor;
};

}  // namespace kernel
}  // namespace fedcsp

#endif  // FEDCSP_KERNEL_STATE_HH_
