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

#include "fedcsp/kernel/state.hh"

#include <algorithm>

namespace fedcsp {
namespace kernel {

const Value* Env::Lookup(Symbol var) const {
  auto it = std::lower_bound(
      bindings_.begin(), bindings_.end(), var,
      [](const Binding& b, Symbol s) { return b.var < s; });
  if (it == bindings_.end() || it->var != var) return nullptr;
  return &it->value;
}

void Env::Bind(Symbol var, Value value) {
  auto it = std::lower_bound(
      bindings_.begin(), bindings_.end(), var,
      [](const Binding& b, Symbol s) { return b.var < s; });
  if (it != bindings_.end() && it->var == var) {
    it->value = std::move(value);
  } else {
    bindings_.insert(it, Binding{var, std::move(value)});
  }
}

const std::vector<Message>& GlobalState::Queue(const ChannelId& id) const {
  auto slot = program->ChannelSlot(id);
  if (!slot) throw ModelError("no channel " + ChannelName(id) + " in this system");
  return channels[*slot];
}

const Value& GlobalState::Shared(const std::string& name) const {
  auto sym = program->FindSymbol(name);
  auto slot = sym ? program->SharedSlot(*sym) : std::nullopt;
  if (!slot) throw ModelError("no shared variable '" + name + "'");
  return shared[*slot];
}

const std::vector<Value>& GlobalState::Array(const std::string& name) const {
  const auto& names = program->shared_arrays();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (program->SymbolName(names[i]) == name) return arrays[i];
  }
  throw ModelError("no shared array '" + name + "'");
}

bool operator==(const GlobalState& a, const GlobalState& b) {
  return a.program == b.program && a.nodes == b.nodes &&
         a.channels == b.channels && a.shared == b.shared && a.arrays == b.arrays;
}

std::string Describe(const Program& program, const ActionLabel& label) {
  return std::visit(
      [&](const auto& act) -> std::string {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, SendAct>) {
          return ChannelName(act.channel) + "!" + Describe(act.msg);
        } else if constexpr (std::is_same_v<T, RecvAct>) {
          return ChannelName(act.channel) + "?" + Describe(act.msg);
        } else if constexpr (std::is_same_v<T, AssignAct>) {
          return "{" + program.SymbolName(act.var) + " = " + act.value.Describe() + "}";
        } else {
          return "tau";
        }
      },
      label);
}

}  // namespace kernel
}  // namespace fedcsp
