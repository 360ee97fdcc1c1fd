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

#include "fedcsp/kernel/value.hh"

#include <charconv>

namespace fedcsp {
namespace kernel {

std::int64_t Value::as_int() const {
  if (const auto* v = std::get_if<std::int64_t>(&rep_)) return *v;
  throw ModelError("integer expected, got host value " + Describe());
}

const HostValue& Value::as_host() const {
  if (const auto* v = std::get_if<HostRef>(&rep_)) return **v;
  throw ModelError("host value expected, got integer " + Describe());
}

double Value::ToDouble() const {
  if (is_int()) return static_cast<double>(as_int());
  return as_host().ToDouble();
}

std::string Value::Describe() const {
  if (is_int()) return std::to_string(as_int());
  return as_host().Describe();
}

bool operator==(const Value& a, const Value& b) {
  if (a.is_int() != b.is_int()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  const auto& pa = std::get<HostRef>(a.rep_);
  const auto& pb = std::get<HostRef>(b.rep_);
  return pa == pb || pa->Equals(*pb);
}

std::string Describe(const Message& msg) {
  if (const auto* p = std::get_if<PlainMsg>(&msg)) return p->data.Describe();
  const auto& t = std::get<TaggedMsg>(msg);
  return std::to_string(t.phase) + "." + std::to_string(t.from) + "." +
         t.data.Describe();
}

std::string ChannelKindName(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kServerToClient:
      return "server2client";
    case ChannelKind::kClientsToServer:
      return "clients2server";
    case ChannelKind::kToNode:
      return "tonode";
    case ChannelKind::kBuffer:
      return "buffer";
  }
  return "?";
}

std::optional<ChannelKind> ParseChannelKind(const std::string& name) {
  for (auto k : {ChannelKind::kServerToClient, ChannelKind::kClientsToServer,
                 ChannelKind::kToNode, ChannelKind::kBuffer}) {
    if (ChannelKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string ChannelName(const ChannelId& id) {
  if (id.kind == ChannelKind::kClientsToServer) return "clients2server";
  return ChannelKindName(id.kind) + "[" + std::to_string(id.index) + "]";
}

std::optional<ChannelId> ParseChannelName(const std::string& name) {
  if (name == "clients2server") return ChannelId{ChannelKind::kClientsToServer, 0};
  auto open = name.find('[');
  if (open == std::string::npos || name.back() != ']') return std::nullopt;
  auto kind = ParseChannelKind(name.substr(0, open));
  if (!kind || *kind == ChannelKind::kClientsToServer) return std::nullopt;
  NodeId index = 0;
  const char* first = name.data() + open + 1;
  const char* last = name.data() + name.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || ptr != last || index < 0) return std::nullopt;
  return ChannelId{*kind, index};
}

}  // namespace kernel
}  // namespace fedcsp
