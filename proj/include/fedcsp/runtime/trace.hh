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

#ifndef FEDCSP_RUNTIME_TRACE_HH_
#define FEDCSP_RUNTIME_TRACE_HH_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedcsp/kernel/state.hh"

namespace fedcsp {
namespace runtime {

enum class Action { kSend, kRecv, kAssign, kSkip };

const char* ActionName(Action a);
std::optional<Action> ParseAction(const std::string& name);

struct EventMsg {
  std::optional<std::int64_t> phase;  // set for tagged messages
  std::optional<kernel::NodeId> from;
  double data = 0;

  friend bool operator==(const EventMsg&, const EventMsg&) = default;
};

struct TraceEvent {
  std::size_t step = 0;
  kernel::NodeId node = 0;
  Action action = Action::kSkip;
  std::optional<kernel::ChannelId> channel;  // send and recv only
  std::optional<EventMsg> msg;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

using ConcreteTrace = std::vector<TraceEvent>;

/// Event for one kernel step; payloads are taken as doubles.
TraceEvent MakeEvent(std::size_t step, kernel::NodeId node, const kernel::ActionLabel& label);

/// Payload-free view used for conformance: (node, action, channel, phase, from).
struct AbstractEvent {
  kernel::NodeId node = 0;
  Action action = Action::kSkip;
  std::optional<kernel::ChannelId> channel;
  std::optional<std::int64_t> phase;
  std::optional<kernel::NodeId> from;

  friend bool operator==(const AbstractEvent&, const AbstractEvent&) = default;
};

AbstractEvent Abstract(const TraceEvent& e);

/// One JSON object per line: step, node, action, channel, msg.
std::string EventToJson(const TraceEvent& e);
void WriteJsonl(std::ostream& out, const ConcreteTrace& trace);

/// Throws std::runtime_error on malformed input.
TraceEvent EventFromJson(const std::string& line);
ConcreteTrace ReadJsonl(std::istream& in);

}  // namespace runtime
}  // namespace fedcsp

#endif  // FEDCSP_RUNTIME_TRACE_HH_
