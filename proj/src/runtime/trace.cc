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

#include "fedcsp/runtime/trace.hh"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace fedcsp {
namespace runtime {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kActionNames[] = {"send", "recv", "assign", "skip"};

json Number(double v) {
  double whole;
  if (std::modf(v, &whole) == 0.0 && std::fabs(v) < 9.0e15) {
    return static_cast<std::int64_t>(v);
  }
  return v;
}

EventMsg ToEventMsg(const kernel::Message& m) {
  EventMsg out;
  if (const auto* t = std::get_if<kernel::TaggedMsg>(&m)) {
    out.phase = t->phase;
    out.from = t->from;
    out.data = t->data.ToDouble();
  } else {
    out.data = std::get<kernel::PlainMsg>(m).data.ToDouble();
  }
  return out;
}

}  // namespace

const char* ActionName(Action a) { return kActionNames[static_cast<int>(a)]; }

std::optional<Action> ParseAction(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    if (name == kActionNames[i]) return static_cast<Action>(i);
  }
  return std::nullopt;
}

TraceEvent MakeEvent(std::size_t step, kernel::NodeId node, const kernel::ActionLabel& label) {
  TraceEvent e;
  e.step = step;
  e.node = node;
  if (const auto* s = std::get_if<kernel::SendAct>(&label)) {
    e.action = Action::kSend;
    e.channel = s->channel;
    e.msg = ToEventMsg(s->msg);
  } else if (const auto* r = std::get_if<kernel::RecvAct>(&label)) {
    e.action = Action::kRecv;
    e.channel = r->channel;
    e.msg = ToEventMsg(r->msg);
  } else if (std::holds_alternative<kernel::AssignAct>(label)) {
    e.action = Action::kAssign;
  } else {
    e.action = Action::kSkip;
  }
  return e;
}

AbstractEvent Abstract(const TraceEvent& e) {
  AbstractEvent a{e.node, e.action, e.channel, std::nullopt, std::nullopt};
  if (e.msg) {
    a.phase = e.msg->phase;
    a.from = e.msg->from;
  }
  return a;
}

std::string EventToJson(const TraceEvent& e) {
  json j;
  j["step"] = e.step;
  j["node"] = e.node;
  j["action"] = ActionName(e.action);
  j["channel"] = e.channel ? json(kernel::ChannelName(*e.channel)) : json(nullptr);
  if (e.msg) {
    json m;
    if (e.msg->phase) m["phase"] = *e.msg->phase;
    if (e.msg->from) m["from"] = *e.msg->from;
    m["data"] = Number(e.msg->data);
    j["msg"] = std::move(m);
  } else {
    j["msg"] = nullptr;
  }
  return j.dump();
}

void WriteJsonl(std::ostream& out, const ConcreteTrace& trace) {
  for (const auto& e : trace) out << EventToJson(e) << '\n';
}

TraceEvent EventFromJson(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw std::runtime_error(std::string("bad trace line: ") + ex.what());
  }
  auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("bad trace event (" + why + "): " + line);
  };
  if (!j.is_object()) throw fail("not an object");
  TraceEvent e;
  try {
    if (j.at("step").get<std::int64_t>() < 0) throw fail("negative step");
    e.step = j.at("step").get<std::size_t>();
    e.node = j.at("node").get<kernel::NodeId>();
    auto action = ParseAction(j.at("action").get<std::string>());
    if (!action) throw fail("unknown action");
    e.action = *action;
    const json& ch = j.at("channel");
    if (!ch.is_null()) {
      auto id = kernel::ParseChannelName(ch.get<std::string>());
      if (!id) throw fail("unknown channel");
      e.channel = *id;
    }
    const json& m = j.at("msg");
    if (!m.is_null()) {
      EventMsg msg;
      if (m.contains("phase")) msg.phase = m.at("phase").get<std::int64_t>();
      if (m.contains("from")) msg.from = m.at("from").get<kernel::NodeId>();
      msg.data = m.at("data").get<double>();
      e.msg = msg;
    }
  } catch (const json::exception& ex) {
    throw fail(ex.what());
  }
  return e;
}

ConcreteTrace ReadJsonl(std::istream& in) {
  ConcreteTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trace.push_back(EventFromJson(line));
  }
  return trace;
}

}  // namespace runtime
}  // namespace fedcsp
