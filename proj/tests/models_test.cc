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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "fedcsp/kernel/semantics.hh"
#include "fedcsp/models/models.hh"
#include "test_util.hh"

using namespace fedcsp;
using kernel::ChannelId;
using kernel::ChannelKind;
using kernel::Value;

namespace {

models::ModelConfig Cfg(models::Variant v, int n, kernel::NodeId srv = 0) {
  models::ModelConfig cfg;
  cfg.variant = v;
  cfg.nodes = n;
  cfg.server_id = srv;
  return cfg;
}

constexpr auto kCe = models::Variant::kCentralised;
constexpr auto kDe = models::Variant::kDecentralised;

std::map<ChannelId, std::size_t> Channels(const models::SystemModel& sys) {
  std::map<ChannelId, std::size_t> out;
  for (const auto& d : sys.program().channels()) out[d.id] = d.capacity;
  return out;
}

// Tally slots for complete-run enumeration.
enum Slot { kS2C, kC2S, kPhase1, kPhase2, kBufIn, kBufOut, kSlots };

void CountComm(kernel::NodeId, const kernel::ActionLabel& l, testutil::Tally& t) {
  if (auto* s = std::get_if<kernel::SendAct>(&l)) {
    switch (s->channel.kind) {
      case ChannelKind::kServerToClient: ++t[kS2C]; break;
      case ChannelKind::kClientsToServer: ++t[kC2S]; break;
      case ChannelKind::kToNode:
        ++t[std::get<kernel::TaggedMsg>(s->msg).phase == 1 ? kPhase1 : kPhase2];
        break;
      case ChannelKind::kBuffer: ++t[kBufIn]; break;
    }
  }
  if (auto* r = std::get_if<kernel::RecvAct>(&l)) {
    if (r->channel.kind == ChannelKind::kBuffer) ++t[kBufOut];
  }
}

std::vector<Value> Payloads(const kernel::ActionLabel& l) {
  const kernel::Message* m = nullptr;
  if (auto* s = std::get_if<kernel::SendAct>(&l)) m = &s->msg;
  if (auto* r = std::get_if<kernel::RecvAct>(&l)) m = &r->msg;
  if (m == nullptr) return {};
  if (auto* p = std::get_if<kernel::PlainMsg>(m)) return {p->data};
  return {std::get<kernel::TaggedMsg>(*m).data};
}

}  // namespace

TEST_CASE("variant names round-trip") {
  CHECK(models::VariantName(kCe) == "centralised");
  CHECK(models::ParseVariant("decentralised") == kDe);
  CHECK(!models::ParseVariant("federated"));
}

TEST_CASE("centralised n=3 srv=2 channel declarations") {
  auto sys = models::Build(Cfg(kCe, 3, 2));
  std::map<ChannelId, std::size_t> want{
      {{ChannelKind::kServerToClient, 0}, 1},
      {{ChannelKind::kServerToClient, 1}, 1},
      {{ChannelKind::kServerToClient, 2}, 1},
      {{ChannelKind::kClientsToServer, 0}, 2},
  };
  CHECK(Channels(sys) == want);
  CHECK(sys.initial.nodes.size() == 3);
  CHECK(sys.initial.Shared("terminated") == Value(0));
}

TEST_CASE("decentralised n=3 channel declarations") {
  auto sys = models::Build(Cfg(kDe, 3));
  std::map<ChannelId, std::size_t> want;
  for (kernel::NodeId i = 0; i < 3; ++i) {
    want[{ChannelKind::kToNode, i}] = 4;
    want[{ChannelKind::kBuffer, i}] = 2;
  }
  CHECK(Channels(sys) == want);
  CHECK(models::DefaultCapacity(ChannelKind::kToNode, 3) == 4);
  CHECK(models::DefaultCapacity(ChannelKind::kBuffer, 3) == 2);
}

TEST_CASE("n=1 terminates without communicating") {
  for (auto v : {kCe, kDe}) {
    auto sys = models::Build(Cfg(v, 1));
    CHECK(sys.program().channels().empty());
    auto w = testutil::RandomWalk(sys.initial, 1, 1000);
    CHECK(kernel::AllDone(w.states.back()));
    CHECK(w.states.back().Shared("terminated") == Value(1));
    for (const auto& [node, label] : w.steps) {
      CHECK(!std::holds_alternative<kernel::SendAct>(label));
      CHECK(!std::holds_alternative<kernel::RecvAct>(label));
    }
  }
}

TEST_CASE("invalid configurations") {
  CHECK_THROWS_AS(models::Build(Cfg(kCe, 0)), kernel::ModelError);
  CHECK_THROWS_AS(models::Build(Cfg(kCe, 3, 3)), kernel::ModelError);
  auto cfg = Cfg(kCe, 3, 2);
  cfg.ldata = {Value(1)};
  CHECK_THROWS_AS(models::Build(cfg), kernel::ModelError);
  CHECK_THROWS_AS(models::BuildDecentralised(Cfg(kCe, 2)), kernel::ModelError);
}

TEST_CASE("centralised n=2 srv=0: exactly two sends on every complete run") {
  auto sys = models::Build(Cfg(kCe, 2, 0));
  std::size_t runs = 0;
  testutil::ForAllRuns(sys.initial, kSlots, CountComm,
                       [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                         CHECK(kernel::AllDone(s));
                         CHECK(t[kS2C] == 1);
                         CHECK(t[kC2S] == 1);
                         ++runs;
                       });
  CHECK(runs >= 1);
}

TEST_CASE("decentralised n=2: two phase-1 and two phase-2 sends on every complete run") {
  auto sys = models::Build(Cfg(kDe, 2));
  testutil::ForAllRuns(sys.initial, kSlots, CountComm,
                       [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                         CHECK(kernel::AllDone(s));
                         CHECK(t[kPhase1] == 2);
                         CHECK(t[kPhase2] == 2);
                       });
}

TEST_CASE("broadcast completeness over all runs, n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    const std::int64_t n1 = n - 1;
    for (kernel::NodeId srv : {0, n - 1}) {
      auto sys = models::Build(Cfg(kCe, n, srv));
      testutil::ForAllRuns(sys.initial, kSlots, CountComm,
                           [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                             CHECK(kernel::AllDone(s));
                             CHECK(t[kS2C] == n1);
                             CHECK(t[kC2S] == n1);
                           });
    }
    auto sys = models::Build(Cfg(kDe, n));
    std::size_t ends = 0;
    testutil::ForAllRuns(sys.initial, kSlots, CountComm,
                         [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                           CHECK(kernel::AllDone(s));
                           CHECK(t[kPhase1] == n * n1);
                           CHECK(t[kPhase2] == n * n1);
                           CHECK(t[kBufIn] == n * n1);
                           CHECK(t[kBufOut] == n * n1);
                           ++ends;
                         });
    CHECK(ends == 1);
  }
}

TEST_CASE("broadcast completeness on random walks, n = 4") {
  auto sys = models::Build(Cfg(kDe, 4));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto w = testutil::RandomWalk(sys.initial, seed, 100000);
    REQUIRE(kernel::AllDone(w.states.back()));
    testutil::Tally t(kSlots, 0);
    std::map<kernel::NodeId, int> buf_in, buf_out;
    for (const auto& [node, label] : w.steps) {
      CountComm(node, label, t);
      if (auto* s = std::get_if<kernel::SendAct>(&label)) {
        if (s->channel.kind == ChannelKind::kBuffer) ++buf_in[node];
      }
      if (auto* r = std::get_if<kernel::RecvAct>(&label)) {
        if (r->channel.kind == ChannelKind::kBuffer) ++buf_out[node];
      }
    }
    CHECK(t[kPhase1] == 12);
    CHECK(t[kPhase2] == 12);
    for (kernel::NodeId i = 0; i < 4; ++i) {
      CHECK(buf_in[i] == 3);
      CHECK(buf_out[i] == 3);
    }
  }
}

TEST_CASE("pdata never appears in a message payload") {
  for (auto v : {kCe, kDe}) {
    for (int n : {2, 3}) {
      auto cfg = Cfg(v, n, n - 1);
      for (int i = 0; i < n; ++i) {
        cfg.ldata.push_back(Value(i + 1));
        cfg.pdata.push_back(Value(1000 + i));
      }
      auto sys = models::Build(cfg);
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto w = testutil::RandomWalk(sys.initial, seed, 100000);
        for (const auto& [node, label] : w.steps) {
          for (const auto& d : Payloads(label)) CHECK(d.as_int() < 1000);
        }
      }
    }
  }
}

TEST_CASE("replies are computed by addition") {
  auto cfg = Cfg(kCe, 3, 2);
  cfg.ldata = {Value(10), Value(20), Value(5)};
  auto sys = models::Build(cfg);
  auto w = testutil::RandomWalk(sys.initial, 11, 1000);
  std::multiset<std::int64_t> replies;
  for (const auto& [node, label] : w.steps) {
    if (auto* s = std::get_if<kernel::SendAct>(&label)) {
      if (s->channel.kind == ChannelKind::kClientsToServer) {
        replies.insert(std::get<kernel::PlainMsg>(s->msg).data.as_int());
      }
    }
  }
  CHECK(replies == std::multiset<std::int64_t>{15, 25});
}

TEST_CASE("mutations") {
  SUBCASE("expect-extra-update raises the receive bound") {
    auto base = models::Build(Cfg(kCe, 3, 2));
    auto mut = models::ApplyMutation(base, models::ExpectExtraUpdate{});
    CHECK(base.mutations.empty());
    REQUIRE(mut.mutations.size() == 1);
    CHECK(models::MutationName(mut.mutations[0]) == "expect-extra-update");
    // Every maximal run of the mutant stalls with the server still receiving.
    testutil::ForAllRuns(mut.initial, kSlots, CountComm,
                         [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                           CHECK(kernel::Classify(s) == kernel::Status::kDeadlock);
                           CHECK(t[kC2S] == 2);
                         });
  }
  SUBCASE("skip-reply leaves a client silent") {
    auto mut = models::ApplyMutation(models::Build(Cfg(kCe, 2, 0)), models::SkipReply{});
    testutil::ForAllRuns(mut.initial, kSlots, CountComm,
                         [&](const kernel::GlobalState& s, const testutil::Tally& t) {
                           CHECK(kernel::Classify(s) == kernel::Status::kDeadlock);
                           CHECK(t[kC2S] == 0);
                         });
    CHECK_THROWS_AS(models::ApplyMutation(models::Build(Cfg(kCe, 2, 0)),
                                          models::SkipReply{kernel::NodeId{0}}),
                    kernel::ModelError);
  }
  SUBCASE("strict-phase-order never uses the buffer") {
    auto mut = models::ApplyMutation(models::Build(Cfg(kDe, 3)), models::StrictPhaseOrder{});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto w = testutil::RandomWalk(mut.initial, seed, 100000);
      for (const auto& [node, label] : w.steps) {
        if (auto* s = std::get_if<kernel::SendAct>(&label)) {
          CHECK(s->channel.kind != ChannelKind::kBuffer);
        }
        if (auto* r = std::get_if<kernel::RecvAct>(&label)) {
          CHECK(r->channel.kind != ChannelKind::kBuffer);
        }
      }
    }
  }
  SUBCASE("capacity override") {
    auto mut = models::ApplyMutation(models::Build(Cfg(kDe, 3)),
                                     models::CapacityOverride{ChannelKind::kToNode, 1});
    for (const auto& [id, cap] : Channels(mut)) {
      CHECK(cap == (id.kind == ChannelKind::kToNode ? 1u : 2u));
    }
  }
  SUBCASE("inapplicable mutations") {
    auto ce = models::Build(Cfg(kCe, 3, 2));
    auto de = models::Build(Cfg(kDe, 3));
    CHECK_THROWS_AS(models::ApplyMutation(ce, models::StrictPhaseOrder{}), kernel::ModelError);
    CHECK_THROWS_AS(models::ApplyMutation(de, models::ExpectExtraUpdate{}), kernel::ModelError);
    CHECK_THROWS_AS(models::ApplyMutation(de, models::CapacityOverride{ChannelKind::kBuffer, 0}),
                    kernel::ModelError);
    CHECK_THROWS_AS(
        models::ApplyMutation(ce, models::CapacityOverride{ChannelKind::kToNode, 1}),
        kernel::ModelError);
    CHECK_THROWS_AS(models::ApplyMutation(models::Build(Cfg(kCe, 1)), models::SkipReply{}),
                    kernel::ModelError);
  }
}
