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

#include "doctest.h"
#include "fedcsp/checker/checker.hh"
#include "fedcsp/checker/state_store.hh"
#include "fedcsp/kernel/encoding.hh"
#include "fedcsp/kernel/semantics.hh"
#include "protocol_oracle.hh"

using namespace fedcsp;
using checker::Strategy;
using kernel::ChannelKind;

namespace {

constexpr auto kCe = models::Variant::kCentralised;
constexpr auto kDe = models::Variant::kDecentralised;

models::SystemModel Sys(models::Variant v, int n, kernel::NodeId srv = 0,
                        kernel::Granularity g = kernel::Granularity::kMicroStep) {
  models::ModelConfig cfg;
  cfg.variant = v;
  cfg.nodes = n;
  cfg.server_id = srv;
  cfg.granularity = g;
  return models::Build(cfg);
}

struct Verdicts {
  checker::CheckResult deadlock, reaches, eventually;
};

Verdicts CheckAll(const models::SystemModel& sys, Strategy s) {
  return {checker::CheckDeadlockFree(sys, s), checker::CheckReaches(sys, checker::Terminated(), s),
          checker::CheckAlwaysEventually(sys, checker::Terminated())};
}

void ExpectReplays(const models::SystemModel& sys, const checker::CheckResult& r) {
  REQUIRE(!r.verdict.valid());
  REQUIRE(r.verdict.trace().has_value());
  auto p = checker::Terminated();
  auto replay = checker::ReplayCounterexample(sys.initial, *r.verdict.trace(), &p);
  CHECK_MESSAGE(replay.ok, replay.error);
}

}  // namespace

TEST_CASE("state store") {
  checker::StateStore store;
  std::vector<std::vector<std::uint8_t>> items;
  for (int i = 0; i < 20000; ++i) {
    items.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i >> 8), 7});
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    // Deliberately poor hash so probing and full comparison are exercised.
    auto [id, fresh] = store.Insert(items[i], i % 13);
    CHECK(fresh);
    CHECK(id == i);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [id, fresh] = store.Insert(items[i], i % 13);
    CHECK(!fresh);
    CHECK(id == i);
    auto got = store.Get(id);
    CHECK(std::vector<std::uint8_t>(got.begin(), got.end()) == items[i]);
  }
  CHECK(store.size() == items.size());
  CHECK(store.MemoryUsage() > 0);
}

TEST_CASE("frozen fixture: centralised n=2 srv=0") {
  auto sys = Sys(kCe, 2, 0);
  for (auto s : {Strategy::kDfs, Strategy::kBfs}) {
    auto st = checker::Explore(sys, s);
    CHECK(st.states == 25);
    CHECK(st.transitions == 32);
  }
}

TEST_CASE("published verdicts hold under both strategies") {
  for (auto sys : {Sys(kCe, 3, 2), Sys(kDe, 3)}) {
    for (auto s : {Strategy::kDfs, Strategy::kBfs}) {
      auto v = CheckAll(sys, s);
      CHECK(v.deadlock.verdict.valid());
      CHECK(v.reaches.verdict.valid());
      CHECK(v.eventually.verdict.valid());
    }
  }
}

TEST_CASE("checker agrees with the independent enumerator") {
  for (auto g : {kernel::Granularity::kMicroStep, kernel::Granularity::kAtomic}) {
    for (int n = 1; n <= 3; ++n) {
      for (bool de : {false, true}) {
        std::vector<kernel::NodeId> servers{0};
        if (!de && n > 1) servers.push_back(n - 1);
        for (auto srv : servers) {
          CAPTURE(n);
          CAPTURE(de);
          CAPTURE(srv);
          CAPTURE(static_cast<int>(g));
          oracle::OracleConfig oc;
          oc.decentralised = de;
          oc.nodes = n;
          oc.server = srv;
          oc.atomic = g == kernel::Granularity::kAtomic;
          auto want = oracle::Enumerate(oc);
          auto sys = Sys(de ? kDe : kCe, n, srv, g);
          auto v = CheckAll(sys, Strategy::kBfs);
          CHECK(v.deadlock.stats.states == want.states);
          CHECK(v.deadlock.stats.transitions == want.transitions);
          CHECK(v.deadlock.verdict.valid() == !want.deadlock);
          CHECK(v.reaches.verdict.valid() == want.reaches_terminated);
          CHECK(v.eventually.verdict.valid() == want.always_eventually);
          CHECK(want.all_done_states == 1);
          CHECK(want.all_done_terminated);
        }
      }
    }
  }
}

TEST_CASE("checker agrees with the enumerator on mutants") {
  struct Case {
    models::SystemModel sys;
    oracle::OracleConfig oc;
  };
  std::vector<Case> cases;
  {
    oracle::OracleConfig oc;
    oc.nodes = 3;
    oc.server = 2;
    oc.expect_extra_update = true;
    cases.push_back({models::ApplyMutation(Sys(kCe, 3, 2), models::ExpectExtraUpdate{}), oc});
  }
  {
    oracle::OracleConfig oc;
    oc.nodes = 2;
    oc.server = 0;
    oc.silent = 1;
    cases.push_back({models::ApplyMutation(Sys(kCe, 2, 0), models::SkipReply{}), oc});
  }
  {
    oracle::OracleConfig oc;
    oc.decentralised = true;
    oc.nodes = 3;
    oc.strict_phase_order = true;
    cases.push_back({models::ApplyMutation(Sys(kDe, 3), models::StrictPhaseOrder{}), oc});
  }
  {
    oracle::OracleConfig oc;
    oc.decentralised = true;
    oc.nodes = 3;
    oc.cap_tonode = 1;
    cases.push_back({models::ApplyMutation(Sys(kDe, 3),
                                           models::CapacityOverride{ChannelKind::kToNode, 1}),
                     oc});
  }
  {
    oracle::OracleConfig oc;
    oc.decentralised = true;
    oc.nodes = 2;
    oc.silent = 0;
    cases.push_back({models::ApplyMutation(Sys(kDe, 2), models::SkipReply{}), oc});
  }
  for (const auto& c : cases) {
    CAPTURE(models::MutationName(c.sys.mutations.back()));
    auto want = oracle::Enumerate(c.oc);
    auto v = CheckAll(c.sys, Strategy::kDfs);
    CHECK(v.deadlock.stats.states == want.states);
    CHECK(v.deadlock.stats.transitions == want.transitions);
    CHECK(v.deadlock.verdict.valid() == !want.deadlock);
    CHECK(v.reaches.verdict.valid() == want.reaches_terminated);
    CHECK(v.eventually.verdict.valid() == want.always_eventually);
  }
}

TEST_CASE("strategies explore the same space") {
  for (auto sys : {Sys(kCe, 3, 0), Sys(kDe, 2),
                   models::ApplyMutation(Sys(kCe, 3, 2), models::ExpectExtraUpdate{})}) {
    auto a = checker::CheckDeadlockFree(sys, Strategy::kDfs);
    auto b = checker::CheckDeadlockFree(sys, Strategy::kBfs);
    CHECK(a.stats.states == b.stats.states);
    CHECK(a.stats.transitions == b.stats.transitions);
    CHECK(a.verdict.valid() == b.verdict.valid());
  }
}

TEST_CASE("deadlock counterexamples replay; BFS ones are shortest") {
  auto sys = models::ApplyMutation(Sys(kCe, 3, 2), models::ExpectExtraUpdate{});
  auto dfs = checker::CheckDeadlockFree(sys, Strategy::kDfs);
  auto bfs = checker::CheckDeadlockFree(sys, Strategy::kBfs);
  ExpectReplays(sys, dfs);
  ExpectReplays(sys, bfs);
  CHECK(bfs.verdict.trace()->prefix.size() <= dfs.verdict.trace()->prefix.size());
  CHECK(!bfs.verdict.trace()->cycle_start);
  // With atomic steps every deadlocked run has the same length.
  auto atomic = models::ApplyMutation(Sys(kCe, 3, 2, kernel::Granularity::kAtomic),
                                      models::ExpectExtraUpdate{});
  auto r = checker::CheckDeadlockFree(atomic, Strategy::kBfs);
  ExpectReplays(atomic, r);
  CHECK(r.verdict.trace()->prefix.size() == 9);
}

TEST_CASE("reaches violation carries no trace") {
  auto sys = models::ApplyMutation(Sys(kCe, 2, 0), models::SkipReply{});
  auto r = checker::CheckReaches(sys, checker::Terminated(), Strategy::kBfs);
  CHECK(!r.verdict.valid());
  CHECK(!r.verdict.trace());
}

TEST_CASE("strict phase order: lasso exposes a phase-2 head during phase-1 processing") {
  auto sys = models::ApplyMutation(Sys(kDe, 3), models::StrictPhaseOrder{});
  auto r = checker::CheckAlwaysEventually(sys, checker::Terminated());
  ExpectReplays(sys, r);
  const auto& trace = *r.verdict.trace();
  REQUIRE(trace.cycle_start);
  auto p = checker::Terminated();
  auto replay = checker::ReplayCounterexample(sys.initial, trace, &p);
  bool hazard = false;
  for (const auto& s : replay.states) {
    for (kernel::NodeId i = 0; i < 3; ++i) {
      const auto& q = s.Queue({ChannelKind::kToNode, i});
      if (q.empty() || std::get<kernel::TaggedMsg>(q.front()).phase != 2) continue;
      // The node is still in its guarded phase-1 loop: nothing it can do.
      bool node_enabled = false;
      for (const auto& t : kernel::EnabledTransitions(s)) node_enabled |= t.node == i;
      hazard |= !node_enabled && !s.nodes[static_cast<std::size_t>(i)].done();
    }
  }
  CHECK(hazard);
}

TEST_CASE("lasso on a genuine cycle") {
  // Two nodes bounce a token forever; terminated is never set.
  kernel::ProgramBuilder b;
  b.DeclareShared("terminated");
  b.DeclareChannel({ChannelKind::kToNode, 0}, 1);
  b.DeclareChannel({ChannelKind::kToNode, 1}, 1);
  auto to = [&](int i) { return b.Chan(ChannelKind::kToNode, b.Lit(i)); };
  b.Define("Ping", {},
           b.Send(to(1), b.Plain(b.Lit(0)), b.Recv(to(0), {"x"}, std::nullopt, b.Call("Ping", {}))));
  b.Define("Pong", {}, b.Recv(to(1), {"x"}, std::nullopt,
                              b.Send(to(0), b.Plain(b.Lit(0)), b.Call("Pong", {}))));
  auto program = b.Build();
  auto s = kernel::EmptyState(program, 2);
  auto body = [&](const char* name) {
    return program->FindDefinition(*program->FindSymbol(name))->body;
  };
  s.nodes[0] = kernel::StartNode(*program, body("Ping"), {});
  s.nodes[1] = kernel::StartNode(*program, body("Pong"), {});
  auto r = checker::CheckAlwaysEventually(s, checker::Terminated());
  REQUIRE(!r.verdict.valid());
  const auto& trace = *r.verdict.trace();
  REQUIRE(trace.cycle_start);
  CHECK(*trace.cycle_start < trace.prefix.size());
  auto p = checker::Terminated();
  auto replay = checker::ReplayCounterexample(s, trace, &p);
  CHECK_MESSAGE(replay.ok, replay.error);
  CHECK(checker::CheckDeadlockFree(s, Strategy::kDfs).verdict.valid());
  CHECK(!checker::CheckReaches(s, p, Strategy::kDfs).verdict.valid());
}

TEST_CASE("replay rejects forged counterexamples") {
  auto sys = Sys(kCe, 3, 2);
  auto p = checker::Terminated();
  checker::CounterexampleTrace empty;
  CHECK(!checker::ReplayCounterexample(sys.initial, empty, &p).ok);  // initial is not a deadlock
  checker::CounterexampleTrace bogus;
  bogus.prefix.push_back({0, kernel::SkipAct{}});
  auto r = checker::ReplayCounterexample(sys.initial, bogus, &p);
  CHECK(!r.ok);
  CHECK(r.error.find("not enabled") != std::string::npos);
  checker::CounterexampleTrace lasso;
  lasso.cycle_start = 0;
  CHECK(!checker::ReplayCounterexample(sys.initial, lasso, &p).ok);
}

TEST_CASE("budget exhaustion raises ResourceExceeded") {
  auto sys = Sys(kDe, 3);
  checker::Budget tight;
  tight.max_states = 1000;
  CHECK_THROWS_AS(checker::Explore(sys, Strategy::kDfs, tight), checker::ResourceExceeded);
  CHECK_THROWS_AS(checker::CheckAlwaysEventually(sys, checker::Terminated(), tight),
                  checker::ResourceExceeded);
  try {
    checker::CheckDeadlockFree(sys, Strategy::kBfs, tight);
    FAIL("expected ResourceExceeded");
  } catch (const checker::ResourceExceeded& e) {
    CHECK(e.stats().states > 1000);
  }
  checker::Budget no_time;
  no_time.max_time = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(checker::Explore(sys, Strategy::kBfs, no_time), checker::ResourceExceeded);
}
