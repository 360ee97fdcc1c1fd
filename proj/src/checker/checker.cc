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

#include "fedcsp/checker/checker.hh"

#include <algorithm>
#include <deque>
#include <limits>
#include <span>

#include "fedcsp/checker/state_store.hh"
#include "fedcsp/kernel/encoding.hh"
#include "fedcsp/kernel/semantics.hh"

namespace fedcsp {
namespace checker {

using kernel::GlobalState;
using Clock = std::chrono::steady_clock;

const char* StrategyName(Strategy s) { return s == Strategy::kDfs ? "dfs" : "bfs"; }

Predicate Terminated() {
  return {"terminated", [](const GlobalState& s) {
            const auto& v = s.Shared("terminated");
            return v.is_int() && v.as_int() == 1;
          }};
}

namespace {

constexpr std::int32_t kStutter = -1;
constexpr StateId kNoParent = std::numeric_limits<StateId>::max();

// Visited set plus budget accounting shared by every search.
class Space {
 public:
  Space(const GlobalState& initial, const Budget& budget)
      : program_(initial.program), budget_(budget), start_(Clock::now()) {}

  std::pair<StateId, bool> Intern(const GlobalState& s) {
    scratch_.clear();
    kernel::EncodeState(s, &scratch_);
    auto r = store_.Insert(scratch_, kernel::HashBytes(scratch_));
    if (r.second) {
      stats.states = store_.size();
      if (stats.states > budget_.max_states) Fail("state budget exceeded");
    }
    return r;
  }

  GlobalState Decode(StateId id) const { return kernel::DecodeState(program_, store_.Get(id)); }

  void Tick(std::size_t extra_bytes) {
    if ((++ticks_ & 0xff) != 0) return;
    if (store_.MemoryUsage() + extra_bytes > budget_.max_bytes) Fail("memory budget exceeded");
    if (Clock::now() - start_ > budget_.max_time) Fail("time budget exceeded");
  }

  void Finish() { stats.elapsed = Clock::now() - start_; }

  // Label of the `index`-th enabled transition out of `from`.
  TraceStep StepAt(StateId from, std::int32_t index) const {
    auto ts = kernel::EnabledTransitions(Decode(from));
    const auto& t = ts.at(static_cast<std::size_t>(index));
    return {t.node, t.label};
  }

  StateSpaceStats stats;

 private:
  [[noreturn]] void Fail(const char* what) {
    Finish();
    throw ResourceExceeded(what, stats);
  }

  std::shared_ptr<const kernel::Program> program_;
  Budget budget_;
  Clock::time_point start_;
  StateStore store_;
  std::vector<std::uint8_t> scratch_;
  std::size_t ticks_ = 0;
};

struct Parent {
  StateId from = kNoParent;
  std::int32_t index = 0;
  std::uint32_t depth = 0;
};

// Exhaustive DFS or BFS. `on_state` is called once per reachable state as it
// is expanded, together with its enabled transitions.
class Search {
 public:
  Search(const GlobalState& initial, const Budget& budget) : space_(initial, budget) {
    space_.Intern(initial);
    parents_.push_back({});
  }

  template <typename F>
  void Run(Strategy strategy, F&& on_state) {
    std::deque<StateId> frontier{0};
    while (!frontier.empty()) {
      StateId id;
      if (strategy == Strategy::kBfs) {
        id = frontier.front();
        frontier.pop_front();
      } else {
        id = frontier.back();
        frontier.pop_back();
      }
      GlobalState s = space_.Decode(id);
      auto ts = kernel::EnabledTransitions(s);
      on_state(id, s, ts);
      space_.stats.transitions += ts.size();
      const std::uint32_t depth = parents_[id].depth + 1;
      std::vector<StateId> fresh;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        auto [child, inserted] = space_.Intern(ts[i].successor);
        if (!inserted) continue;
        parents_.push_back({id, static_cast<std::int32_t>(i), depth});
        space_.stats.max_depth = std::max<std::size_t>(space_.stats.max_depth, depth);
        fresh.push_back(child);
      }
      // Reverse so that DFS expands the lowest transition first.
      if (strategy == Strategy::kDfs) std::reverse(fresh.begin(), fresh.end());
      frontier.insert(frontier.end(), fresh.begin(), fresh.end());
      space_.stats.peak_frontier = std::max(space_.stats.peak_frontier, frontier.size());
      space_.Tick(parents_.capacity() * sizeof(Parent) + frontier.size() * sizeof(StateId));
    }
    space_.Finish();
  }

  std::vector<TraceStep> PathTo(StateId id) const {
    std::vector<TraceStep> path;
    while (parents_[id].from != kNoParent) {
      path.push_back(space_.StepAt(parents_[id].from, parents_[id].index));
      id = parents_[id].from;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  const StateSpaceStats& stats() const { return space_.stats; }

 private:
  Space space_;
  std::vector<Parent> parents_;
};

}  // namespace

StateSpaceStats Explore(const GlobalState& initial, Strategy strategy, const Budget& budget) {
  Search search(initial, budget);
  search.Run(strategy, [](StateId, const GlobalState&, const auto&) {});
  return search.stats();
}

CheckResult CheckDeadlockFree(const GlobalState& initial, Strategy strategy,
                              const Budget& budget) {
  Search search(initial, budget);
  std::optional<StateId> bad;
  search.Run(strategy, [&](StateId id, const GlobalState& s, const auto& ts) {
    if (!bad && ts.empty() && !kernel::AllDone(s)) bad = id;
  });
  CheckResult r;
  r.stats = search.stats();
  if (bad) r.verdict = Verdict::Violated(CounterexampleTrace{search.PathTo(*bad), std::nullopt});
  return r;
}

CheckResult CheckReaches(const GlobalState& initial, const Predicate& p, Strategy strategy,
                         const Budget& budget) {
  Search search(initial, budget);
  bool found = false;
  search.Run(strategy, [&](StateId, const GlobalState& s, const auto&) {
    if (!found && p.holds(s)) found = true;
  });
  CheckResult r;
  r.stats = search.stats();
  if (!found) r.verdict = Verdict::Violated(std::nullopt);
  return r;
}

namespace {

// Product of the state graph with the two-state automaton for <>[]!p:
// q0 loops on anything and moves to the accepting q1 on !p, which then
// only continues on !p. States without successors get a stutter loop.
class NestedDfs {
 public:
  NestedDfs(const GlobalState& initial, const Predicate& p, const Budget& budget)
      : space_(initial, budget), p_(p) {
    Intern(initial);
  }

  CheckResult Run() {
    CheckResult r;
    std::optional<CounterexampleTrace> lasso = Outer(0, 0);
    if (!lasso && !Holds(0)) lasso = Outer(0, 1);
    space_.Finish();
    r.stats = space_.stats;
    if (lasso) r.verdict = Verdict::Violated(std::move(lasso));
    return r;
  }

 private:
  enum Flag : std::uint8_t {
    kHolds = 1,
    kOuterQ0 = 2,
    kOuterQ1 = 4,
    kInner = 8,
    kCyan = 16,
  };

  struct Edge {
    StateId to;
    std::uint8_t q;
    std::int32_t index;  // kStutter for the implicit self-loop
  };

  struct OuterFrame {
    StateId s;
    std::uint8_t q;
    std::int32_t entry;  // transition index from the previous frame
    std::vector<Edge> succ;
    std::size_t next = 0;
  };

  struct InnerFrame {
    StateId s;
    std::int32_t entry;
    std::vector<Edge> succ;
    std::size_t next = 0;
  };

  StateId Intern(const GlobalState& s) {
    auto [id, inserted] = space_.Intern(s);
    if (inserted) {
      flags_.push_back(p_.holds(s) ? kHolds : 0);
      first_edge_.push_back(kUnexpanded);
      edge_count_.push_back(0);
    }
    return id;
  }

  // System successors of `id`, computed once; position = transition index.
  std::span<const StateId> SystemSuccessors(StateId id) {
    if (first_edge_[id] == kUnexpanded) {
      auto ts = kernel::EnabledTransitions(space_.Decode(id));
      std::vector<StateId> ids;
      ids.reserve(ts.size());
      for (const auto& t : ts) ids.push_back(Intern(t.successor));
      first_edge_[id] = edges_.size();
      edge_count_[id] = static_cast<std::uint32_t>(ids.size());
      edges_.insert(edges_.end(), ids.begin(), ids.end());
    }
    return {edges_.data() + first_edge_[id], edge_count_[id]};
  }

  bool Holds(StateId id) const { return flags_[id] & kHolds; }

  // Successors in the product; q1 keeps only !p targets.
  std::vector<Edge> Successors(StateId id, std::uint8_t q) {
    std::vector<Edge> out;
    auto succ = SystemSuccessors(id);
    auto add = [&](StateId to, std::int32_t index) {
      if (q == 0) out.push_back({to, 0, index});
      if (!Holds(to)) out.push_back({to, 1, index});
    };
    if (succ.empty()) {
      add(id, kStutter);
    } else {
      for (std::size_t i = 0; i < succ.size(); ++i) {
        add(succ[i], static_cast<std::int32_t>(i));
      }
    }
    space_.stats.transitions += out.size();
    space_.Tick(flags_.capacity() + stack_bytes_ + edges_.capacity() * sizeof(StateId) +
                first_edge_.capacity() * sizeof(std::uint64_t) +
                edge_count_.capacity() * sizeof(std::uint32_t));
    return out;
  }

  static std::uint8_t OuterBit(std::uint8_t q) { return q == 0 ? kOuterQ0 : kOuterQ1; }

  std::optional<CounterexampleTrace> Outer(StateId root, std::uint8_t q) {
    if (flags_[root] & OuterBit(q)) return std::nullopt;
    std::vector<OuterFrame> stack;
    auto push = [&](StateId s, std::uint8_t q, std::int32_t entry) {
      flags_[s] |= OuterBit(q);
      if (q == 1) flags_[s] |= kCyan;
      stack.push_back({s, q, entry, Successors(s, q)});
      space_.stats.max_depth = std::max(space_.stats.max_depth, stack.size() - 1);
      space_.stats.peak_frontier = std::max(space_.stats.peak_frontier, stack.size());
      stack_bytes_ = stack.size() * 64;
    };
    push(root, q, kStutter);
    while (!stack.empty()) {
      OuterFrame& top = stack.back();
      if (top.next < top.succ.size()) {
        Edge e = top.succ[top.next++];
        if (!(flags_[e.to] & OuterBit(e.q))) push(e.to, e.q, e.index);
        continue;
      }
      if (top.q == 1) {
        if (auto cycle = Inner(top.s)) return Lasso(stack, *cycle);
        flags_[top.s] &= static_cast<std::uint8_t>(~kCyan);
      }
      stack.pop_back();
    }
    return std::nullopt;
  }

  struct Cycle {
    std::vector<std::pair<StateId, std::int32_t>> edges;  // (from, index)
    StateId target;
  };

  std::optional<Cycle> Inner(StateId seed) {
    std::vector<InnerFrame> stack;
    stack.push_back({seed, kStutter, Successors(seed, 1)});
    while (!stack.empty()) {
      InnerFrame& top = stack.back();
      if (top.next == top.succ.size()) {
        stack.pop_back();
        continue;
      }
      Edge e = top.succ[top.next++];
      if (flags_[e.to] & kCyan) {
        Cycle c;
        for (std::size_t i = 1; i < stack.size(); ++i) {
          c.edges.emplace_back(stack[i - 1].s, stack[i].entry);
        }
        c.edges.emplace_back(top.s, e.index);
        c.target = e.to;
        return c;
      }
      if (flags_[e.to] & kInner) continue;
      flags_[e.to] |= kInner;
      stack.push_back({e.to, e.index, Successors(e.to, 1)});
    }
    return std::nullopt;
  }

  CounterexampleTrace Lasso(const std::vector<OuterFrame>& stack, const Cycle& cycle) {
    CounterexampleTrace trace;
    for (std::size_t i = 1; i < stack.size(); ++i) {
      if (stack[i - 1].q == 1 && stack[i - 1].s == cycle.target && !trace.cycle_start) {
        trace.cycle_start = trace.prefix.size();
      }
      if (stack[i].entry != kStutter) {
        trace.prefix.push_back(space_.StepAt(stack[i - 1].s, stack[i].entry));
      }
    }
    if (!trace.cycle_start) trace.cycle_start = trace.prefix.size();
    for (const auto& [from, index] : cycle.edges) {
      if (index != kStutter) trace.prefix.push_back(space_.StepAt(from, index));
    }
    return trace;
  }

  Space space_;
  const Predicate& p_;
  static constexpr std::uint64_t kUnexpanded = ~std::uint64_t{0};

  std::vector<std::uint8_t> flags_;
  std::vector<std::uint64_t> first_edge_;
  std::vector<std::uint32_t> edge_count_;
  std::vector<StateId> edges_;
  std::size_t stack_bytes_ = 0;
};

}  // namespace

CheckResult CheckAlwaysEventually(const GlobalState& initial, const Predicate& p,
                                  const Budget& budget) {
  return NestedDfs(initial, p, budget).Run();
}

ReplayReport ReplayCounterexample(const GlobalState& initial, const CounterexampleTrace& trace,
                                  const Predicate* p) {
  ReplayReport r;
  r.states.push_back(initial);
  for (std::size_t i = 0; i < trace.prefix.size(); ++i) {
    const auto& step = trace.prefix[i];
    try {
      r.states.push_back(kernel::Apply(r.states.back(), step.node, step.label));
    } catch (const kernel::ContractViolation& e) {
      r.error = "step " + std::to_string(i) + " not enabled: " + e.what();
      return r;
    }
  }
  const GlobalState& last = r.states.back();
  if (!trace.cycle_start) {
    if (kernel::Classify(last) != kernel::Status::kDeadlock) {
      r.error = std::string("trace ends in status ") + kernel::StatusName(kernel::Classify(last));
      return r;
    }
    r.ok = true;
    return r;
  }
  const std::size_t start = *trace.cycle_start;
  if (start > trace.prefix.size()) {
    r.error = "cycle start beyond trace";
    return r;
  }
  if (start == trace.prefix.size()) {
    if (!kernel::EnabledTransitions(last).empty()) {
      r.error = "empty cycle on a state with successors";
      return r;
    }
  } else if (!(r.states[start] == last)) {
    r.error = "cycle does not close";
    return r;
  }
  if (p) {
    for (std::size_t i = start; i < r.states.size(); ++i) {
      if (p->holds(r.states[i])) {
        r.error = "cycle state " + std::to_string(i) + " satisfies " + p->name;
        return r;
      }
    }
  }
  r.ok = true;
  return r;
}

}  // namespace checker
}  // namespace fedcsp
