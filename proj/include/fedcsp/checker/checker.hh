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

#ifndef FEDCSP_CHECKER_CHECKER_HH_
#define FEDCSP_CHECKER_CHECKER_HH_

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedcsp/kernel/state.hh"
#include "fedcsp/models/models.hh"

namespace fedcsp {
namespace checker {

enum class Strategy { kDfs, kBfs };

const char* StrategyName(Strategy s);

/// Exploration limits; exceeding any of them raises ResourceExceeded.
struct Budget {
  std::size_t max_states = 10'000'000;
  std::size_t max_bytes = std::size_t{8} << 30;
  std::chrono::milliseconds max_time{300'000};
};

struct Predicate {
  std::string name;
  std::function<bool(const kernel::GlobalState&)> holds;
};

/// terminated == True
Predicate Terminated();

struct TraceStep {
  kernel::NodeId node = 0;
  kernel::ActionLabel label;
};

/**
 * A path from the initial state. For liveness violations `cycle_start` marks
 * the step index at which the repeating suffix begins; the state reached
 * after the whole prefix equals the state at `cycle_start`. An empty suffix
 * denotes the stutter loop of a state without successors.
 */
struct CounterexampleTrace {
  std::vector<TraceStep> prefix;
  std::optional<std::size_t> cycle_start;
};

class Verdict {
 public:
  static Verdict Valid() { return Verdict(true, std::nullopt); }
  static Verdict Violated(std::optional<CounterexampleTrace> trace) {
    return Verdict(false, std::move(trace));
  }

  bool valid() const { return valid_; }
  const std::optional<CounterexampleTrace>& trace() const { return trace_; }

 private:
  Verdict(bool valid, std::optional<CounterexampleTrace> trace)
      : valid_(valid), trace_(std::move(trace)) {}

  bool valid_;
  std::optional<CounterexampleTrace> trace_;
};

struct StateSpaceStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t max_depth = 0;
  std::size_t peak_frontier = 0;
  std::chrono::duration<double, std::milli> elapsed{0};
};

struct CheckResult {
  Verdict verdict = Verdict::Valid();
  StateSpaceStats stats;
};

class ResourceExceeded : public std::runtime_error {
 public:
  ResourceExceeded(const std::string& what, StateSpaceStats stats)
      : std::runtime_error(what), stats_(stats) {}

  const StateSpaceStats& stats() const { return stats_; }

 private:
  StateSpaceStats stats_;
};

/// Visits every reachable state exactly once.
StateSpaceStats Explore(const kernel::GlobalState& initial, Strategy strategy,
                        const Budget& budget = {});

/**
 * Valid iff no reachable state is a deadlock (not all done, nothing enabled).
 * The whole state space is explored either way, so both strategies report
 * the same counts; under BFS the counterexample is a shortest one.
 */
CheckResult CheckDeadlockFree(const kernel::GlobalState& initial, Strategy strategy,
                              const Budget& budget = {});

/// Valid iff some reachable state satisfies `p`. Violations carry no trace.
CheckResult CheckReaches(const kernel::GlobalState& initial, const Predicate& p,
                         Strategy strategy, const Budget& budget = {});

/**
 * []<>p over maximal paths, where states without successors stutter forever.
 * Nested depth-first search for a reachable cycle of !p states; returns the
 * first lasso found.
 */
CheckResult CheckAlwaysEventually(const kernel::GlobalState& initial, const Predicate& p,
                                  const Budget& budget = {});

inline StateSpaceStats Explore(const models::SystemModel& sys, Strategy strategy,
                               const Budget& budget = {}) {
  return Explore(sys.initial, strategy, budget);
}
inline CheckResult CheckDeadlockFree(const models::SystemModel& sys, Strategy strategy,
                                     const Budget& budget = {}) {
  return CheckDeadlockFree(sys.initial, strategy, budget);
}
inline CheckResult CheckReaches(const models::SystemModel& sys, const Predicate& p,
                                Strategy strategy, const Budget& budget = {}) {
  return CheckReaches(sys.initial, p, strategy, budget);
}
inline CheckResult CheckAlwaysEventually(const models::SystemModel& sys, const Predicate& p,
                                         const Budget& budget = {}) {
  return CheckAlwaysEventually(sys.initial, p, budget);
}

struct ReplayReport {
  bool ok = false;
  std::string error;
  std::vector<kernel::GlobalState> states;  // initial state first
};

/**
 * Replays `trace` through kernel::Apply. A trace without a cycle must end in
 * a deadlock; a lasso must close on the state at cycle_start with every
 * cycle state falsifying `p` (when given).
 */
ReplayReport ReplayCounterexample(const kernel::GlobalState& initial,
                                  const CounterexampleTrace& trace,
                                  const Predicate* p = nullptr);

}  // namespace checker
}  // namespace fedcsp

#endif  // FEDCSP_CHECKER_CHECKER_HH_
