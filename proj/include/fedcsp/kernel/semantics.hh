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

#ifndef FEDCSP_KERNEL_SEMANTICS_HH_
#define FEDCSP_KERNEL_SEMANTICS_HH_

#include <memory>
#include <vector>

#include "fedcsp/kernel/program.hh"
#include "fedcsp/kernel/state.hh"

namespace fedcsp {
namespace kernel {

/**
 * A node positioned at `term` with environment `env`, advanced through the
 * silent steps of the program's granularity.
 */
NodeState StartNode(const Program& program, TermId term, Env env);

/**
 * Empty global state of `program` for `node_count` nodes: all channels empty,
 * shared scalars zero, shared arrays empty. Nodes must be filled in by the
 * caller with StartNode.
 */
GlobalState EmptyState(std::shared_ptr<const Program> program,
                       std::size_t node_count);

/**
 * Interleaving-enabled steps of `state`, at most one per node, in ascending
 * node order. A send is enabled iff its queue is below capacity, a receive
 * iff its queue is non-empty and the guard (if any) holds on the head.
 */
std::vector<Transition> EnabledTransitions(const GlobalState& state);

/// Successor of `state` under the enabled step (node, label).
/// Throws ContractViolation if no such step is enabled.
GlobalState Apply(const GlobalState& state, NodeId node,
                  const ActionLabel& label);
GlobalState Apply(const GlobalState& state, const Transition& t);

enum class Status { kAllDone, kDeadlock, kRunning };

Status Classify(const GlobalState& state);
bool AllDone(const GlobalState& state);

const char* StatusName(Status s);

}  // namespace kernel
}  // namespace fedcsp

#endif  // FEDCSP_KERNEL_SEMANTICS_HH_
