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

#ifndef FEDCSP_MODELS_MODELS_HH_
#define FEDCSP_MODELS_MODELS_HH_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fedcsp/kernel/program.hh"
#include "fedcsp/kernel/state.hh"

namespace fedcsp {
namespace models {

using kernel::ChannelKind;
using kernel::NodeId;

enum class Variant { kCentralised, kDecentralised };

std::string VariantName(Variant v);
std::optional<Variant> ParseVariant(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::kCentralised;
  int nodes = 1;
  // Centralised only.
  NodeId server_id = 0;
  // Empty means all zeros; otherwise one value per node.
  std::vector<kernel::Value> ldata;
  std::vector<kernel::Value> pdata;
  std::map<ChannelKind, std::size_t> capacity_override;
  kernel::Granularity granularity = kernel::Granularity::kMicroStep;
};

/// The server waits for one update per node instead of one per client.
struct ExpectExtraUpdate {};

/// `node` receives phase-1 data but never sends its reply. When unset, the
/// lowest-numbered client (centralised) or node 0 (decentralised) is used.
struct SkipReply {
  std::optional<NodeId> node;
};

/// Decentralised nodes receive only phase-1 messages (guard on the head)
/// until all are processed, then read phase-2 replies from the same channel;
/// no buffering.
struct StrictPhaseOrder {};

struct CapacityOverride {
  ChannelKind kind = ChannelKind::kToNode;
  std::size_t capacity = 1;
};

using Mutation = std::variant<ExpectExtraUpdate, SkipReply, StrictPhaseOrder,
                              CapacityOverride>;

std::string MutationName(const Mutation& m);

/**
 * Hooks used by the runtime to run the same process terms on concrete data.
 * When `client_update` is set, a client's reply is
 * client_update(ldata, pdata, received) instead of ldata + received.
 */
struct DataHooks {
  std::optional<kernel::HostFunction> client_update;
};

struct SystemModel {
  kernel::GlobalState initial;
  ModelConfig config;
  std::vector<Mutation> mutations;
  std::shared_ptr<const DataHooks> hooks;

  const kernel::Program& program() const { return *initial.program; }
};

/// Default capacity of a channel kind for `nodes` participants.
std::size_t DefaultCapacity(ChannelKind kind, int nodes);

SystemModel BuildCentralised(const ModelConfig& cfg, const DataHooks* hooks = nullptr);
SystemModel BuildDecentralised(const ModelConfig& cfg, const DataHooks* hooks = nullptr);
SystemModel Build(const ModelConfig& cfg, const DataHooks* hooks = nullptr);

/// New system with `mutation` added; `system` is left untouched.
/// Throws kernel::ModelError when the mutation does not fit the variant.
SystemModel ApplyMutation(const SystemModel& system, const Mutation& mutation);

}  // namespace models
}  // namespace fedcsp

#endif  // FEDCSP_MODELS_MODELS_HH_
