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

#ifndef FEDCSP_RUNTIME_RUNTIME_HH_
#define FEDCSP_RUNTIME_RUNTIME_HH_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedcsp/models/models.hh"
#include "fedcsp/runtime/trace.hh"

namespace fedcsp {
namespace runtime {

/// splitmix64; Uniform draws by rejection so every index is equally likely.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next();
  std::uint64_t Uniform(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

using ClientFn = std::function<double(double ldata, double pdata, double server_data)>;
using ServerFn =
    std::function<double(double ldata, double pdata, const std::vector<double>& updates)>;

struct CallbackPair {
  ClientFn cfun;
  ServerFn sfun;
};

ClientFn AddClient();
// Both return the node's own ldata when there are no updates.
ServerFn MeanServer();
ServerFn SumServer();

struct RunConfig {
  models::Variant variant = models::Variant::kCentralised;
  int nodes = 1;
  kernel::NodeId server_id = 0;  // centralised only
  std::vector<double> ldata;     // empty: zeros
  std::vector<double> pdata;     // empty: zeros
  kernel::Granularity granularity = kernel::Granularity::kMicroStep;
  std::uint64_t seed = 0;
  int iters = 1;
  CallbackPair callbacks{AddClient(), MeanServer()};
};

struct RoundResult {
  std::vector<double> final_ldata;
};

/// Raised when a round cannot complete; carries the events executed so far.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& what, ConcreteTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const ConcreteTrace& partial_trace() const { return partial_; }

 private:
  ConcreteTrace partial_;
};

/// Throws std::invalid_argument for an unusable configuration.
void Validate(const RunConfig& cfg);

/// One round driven by a generator seeded with cfg.seed.
RoundResult RunRound(const RunConfig& cfg, ConcreteTrace* trace = nullptr);

/// cfg.iters rounds; round k uses seed ^ k and starts from round k-1's result.
/// When `traces` is given it receives one trace per round.
RoundResult Run(const RunConfig& cfg, std::vector<ConcreteTrace>* traces = nullptr);

/// The unmutated abstract model a run of `cfg` is checked against.
models::SystemModel AbstractModel(const RunConfig& cfg);

struct ConformanceResult {
  bool ok = true;
  std::size_t divergence = 0;  // index of the first unmatched event when !ok
};

/**
 * Matches the abstracted events one by one against enabled transitions of
 * `sys`, keeping the set of all states consistent with the prefix so far.
 * Throws kernel::ContractViolation when the trace names a node or channel
 * that does not exist in `sys`.
 */
ConformanceResult Conforms(const models::SystemModel& sys, const ConcreteTrace& trace);

}  // namespace runtime
}  // namespace fedcsp

#endif  // FEDCSP_RUNTIME_RUNTIME_HH_
