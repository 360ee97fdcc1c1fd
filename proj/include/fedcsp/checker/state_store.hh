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

#ifndef FEDCSP_CHECKER_STATE_STORE_HH_
#define FEDCSP_CHECKER_STATE_STORE_HH_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fedcsp {
namespace checker {

using StateId = std::uint32_t;

/**
 * Visited set over encoded states.
 *
 * Encodings are appended to one contiguous arena and indexed by an
 * open-addressing table keyed on their 64-bit hash. A hash match is only
 * accepted after a full byte comparison, so membership is exact.
 */
class StateStore {
 public:
  StateStore();

  /// Returns the id of `bytes` and whether it was newly inserted.
  std::pair<StateId, bool> Insert(std::span<const std::uint8_t> bytes, std::uint64_t hash);

  std::span<const std::uint8_t> Get(StateId id) const;

  std::size_t size() const { return offsets_.size() - 1; }

  /// Approximate heap footprint in bytes.
  std::size_t MemoryUsage() const;

 private:
  void Grow();

  std::vector<std::uint8_t> arena_;
  std::vector<std::uint64_t> offsets_;  // offsets_[i]..offsets_[i+1] is state i
  std::vector<std::uint64_t> hashes_;
  std::vector<StateId> slots_;          // 0 = empty, otherwise id + 1
  std::size_t mask_ = 0;
};

}  // namespace checker
}  // namespace fedcsp

#endif  // FEDCSP_CHECKER_STATE_STORE_HH_
