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

#include "fedcsp/checker/state_store.hh"

#include <algorithm>
#include <cstring>

namespace fedcsp {
namespace checker {

namespace {
constexpr std::size_t kInitialSlots = 1 << 12;
}  // namespace

StateStore::StateStore() : offsets_{0}, slots_(kInitialSlots, 0), mask_(kInitialSlots - 1) {}

std::span<const std::uint8_t> StateStore::Get(StateId id) const {
  return {arena_.data() + offsets_[id], arena_.data() + offsets_[id + 1]};
}

std::pair<StateId, bool> StateStore::Insert(std::span<const std::uint8_t> bytes,
                                            std::uint64_t hash) {
  std::size_t pos = hash & mask_;
  while (slots_[pos] != 0) {
    StateId id = slots_[pos] - 1;
    if (hashes_[id] == hash) {
      auto stored = Get(id);
      if (stored.size() == bytes.size() &&
          std::equal(stored.begin(), stored.end(), bytes.begin())) {
        return {id, false};
      }
    }
    pos = (pos + 1) & mask_;
  }
  auto id = static_cast<StateId>(size());
  arena_.insert(arena_.end(), bytes.begin(), bytes.end());
  offsets_.push_back(arena_.size());
  hashes_.push_back(hash);
  slots_[pos] = id + 1;
  if (2 * size() > slots_.size()) Grow();
  return {id, true};
}

void StateStore::Grow() {
  std::vector<StateId> bigger(slots_.size() * 2, 0);
  mask_ = bigger.size() - 1;
  for (StateId id = 0; id < size(); ++id) {
    std::size_t pos = hashes_[id] & mask_;
    while (bigger[pos] != 0) pos = (pos + 1) & mask_;
    bigger[pos] = id + 1;
  }
  slots_ = std::move(bigger);
}

std::size_t StateStore::MemoryUsage() const {
  return arena_.capacity() + offsets_.capacity() * sizeof(std::uint64_t) +
         hashes_.capacity() * sizeof(std::uint64_t) + slots_.capacity() * sizeof(StateId);
}

}  // namespace checker
}  // namespace fedcsp
