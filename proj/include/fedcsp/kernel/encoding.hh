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

#ifndef FEDCSP_KERNEL_ENCODING_HH_
#define FEDCSP_KERNEL_ENCODING_HH_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedcsp/kernel/state.hh"

namespace fedcsp {
namespace kernel {

/**
 * Compact, canonical byte encoding of a checker-mode state. Two states of the
 * same program encode to equal byte strings iff they are structurally equal.
 * Throws NotHashable when the state carries host values.
 */
void EncodeState(const GlobalState& state, std::vector<std::uint8_t>* out);
std::vector<std::uint8_t> EncodeState(const GlobalState& state);

GlobalState DecodeState(std::shared_ptr<const Program> program,
                        std::span<const std::uint8_t> bytes);

std::uint64_t HashBytes(std::span<const std::uint8_t> bytes);

struct StateKey {
  std::uint64_t hash = 0;

  friend bool operator==(const StateKey&, const StateKey&) = default;
};

/// Fixed-width key; equal states always yield equal keys. Distinct states
/// may collide, so visited sets compare encodings on key match.
StateKey CanonicalKey(const GlobalState& state);

}  // namespace kernel
}  // namespace fedcsp

#endif  // FEDCSP_KERNEL_ENCODING_HH_
