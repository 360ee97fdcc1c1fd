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

#ifndef FEDCSP_KERNEL_VALUE_HH_
#define FEDCSP_KERNEL_VALUE_HH_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace fedcsp {
namespace kernel {

using NodeId = std::int32_t;

/**
 * Base of all kernel errors raised for ill-formed programs: unresolved calls,
 * unbound variables, arity mismatches, type errors during evaluation.
 */
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of a kernel operation was not met by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a state holding host values is asked for a canonical key.
class NotHashable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Opaque payload owned by a host (the runtime). The kernel never inspects
 * host values except through this interface; they may only flow through
 * messages and callback applications.
 */
class HostValue {
 public:
  virtual ~HostValue() = default;

  virtual bool Equals(const HostValue& other) const = 0;
  virtual double ToDouble() const = 0;
  virtual std::string Describe() const = 0;
};

using HostRef = std::shared_ptr<const HostValue>;

class Value {
 public:
  Value() : rep_(std::int64_t{0}) {}
  Value(std::int64_t v) : rep_(v) {}  // NOLINT(runtime/explicit)
  Value(int v) : rep_(std::int64_t{v}) {}  // NOLINT(runtime/explicit)
  Value(HostRef v) : rep_(std::move(v)) {}  // NOLINT(runtime/explicit)

  bool is_int() const { return std::holds_alternative<std::int64_t>(rep_); }
  bool is_host() const { return !is_int(); }

  std::int64_t as_int() const;
  const HostValue& as_host() const;

  // Numeric view used for serialization; integers convert exactly up to 2^53.
  double ToDouble() const;
  std::string Describe() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  std::variant<std::int64_t, HostRef> rep_;
};

/// Single-field message of the centralised protocol.
struct PlainMsg {
  Value data;

  friend bool operator==(const PlainMsg&, const PlainMsg&) = default;
};

/// (phase, from, data) message of the decentralised protocol.
struct TaggedMsg {
  std::int64_t phase = 1;
  NodeId from = 0;
  Value data;

  friend bool operator==(const TaggedMsg&, const TaggedMsg&) = default;
};

using Message = std::variant<PlainMsg, TaggedMsg>;

std::string Describe(const Message& msg);

enum class ChannelKind : std::uint8_t {
  kServerToClient,
  kClientsToServer,
  kToNode,
  kBuffer,
};

/**
 * Identifies one buffered channel. ClientsToServer is a singleton; its index
 * is always 0.
 */
struct ChannelId {
  ChannelKind kind = ChannelKind::kClientsToServer;
  NodeId index = 0;

  friend bool operator==(const ChannelId&, const ChannelId&) = default;
  friend auto operator<=>(const ChannelId&, const ChannelId&) = default;
};

/// Identifier as written in the models, e.g. "server2client[0]", "tonode[2]".
std::string ChannelName(const ChannelId& id);
std::optional<ChannelId> ParseChannelName(const std::string& name);

std::string ChannelKindName(ChannelKind kind);
std::optional<ChannelKind> ParseChannelKind(const std::string& name);

}  // namespace kernel
}  // namespace fedcsp

#endif  // FEDCSP_KERNEL_VALUE_HH_
