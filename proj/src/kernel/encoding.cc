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

#include "fedcsp/kernel/encoding.hh"

#include <cstring>

namespace fedcsp {
namespace kernel {

namespace {

// Layout (all integers LEB128, signed ones zigzagged):
//   nodes:    count, then per node: frames, per frame: term, |env|, (var, value)*
//   channels: per program slot: |queue|, then per message a tag and its fields
//   shared:   one value per shared scalar
//   arrays:   per shared array: length, values

void PutUnsigned(std::uint64_t v, std::vector<std::uint8_t>* out) {
  while (v >= 0x80) {
    out->push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out->push_back(static_cast<std::uint8_t>(v));
}

void PutSigned(std::int64_t v, std::vector<std::uint8_t>* out) {
  PutUnsigned((static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63),
              out);
}

void PutValue(const Value& v, std::vector<std::uint8_t>* out) {
  if (!v.is_int()) {
    throw NotHashable("state holds host value " + v.Describe());
  }
  PutSigned(v.as_int(), out);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t Unsigned() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= bytes_.size()) throw ContractViolation("truncated state encoding");
      std::uint8_t b = bytes_[pos_++];
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw ContractViolation("malformed state encoding");
  }

  std::int64_t Signed() {
    std::uint64_t u = Unsigned();
    return static_cast<std::int64_t>((u >> 1) ^ (~(u & 1) + 1));
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t Mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void EncodeState(const GlobalState& state, std::vector<std::uint8_t>* out) {
  out->clear();
  PutUnsigned(state.nodes.size(), out);
  for (const auto& node : state.nodes) {
    PutUnsigned(node.stack.size(), out);
    for (const auto& frame : node.stack) {
      PutUnsigned(frame.term, out);
      PutUnsigned(frame.env.size(), out);
      for (const auto& b : frame.env.bindings()) {
        PutUnsigned(b.var, out);
        PutValue(b.value, out);
      }
    }
  }
  for (const auto& queue : state.channels) {
    PutUnsigned(queue.size(), out);
    for (const auto& msg : queue) {
      if (const auto* p = std::get_if<PlainMsg>(&msg)) {
        out->push_back(0);
        PutValue(p->data, out);
      } else {
        const auto& t = std::get<TaggedMsg>(msg);
        out->push_back(1);
        PutSigned(t.phase, out);
        PutSigned(t.from, out);
        PutValue(t.data, out);
      }
    }
  }
  for (const auto& v : state.shared) PutValue(v, out);
  for (const auto& arr : state.arrays) {
    PutUnsigned(arr.size(), out);
    for (const auto& v : arr) PutValue(v, out);
  }
}

std::vector<std::uint8_t> EncodeState(const GlobalState& state) {
  std::vector<std::uint8_t> out;
  EncodeState(state, &out);
  return out;
}

GlobalState DecodeState(std::shared_ptr<const Program> program,
                        std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const Program& p = *program;
  GlobalState s;
  s.nodes.resize(in.Unsigned());
  for (auto& node : s.nodes) {
    node.stack.resize(in.Unsigned());
    for (auto& frame : node.stack) {
      frame.term = static_cast<TermId>(in.Unsigned());
      std::uint64_t n = in.Unsigned();
      for (std::uint64_t i = 0; i < n; ++i) {
        auto var = static_cast<Symbol>(in.Unsigned());
        frame.env.Bind(var, in.Signed());
      }
    }
  }
  s.channels.resize(p.channels().size());
  for (auto& queue : s.channels) {
    queue.resize(in.Unsigned());
    for (auto& msg : queue) {
      std::uint64_t tag = in.Unsigned();
      if (tag == 0) {
        msg = PlainMsg{in.Signed()};
      } else {
        TaggedMsg t;
        t.phase = in.Signed();
        t.from = static_cast<NodeId>(in.Signed());
        t.data = in.Signed();
        msg = t;
      }
    }
  }
  s.shared.resize(p.shared_vars().size());
  for (auto& v : s.shared) v = in.Signed();
  s.arrays.resize(p.shared_arrays().size());
  for (auto& arr : s.arrays) {
    arr.resize(in.Unsigned());
    for (auto& v : arr) v = in.Signed();
  }
  if (!in.at_end()) throw ContractViolation("trailing bytes in state encoding");
  s.program = std::move(program);
  return s;
}

std::uint64_t HashBytes(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ bytes.size();
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t chunk;
    std::memcpy(&chunk, bytes.data() + i, 8);
    h = Mix(h ^ chunk);
  }
  std::uint64_t tail = 0;
  for (std::size_t k = 0; i < bytes.size(); ++i, ++k) {
    tail |= static_cast<std::uint64_t>(bytes[i]) << (8 * k);
  }
  return Mix(h ^ tail ^ 0xff51afd7ed558ccdULL);
}

StateKey CanonicalKey(const GlobalState& state) {
  std::vector<std::uint8_t> bytes;
  EncodeState(state, &bytes);
  return StateKey{HashBytes(bytes)};
}

}  // namespace kernel
}  // namespace fedcsp
