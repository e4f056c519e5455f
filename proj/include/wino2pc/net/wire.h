// Copyright 2026 The wino2pc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Byte-level message encoding. Ring elements are bit-packed at their ring
// width so that counted wire bits track the payload size.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wino2pc/core/ring.h"

namespace wino2pc::net {

class ByteWriter {
 public:
  void put_u8(uint8_t v) { buf_.push_back(v); }
  void put_u32(uint32_t v);
  void put_u64(uint64_t v);
  void put_packed(std::span<const RingElem> values, int bits);
  void put_bits(std::span<const uint8_t> bits);

  const std::vector<uint8_t>& bytes() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<uint8_t> buf) : buf_(std::move(buf)) {}
  uint8_t get_u8();
  uint32_t get_u32();
  uint64_t get_u64();
  std::vector<RingElem> get_packed(size_t n, int bits);
  std::vector<uint8_t> get_bits(size_t n);
  bool at_end() const { return pos_ == buf_.size(); }
  size_t size() const { return buf_.size(); }

 private:
  void need(size_t n) const;
  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
};

}  // namespace wino2pc::net
