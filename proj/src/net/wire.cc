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

#include "wino2pc/net/wire.h"

#include <algorithm>

#include "wino2pc/core/errors.h"

namespace wino2pc::net {

void ByteWriter::put_u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_packed(std::span<const RingElem> values, int bits) {
  const uint64_t mask = ring_mask(bits);
  const size_t need = buf_.size() + (values.size() * static_cast<size_t>(bits) + 7) / 8;
  if (need > buf_.capacity()) buf_.reserve(std::max(need, 2 * buf_.capacity()));
  unsigned __int128 acc = 0;
  int n = 0;
  for (RingElem v : values) {
    acc |= static_cast<unsigned __int128>(v & mask) << n;
    n += bits;
    while (n >= 8) {
      buf_.push_back(static_cast<uint8_t>(acc));
      acc >>= 8;
      n -= 8;
    }
  }
  if (n > 0) buf_.push_back(static_cast<uint8_t>(acc));
}

void ByteWriter::put_bits(std::span<const uint8_t> bits) {
  uint8_t cur = 0;
  int n = 0;
  for (uint8_t b : bits) {
    cur |= static_cast<uint8_t>((b & 1) << n);
    if (++n == 8) {
      buf_.push_back(cur);
      cur = 0;
      n = 0;
    }
  }
  if (n > 0) buf_.push_back(cur);
}

void ByteReader::need(size_t n) const {
  WINO2PC_ENFORCE(pos_ + n <= buf_.size(), ErrorCode::kProtocolError,
                  "message shorter than expected");
}

uint8_t ByteReader::get_u8() {
  need(1);
  return buf_[pos_++];
}

uint32_t ByteReader::get_u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf_[pos_++]) << (8 * i);
  return v;
}

uint64_t ByteReader::get_u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf_[pos_++]) << (8 * i);
  return v;
}

std::vector<RingElem> ByteReader::get_packed(size_t n, int bits) {
  const size_t nbytes = (n * static_cast<size_t>(bits) + 7) / 8;
  need(nbytes);
  const uint64_t mask = ring_mask(bits);
  std::vector<RingElem> out;
  out.reserve(n);
  unsigned __int128 acc = 0;
  int have = 0;
  for (size_t i = 0; i < n; ++i) {
    while (have < bits) {
      acc |= static_cast<unsigned __int128>(buf_[pos_++]) << have;
      have += 8;
    }
    out.push_back(static_cast<uint64_t>(acc) & mask);
    acc >>= bits;
    have -= bits;
  }
  return out;
}

std::vector<uint8_t> ByteReader::get_bits(size_t n) {
  need((n + 7) / 8);
  std::vector<uint8_t> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = (buf_[pos_ + i / 8] >> (i % 8)) & 1;
  pos_ += (n + 7) / 8;
  return out;
}

}  // namespace wino2pc::net
