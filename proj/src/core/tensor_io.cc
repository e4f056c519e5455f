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

#include "wino2pc/core/tensor_io.h"

#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc {
namespace {

constexpr char kMagic[4] = {'Q', 'T', 'S', 'R'};
constexpr uint8_t kFlagSigned = 1;
constexpr uint8_t kFlagMsbKnown = 2;

template <typename T>
void put_le(std::vector<uint8_t>& out, T v) {
  auto u = static_cast<std::make_unsigned_t<T>>(v);
  for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<uint8_t>(u >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& b) : b_(b) {}
  template <typename T>
  T get() {
    WINO2PC_ENFORCE(pos_ + sizeof(T) <= b_.size(), ErrorCode::kIoError,
                    "truncated QTSR stream");
    std::make_unsigned_t<T> u = 0;
    for (size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(b_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::vector<uint8_t>& b_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> encode_qtensor(const QTensor& t) {
  WINO2PC_ENFORCE(t.shape().size() <= 255, ErrorCode::kIoError, "rank too large");
  std::vector<uint8_t> out(kMagic, kMagic + 4);
  put_le<uint16_t>(out, kQtsrVersion);
  put_le<uint8_t>(out, static_cast<uint8_t>(t.shape().size()));
  for (int64_t d : t.shape()) {
    WINO2PC_ENFORCE(d <= UINT32_MAX, ErrorCode::kIoError, "dimension exceeds u32");
    put_le<uint32_t>(out, static_cast<uint32_t>(d));
  }
  const auto& p = t.params();
  WINO2PC_ENFORCE(p.scale_exp >= -128 && p.scale_exp <= 127, ErrorCode::kIoError,
                  "scale exponent exceeds i8");
  put_le<uint8_t>(out, static_cast<uint8_t>(p.bits));
  put_le<int8_t>(out, static_cast<int8_t>(p.scale_exp));
  put_le<uint8_t>(out, static_cast<uint8_t>((p.is_signed ? kFlagSigned : 0) |
                                            (p.msb_known_nonneg ? kFlagMsbKnown : 0)));
  for (int64_t v : t.data()) put_le<int64_t>(out, v);
  return out;
}

QTensor decode_qtensor(const std::vector<uint8_t>& bytes) {
  WINO2PC_ENFORCE(bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0,
                  ErrorCode::kIoError, "bad QTSR magic");
  Reader r(bytes);
  for (int i = 0; i < 4; ++i) r.get<uint8_t>();
  const auto version = r.get<uint16_t>();
  WINO2PC_ENFORCE(version == kQtsrVersion, ErrorCode::kIoError,
                  fmt::format("unsupported QTSR version {}", version));
  const auto rank = r.get<uint8_t>();
  Shape shape;
  for (int i = 0; i < rank; ++i) shape.push_back(r.get<uint32_t>());
  QuantParams p;
  p.bits = r.get<uint8_t>();
  p.scale_exp = r.get<int8_t>();
  const auto flags = r.get<uint8_t>();
  p.is_signed = flags & kFlagSigned;
  p.msb_known_nonneg = flags & kFlagMsbKnown;
  const int64_t n = shape_numel(shape);
  WINO2PC_ENFORCE(r.remaining() == static_cast<size_t>(n) * 8, ErrorCode::kIoError,
                  "QTSR payload size does not match header");
  std::vector<int64_t> data(static_cast<size_t>(n));
  for (auto& v : data) v = r.get<int64_t>();
  return QTensor(std::move(shape), std::move(data), p);
}

void save_qtensor(const std::string& path, const QTensor& t) {
  const auto bytes = encode_qtensor(t);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  WINO2PC_ENFORCE(f.good(), ErrorCode::kIoError, "cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  WINO2PC_ENFORCE(f.good(), ErrorCode::kIoError, "write failed: " + path);
}

QTensor load_qtensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  WINO2PC_ENFORCE(f.good(), ErrorCode::kIoError, "cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return decode_qtensor(bytes);
}

}  // namespace wino2pc
