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

// Binary tensor file ("QTSR"): little-endian header
//   magic "QTSR" | version u16 | rank u8 | dims u32 x rank |
//   bits u8 | scale_exp i8 | flags u8
// followed by numel little-endian int64 elements.
// flags: bit 0 = signed, bit 1 = msb known nonnegative.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wino2pc/core/qtensor.h"

namespace wino2pc {

inline constexpr uint16_t kQtsrVersion = 1;

std::vector<uint8_t> encode_qtensor(const QTensor& t);
QTensor decode_qtensor(const std::vector<uint8_t>& bytes);

void save_qtensor(const std::string& path, const QTensor& t);
QTensor load_qtensor(const std::string& path);

}  // namespace wino2pc
