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

// Ordered, reliable duplex message channels between two endpoints.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wino2pc::net {

/// Protocol tag carried by every frame.
enum class MsgTag : uint8_t {
  kInputShare = 1,
  kOutputReveal = 2,
  kOtChoice = 3,
  kOtMasked = 4,
  kBeaverOpen = 5,
  kDealerRequest = 6,
  kDealerReply = 7,
  kLedgerSync = 8,
};

struct Message {
  uint8_t tag = 0;
  std::vector<uint8_t> payload;
};

class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(uint8_t tag, std::span<const uint8_t> payload) = 0;
  /// Blocks until a message arrives; throws kChannelClosed after close().
  virtual Message recv() = 0;
  /// Idempotent. Wakes any receiver blocked on either endpoint.
  virtual void close() = 0;
};

/// Two connected in-memory endpoints.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

/// Listening TCP socket. Port 0 picks an ephemeral port.
class TcpListener {
 public:
  explicit TcpListener(uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<Channel> accept();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

/// Connects with retries (the peer may not be listening yet).
std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     int timeout_ms = 10000);

}  // namespace wino2pc::net
