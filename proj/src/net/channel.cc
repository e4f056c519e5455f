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

#include "wino2pc/net/channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "wino2pc/core/errors.h"

namespace wino2pc::net {
namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Message> items;
  bool closed = false;
};

struct Link {
  Queue a_to_b;
  Queue b_to_a;
  void close() {
    for (Queue* q : {&a_to_b, &b_to_a}) {
      std::lock_guard<std::mutex> lock(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }
};

class InProcChannel final : public Channel {
 public:
  InProcChannel(std::shared_ptr<Link> link, Queue& out, Queue& in)
      : link_(std::move(link)), out_(out), in_(in) {}

  void send(uint8_t tag, std::span<const uint8_t> payload) override {
    std::lock_guard<std::mutex> lock(out_.mu);
    WINO2PC_ENFORCE(!out_.closed, ErrorCode::kChannelClosed, "send on closed channel");
    out_.items.push_back(Message{tag, {payload.begin(), payload.end()}});
    out_.cv.notify_one();
  }

  Message recv() override {
    std::unique_lock<std::mutex> lock(in_.mu);
    in_.cv.wait(lock, [&] { return !in_.items.empty() || in_.closed; });
    WINO2PC_ENFORCE(!in_.items.empty(), ErrorCode::kChannelClosed,
                    "recv on closed channel");
    Message m = std::move(in_.items.front());
    in_.items.pop_front();
    return m;
  }

  void close() override { link_->close(); }

 private:
  std::shared_ptr<Link> link_;
  Queue& out_;
  Queue& in_;
};

void write_all(int fd, const uint8_t* p, size_t n) {
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0 && errno == EINTR) continue;
    WINO2PC_ENFORCE(w > 0, ErrorCode::kChannelClosed,
                    fmt::format("tcp send failed: {}", std::strerror(errno)));
    p += w;
    n -= static_cast<size_t>(w);
  }
}

void read_all(int fd, uint8_t* p, size_t n) {
  while (n > 0) {
    const ssize_t r = ::recv(fd, p, n, 0);
    if (r < 0 && errno == EINTR) continue;
    WINO2PC_ENFORCE(r > 0, ErrorCode::kChannelClosed, "tcp peer closed connection");
    p += r;
    n -= static_cast<size_t>(r);
  }
}

// Frame: u32 little-endian payload length, u8 tag, payload.
class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(uint8_t tag, std::span<const uint8_t> payload) override {
    WINO2PC_ENFORCE(payload.size() <= UINT32_MAX, ErrorCode::kProtocolError,
                    "frame too large");
    uint8_t header[5];
    const auto len = static_cast<uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) header[i] = static_cast<uint8_t>(len >> (8 * i));
    header[4] = tag;
    std::lock_guard<std::mutex> lock(send_mu_);
    write_all(fd_, header, sizeof(header));
    if (!payload.empty()) write_all(fd_, payload.data(), payload.size());
  }

  Message recv() override {
    uint8_t header[5];
    read_all(fd_, header, sizeof(header));
    uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(header[i]) << (8 * i);
    Message m;
    m.tag = header[4];
    m.payload.resize(len);
    if (len > 0) read_all(fd_, m.payload.data(), len);
    return m;
  }

  void close() override {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_;
  std::mutex send_mu_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
  auto link = std::make_shared<Link>();
  auto a = std::make_unique<InProcChannel>(link, link->a_to_b, link->b_to_a);
  auto b = std::make_unique<InProcChannel>(link, link->b_to_a, link->a_to_b);
  return {std::move(a), std::move(b)};
}

TcpListener::TcpListener(uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  WINO2PC_ENFORCE(fd_ >= 0, ErrorCode::kIoError, "socket() failed");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 4) != 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    fail(ErrorCode::kIoError, fmt::format("cannot listen on port {}: {}", port, why));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept() {
  int fd;
  do {
    fd = ::accept(fd_, nullptr, nullptr);
  } while (fd < 0 && errno == EINTR);
  WINO2PC_ENFORCE(fd >= 0, ErrorCode::kIoError, "accept() failed");
  return std::make_unique<TcpChannel>(fd);
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  WINO2PC_ENFORCE(rc == 0 && res != nullptr, ErrorCode::kIoError,
                  fmt::format("cannot resolve {}: {}", host, ::gai_strerror(rc)));
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<TcpChannel>(fd);
    }
    if (fd >= 0) ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      ::freeaddrinfo(res);
      fail(ErrorCode::kIoError, fmt::format("cannot connect to {}:{}", host, port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace wino2pc::net
