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

#include "wino2pc/net/local_session.h"

#include <exception>
#include <mutex>
#include <thread>

namespace wino2pc::net::internal {

void run_threads(std::function<void()> server, std::function<void()> client,
                 std::function<void()> dealer, std::function<void()> close_all) {
  std::mutex mu;
  std::exception_ptr first;
  auto guard = [&](const std::function<void()>& body) {
    return [&, body] {
      try {
        body();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        close_all();
      }
    };
  };
  std::thread td(guard(dealer));
  std::thread ts(guard(server));
  std::thread tc(guard(client));
  ts.join();
  tc.join();
  td.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace wino2pc::net::internal
