// Copyright 2026 The socialgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCIALGEN_TOOLS_STUB_SERVER_HPP_
#define SOCIALGEN_TOOLS_STUB_SERVER_HPP_

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace socialgen {

/// Canned behaviors of the chat-completions stub, selectable per instance:
///  - kOk: 200 with a fixed assistant reply (a prose-wrapped proposal).
///  - kGarbage: 200 with a reply containing no JSON object.
///  - kUnauthorized: 401, echoing the Authorization header in the error body.
///  - kRateLimitOnce: 429 for the first request, then behaves like kOk.
///  - kServerErrorTwice: 500 for the first two requests, then kOk.
///  - kServerError: 500 always.
///  - kMalformed: 200 with an envelope missing choices[0].message.content.
enum class StubMode {
  kOk,
  kGarbage,
  kUnauthorized,
  kRateLimitOnce,
  kServerErrorTwice,
  kServerError,
  kMalformed,
};

std::optional<StubMode> parse_stub_mode(const std::string& name);

/// Assistant reply served by kOk: free text around one valid proposal object
/// referencing agents "a0"/"a1" and lane "lane_0" (the bundled merge fixture).
extern const char kStubProposalReply[];

/// Minimal in-process chat-completions endpoint used by the service-backend
/// tests and runnable standalone. Serves POST /v1/chat/completions plus
/// GET /stats (JSON request counter). One instance per behavior.
class StubServer {
 public:
  explicit StubServer(StubMode mode, std::string reply = kStubProposalReply);
  ~StubServer();

  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  /// Binds 127.0.0.1 on an ephemeral port and serves from a background
  /// thread. Returns the port; throws std::runtime_error if binding fails.
  int start();
  void stop();

  /// Blocks until the server stops (standalone binary).
  void wait();

  /// "http://127.0.0.1:<port>/v1"; valid after start().
  std::string base_url() const;

  int port() const { return port_; }
  int request_count() const { return requests_.load(); }

 private:
  StubMode mode_;
  std::string reply_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::atomic<int> requests_{0};
  int port_ = -1;
};

}  // namespace socialgen

#endif  // SOCIALGEN_TOOLS_STUB_SERVER_HPP_
