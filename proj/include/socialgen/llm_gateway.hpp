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

#ifndef SOCIALGEN_LLM_GATEWAY_HPP_
#define SOCIALGEN_LLM_GATEWAY_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "socialgen/errors.hpp"

namespace socialgen {

/// Name of the environment variable holding the API key.
inline constexpr const char* kApiKeyEnvVar = "SOCIALGEN_API_KEY";

struct GatewayConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080/v1"
  std::string model;
  std::string api_key;  // sent as a bearer token, never echoed in errors
  double timeout_seconds = 30.0;
  int max_retries = 3;
  double temperature = 0.2;
};

void validate_gateway_config(const GatewayConfig& config);

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// Transport seam so the retry/backoff logic is testable without sockets.
/// Returns nullopt on connect failure or timeout.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual std::optional<HttpResponse> post(const std::string& url,
                                           const std::string& body,
                                           const HttpHeaders& headers,
                                           double timeout_seconds) = 0;
};

class Sleeper {
 public:
  virtual ~Sleeper() = default;
  virtual void sleep_for_seconds(double seconds) = 0;
};

std::unique_ptr<HttpTransport> make_httplib_transport();
std::unique_ptr<Sleeper> make_real_sleeper();

/// Delay before retry number `retry_index` (0-based): 1s * 2^retry_index,
/// jittered by +-20% (jitter01 in [0, 1) maps linearly onto [0.8, 1.2)).
double backoff_delay(int retry_index, double jitter01);

/// Replaces every occurrence of `secret` in `text` with "***".
std::string scrub_secret(std::string text, const std::string& secret);

/// Chat-completions client: POST {base_url}/chat/completions with bearer
/// auth, returning choices[0].message.content. Retries 429, 5xx, and
/// transport failures with exponential backoff; 401/403 fail immediately.
/// Total attempts never exceed 1 + max_retries. All error text is scrubbed
/// of the api_key. Safe for concurrent calls.
class ChatGateway {
 public:
  explicit ChatGateway(GatewayConfig config);
  ChatGateway(GatewayConfig config, std::unique_ptr<HttpTransport> transport,
              std::unique_ptr<Sleeper> sleeper, std::uint64_t jitter_seed = 0);

  std::string chat(const std::vector<ChatMessage>& messages) const;

  const GatewayConfig& config() const { return config_; }

 private:
  GatewayConfig config_;
  std::unique_ptr<HttpTransport> transport_;
  std::unique_ptr<Sleeper> sleeper_;
  std::uint64_t jitter_seed_ = 0;
  mutable std::atomic<std::uint64_t> call_counter_{0};
};

}  // namespace socialgen

#endif  // SOCIALGEN_LLM_GATEWAY_HPP_
