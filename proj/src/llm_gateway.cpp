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

#include "socialgen/llm_gateway.hpp"

#include <chrono>
#include <cmath>
#include <thread>

// rng.hpp (Eigen) must precede httplib.h: the latter drags in resolv.h,
// whose _res macro mangles declarations in any header included after it.
#include "socialgen/rng.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace socialgen {

namespace {

using nlohmann::json;

// Splits "scheme://host:port/prefix" into the client base and path prefix.
void split_url(const std::string& url, std::string* base, std::string* prefix) {
  const auto scheme_end = url.find("://");
  const auto path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    *base = url;
    prefix->clear();
  } else {
    *base = url.substr(0, path_start);
    *prefix = url.substr(path_start);
    while (!prefix->empty() && prefix->back() == '/') prefix->pop_back();
  }
}

class HttplibTransport : public HttpTransport {
 public:
  std::optional<HttpResponse> post(const std::string& url, const std::string& body,
                                   const HttpHeaders& headers,
                                   double timeout_seconds) override {
    std::string base, path;
    split_url(url, &base, &path);
    httplib::Client client(base);
    const auto seconds = static_cast<time_t>(timeout_seconds);
    const auto micros = static_cast<time_t>((timeout_seconds - seconds) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers hl;
    for (const auto& kv : headers) hl.emplace(kv.first, kv.second);
    httplib::Result res = client.Post(path.c_str(), hl, body, "application/json");
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  }
};

class RealSleeper : public Sleeper {
 public:
  void sleep_for_seconds(double seconds) override {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
};

std::string truncate(const std::string& text, size_t limit = 200) {
  if (text.size() <= limit) return text;
  return text.substr(0, limit) + "...";
}

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

std::unique_ptr<Sleeper> make_real_sleeper() {
  return std::make_unique<RealSleeper>();
}

void validate_gateway_config(const GatewayConfig& config) {
  if (config.base_url.empty()) throw ValidationError("gateway base_url is empty");
  if (config.model.empty()) throw ValidationError("gateway model is empty");
  if (!(config.timeout_seconds > 0.0)) {
    throw ValidationError("gateway timeout must be > 0");
  }
  if (config.max_retries < 0) throw ValidationError("gateway max_retries must be >= 0");
}

double backoff_delay(int retry_index, double jitter01) {
  const double base = std::ldexp(1.0, retry_index);  // 1s * 2^n
  return base * (0.8 + 0.4 * jitter01);
}

std::string scrub_secret(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  size_t pos = 0;
  while ((pos = text.find(secret, pos)) != std::string::npos) {
    text.replace(pos, secret.size(), "***");
    pos += 3;
  }
  return text;
}

ChatGateway::ChatGateway(GatewayConfig config)
    : ChatGateway(std::move(config), make_httplib_transport(), make_real_sleeper()) {}

ChatGateway::ChatGateway(GatewayConfig config, std::unique_ptr<HttpTransport> transport,
                         std::unique_ptr<Sleeper> sleeper, std::uint64_t jitter_seed)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      jitter_seed_(jitter_seed) {
  validate_gateway_config(config_);
}

std::string ChatGateway::chat(const std::vector<ChatMessage>& messages) const {
  if (messages.empty()) throw ValidationError("chat needs at least one message");
  json body_messages = json::array();
  for (const ChatMessage& m : messages) {
    if (m.role != "system" && m.role != "user" && m.role != "assistant") {
      throw ValidationError("chat message role must be system, user, or assistant");
    }
    if (m.content.empty()) throw ValidationError("chat message content is empty");
    body_messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  const json body = {{"model", config_.model},
                     {"messages", body_messages},
                     {"temperature", config_.temperature}};
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  HttpHeaders headers;
  if (!config_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  }

  const auto scrub = [this](const std::string& text) {
    return scrub_secret(text, config_.api_key);
  };
  Rng jitter(mix_seed(jitter_seed_, 0x6a17, call_counter_.fetch_add(1), 0, 0));

  const int max_attempts = 1 + config_.max_retries;
  std::string last_failure;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::optional<HttpResponse> res =
        transport_->post(url, body.dump(), headers, config_.timeout_seconds);
    if (!res.has_value()) {
      last_failure = "transport failure (connect or timeout)";
    } else if (res->status == 200) {
      json reply;
      try {
        reply = json::parse(res->body);
      } catch (const json::exception& e) {
        throw MalformedResponse(
            scrub("chat reply is not JSON: " + std::string(e.what()) +
                  "; body: " + truncate(res->body)));
      }
      if (!reply.contains("choices") || !reply["choices"].is_array() ||
          reply["choices"].empty() ||
          !reply["choices"][0].contains("message") ||
          !reply["choices"][0]["message"].contains("content") ||
          !reply["choices"][0]["message"]["content"].is_string()) {
        throw MalformedResponse(
            scrub("chat reply lacks choices[0].message.content; body: " +
                  truncate(res->body)));
      }
      return reply["choices"][0]["message"]["content"].get<std::string>();
    } else if (res->status == 401 || res->status == 403) {
      throw AuthError(scrub("authentication rejected (HTTP " +
                            std::to_string(res->status) + ")"));
    } else if (res->status == 429) {
      last_failure = "rate limited (HTTP 429)";
    } else if (res->status >= 500 && res->status < 600) {
      last_failure = "server error (HTTP " + std::to_string(res->status) + ")";
    } else {
      throw GatewayError(scrub("unexpected HTTP status " +
                               std::to_string(res->status) + "; body: " +
                               truncate(res->body)));
    }
    if (attempt < max_attempts) {
      sleeper_->sleep_for_seconds(backoff_delay(attempt - 1, jitter.uniform()));
    }
  }
  const std::string suffix =
      " after " + std::to_string(max_attempts) + " attempts: " + last_failure;
  if (last_failure.rfind("rate", 0) == 0) throw RateLimited(scrub("gave up" + suffix));
  if (last_failure.rfind("server", 0) == 0) throw ServerError(scrub("gave up" + suffix));
  throw TransportError(scrub("gave up" + suffix));
}

}  // namespace socialgen
