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

#include "stub_server.hpp"

#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace socialgen {

using nlohmann::json;

const char kStubProposalReply[] =
    "The most promising interaction pairs the two moving vehicles.\n"
    "{\"agent_i\": \"a0\", \"agent_j\": \"a1\", "
    "\"intent_i\": {\"kind\": \"MaintainSpeed\", \"target_speed\": 10.0}, "
    "\"intent_j\": {\"kind\": \"LaneChangeRight\", \"target_lane_id\": \"lane_0\"}, "
    "\"rationale\": \"merge ahead of the slower vehicle\"}\n"
    "Both agents stay within their kinematic limits.";

std::optional<StubMode> parse_stub_mode(const std::string& name) {
  if (name == "ok") return StubMode::kOk;
  if (name == "garbage") return StubMode::kGarbage;
  if (name == "unauthorized") return StubMode::kUnauthorized;
  if (name == "rate-limit-once") return StubMode::kRateLimitOnce;
  if (name == "server-error-twice") return StubMode::kServerErrorTwice;
  if (name == "server-error") return StubMode::kServerError;
  if (name == "malformed") return StubMode::kMalformed;
  return std::nullopt;
}

namespace {

std::string envelope(const std::string& content) {
  return json{{"id", "stub-1"},
              {"object", "chat.completion"},
              {"choices",
               {{{"index", 0},
                 {"message", {{"role", "assistant"}, {"content", content}}},
                 {"finish_reason", "stop"}}}}}
      .dump();
}

std::string error_body(const std::string& message) {
  return json{{"error", {{"message", message}, {"type", "stub_error"}}}}.dump();
}

}  // namespace

StubServer::StubServer(StubMode mode, std::string reply)
    : mode_(mode), reply_(std::move(reply)), server_(new httplib::Server) {}

StubServer::~StubServer() { stop(); }

int StubServer::start() {
  server_->Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"requests", requests_.load()}}.dump(), "application/json");
  });
  server_->Post("/v1/chat/completions",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const int n = ++requests_;
                  switch (mode_) {
                    case StubMode::kOk:
                      res.set_content(envelope(reply_), "application/json");
                      return;
                    case StubMode::kGarbage:
                      res.set_content(envelope("no structured answer here"),
                                      "application/json");
                      return;
                    case StubMode::kUnauthorized:
                      // Echoes the bearer token back so leak tests can verify
                      // the client scrubs secrets from error reports.
                      res.status = 401;
                      res.set_content(
                          error_body("invalid credentials: " +
                                     req.get_header_value("Authorization")),
                          "application/json");
                      return;
                    case StubMode::kRateLimitOnce:
                      if (n == 1) {
                        res.status = 429;
                        res.set_content(error_body("slow down"), "application/json");
                      } else {
                        res.set_content(envelope(reply_), "application/json");
                      }
                      return;
                    case StubMode::kServerErrorTwice:
                      if (n <= 2) {
                        res.status = 500;
                        res.set_content(error_body("transient"), "application/json");
                      } else {
                        res.set_content(envelope(reply_), "application/json");
                      }
                      return;
                    case StubMode::kServerError:
                      res.status = 500;
                      res.set_content(error_body("permanent"), "application/json");
                      return;
                    case StubMode::kMalformed:
                      res.set_content(json{{"choices", json::array()}}.dump(),
                                      "application/json");
                      return;
                  }
                });
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("stub server could not bind a port");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void StubServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void StubServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string StubServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
}

}  // namespace socialgen
