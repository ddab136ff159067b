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

#ifndef SOCIALGEN_ERRORS_HPP_
#define SOCIALGEN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace socialgen {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// scenario ingestion
class ParseError : public Error {
public:
  using Error::Error;
};
class ValidationError : public Error {
public:
  using Error::Error;
};

// proposer
class InsufficientAgents : public Error {
public:
  using Error::Error;
};

/// Raised while extracting a structured proposal from free-form chat text.
/// Carries the offending fragment for logging.
class ProposalParseError : public Error {
public:
  ProposalParseError(const std::string& msg, std::string fragment)
      : Error(msg), fragment_(std::move(fragment)) {}
  const std::string& fragment() const { return fragment_; }

private:
  std::string fragment_;
};
class NoJsonFound : public ProposalParseError {
public:
  using ProposalParseError::ProposalParseError;
};
class SchemaError : public ProposalParseError {
public:
  using ProposalParseError::ProposalParseError;
};
class ReferenceError : public ProposalParseError {
public:
  using ProposalParseError::ProposalParseError;
};
class SelfPairError : public ProposalParseError {
public:
  using ProposalParseError::ProposalParseError;
};

// llm gateway
class GatewayError : public Error {
public:
  using Error::Error;
};
class AuthError : public GatewayError {
public:
  using GatewayError::GatewayError;
};
class RateLimited : public GatewayError {
public:
  using GatewayError::GatewayError;
};
class ServerError : public GatewayError {
public:
  using GatewayError::GatewayError;
};
class TransportError : public GatewayError {
public:
  using GatewayError::GatewayError;
};
class MalformedResponse : public GatewayError {
public:
  using GatewayError::GatewayError;
};

// diffusion + guidance
class InvalidSchedule : public Error {
public:
  using Error::Error;
};
class DimensionMismatch : public Error {
public:
  using Error::Error;
};
class SolverFailure : public Error {
public:
  using Error::Error;
};
class NonFiniteReward : public Error {
public:
  NonFiniteReward(const std::string& msg, int member_index)
      : Error(msg), member_index_(member_index) {}
  int member_index() const { return member_index_; }

private:
  int member_index_ = -1;
};

// social reward
class UnknownIntent : public Error {
public:
  using Error::Error;
};

// metrics
class EmptyBatch : public Error {
public:
  using Error::Error;
};

}  // namespace socialgen

#endif  // SOCIALGEN_ERRORS_HPP_
