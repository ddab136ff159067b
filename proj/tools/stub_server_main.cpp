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

// Standalone chat-completions stub for exercising the service backend
// without a real endpoint. Prints the bound port, then serves until killed.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stub_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chat-completions stub endpoint"};
  std::string mode_name = "ok";
  std::string reply_file;
  app.add_option("--mode", mode_name,
                 "ok | garbage | unauthorized | rate-limit-once | "
                 "server-error-twice | server-error | malformed")
      ->capture_default_str();
  app.add_option("--reply-file", reply_file,
                 "file whose contents replace the canned assistant reply");
  CLI11_PARSE(app, argc, argv);

  const auto mode = socialgen::parse_stub_mode(mode_name);
  if (!mode) {
    std::cerr << "unknown mode: " << mode_name << '\n';
    return 2;
  }
  std::string reply = socialgen::kStubProposalReply;
  if (!reply_file.empty()) {
    std::ifstream in(reply_file);
    if (!in) {
      std::cerr << "cannot open " << reply_file << '\n';
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    reply = buf.str();
  }

  socialgen::StubServer server(*mode, reply);
  const int port = server.start();
  std::cout << "listening on 127.0.0.1:" << port << " mode " << mode_name
            << std::endl;
  server.wait();
  return 0;
}
