// Copyright 2026 The trustauth Authors
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

// trustauth-server: the HTTP service. TRUSTAUTH_LISTEN and TRUSTAUTH_DATA_DIR
// override the config file.

#include <csignal>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "trustauth/engine.hpp"
#include "trustauth/error.hpp"
#include "trustauth/service.hpp"

namespace {
trustauth::service::Server *g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}
}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"trustauth-server: HTTP front door for enrollment, verification, PAD and reports"};
  std::string config;
  app.add_option("--config", config, "service config JSON");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    trustauth::ServiceConfig cfg;
    if (!config.empty()) {
      cfg = trustauth::LoadConfig(config);
    } else {
      trustauth::ApplyEnvironment(cfg);
      cfg.Validate();
    }
    trustauth::Engine engine(cfg);
    trustauth::service::Server server(engine);
    const int port = server.Bind();
    g_server = &server;
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    std::cerr << "listening on port " << port << ", data in " << cfg.data_dir.string() << "\n";
    for (auto i : engine.AvailableInstruments()) std::cerr << "  instrument " << trustauth::ToString(i) << "\n";
    server.Run();
    g_server = nullptr;
  } catch (const trustauth::Error &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
