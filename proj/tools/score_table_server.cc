// Copyright 2026 The ActiveAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Loopback scoring stub: serves a fixed id,score table over the remote
// protocol until interrupted.
//
//   score_table_server --table scores.csv [--port 8080] [--path /score]

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <thread>

#include "CLI11.hpp"
#include "activeaudit/blackbox.h"
#include "activeaudit/errors.h"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serve an id,score table over the remote scoring protocol"};
  std::string table;
  int port = 8080;
  std::string path = "/score";
  app.add_option("--table", table, "id,score csv")->required();
  app.add_option("--port", port, "port on 127.0.0.1 (0 picks a free one)");
  app.add_option("--path", path, "request path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    activeaudit::ScoreTableServer server(activeaudit::read_score_table(table));
    server.start(port, path);
    std::printf("serving %s\n", server.endpoint().c_str());
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
