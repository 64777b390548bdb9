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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include "activeaudit/blackbox.h"
#include "activeaudit/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace activeaudit {

std::string encode_remote_request(std::span<const AuditExample* const> examples) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const AuditExample* ex : examples) {
    nlohmann::ordered_json item;
    item["id"] = ex->id;
    item["features"] = ex->features;
    if (ex->text) item["text"] = *ex->text;
    items.push_back(std::move(item));
  }
  nlohmann::ordered_json body;
  body["items"] = std::move(items);
  return body.dump();
}

std::vector<ScoreRecord> decode_remote_response(const std::string& body,
                                                std::span<const AuditExample* const> requested) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kRemoteProtocolError, "response is not valid JSON");
  }
  if (!j.is_object() || !j.contains("items") || !j["items"].is_array()) {
    fail(ErrorCode::kRemoteProtocolError, "response lacks an items array");
  }
  std::unordered_map<std::string, double> got;
  std::vector<std::string> extras;
  std::unordered_set<std::string> wanted;
  for (const AuditExample* ex : requested) wanted.insert(ex->id);
  for (const auto& item : j["items"]) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() || !item.contains("score")) {
      fail(ErrorCode::kRemoteProtocolError, "malformed item");
    }
    const std::string id = item["id"].get<std::string>();
    if (!item["score"].is_number()) fail(ErrorCode::kRemoteProtocolError, "out-of-range score for " + id);
    const double s = item["score"].get<double>();
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      fail(ErrorCode::kRemoteProtocolError, "out-of-range score for " + id);
    }
    if (!wanted.count(id) || !got.emplace(id, s).second) extras.push_back(id);
  }
  if (!extras.empty()) {
    std::string list;
    for (const auto& id : extras) list += (list.empty() ? "" : ",") + id;
    fail(ErrorCode::kRemoteProtocolError, "extra ids: " + list);
  }
  std::string missing;
  for (const AuditExample* ex : requested) {
    if (!got.count(ex->id)) missing += (missing.empty() ? "" : ",") + ex->id;
  }
  if (!missing.empty()) fail(ErrorCode::kRemoteProtocolError, "missing ids: " + missing);
  std::vector<ScoreRecord> out;
  out.reserve(requested.size());
  for (const AuditExample* ex : requested) out.push_back({ex->id, got.at(ex->id)});
  return out;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) fail(ErrorCode::kConfigError, "endpoint must be an http URL: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::vector<ScoreRecord> exchange(httplib::Client& client, const std::string& path,
                                  std::span<const AuditExample* const> batch, const RemoteOptions& options) {
  httplib::Headers headers;
  if (!options.credential_env.empty()) {
    if (const char* token = std::getenv(options.credential_env.c_str()); token != nullptr && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  const std::string body = encode_remote_request(batch);
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (res) {
      if (res->status != 200) {
        fail(ErrorCode::kRemoteProtocolError, "HTTP status " + std::to_string(res->status));
      }
      return decode_remote_response(res->body, batch);
    }
    if (attempt >= options.retries) {
      if (res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
          res.error() == httplib::Error::ConnectionTimeout) {
        fail(ErrorCode::kTimeout, "no response from remote scorer within timeout");
      }
      fail(ErrorCode::kRemoteProtocolError, "transport error: " + httplib::to_string(res.error()));
    }
  }
}

}  // namespace

std::vector<ScoreRecord> query_remote(const std::string& endpoint, std::span<const AuditExample* const> examples,
                                      const RemoteOptions& options) {
  if (options.max_batch == 0) fail(ErrorCode::kConfigError, "max_batch must be >= 1");
  const Endpoint ep = split_endpoint(endpoint);
  httplib::Client client(ep.origin);
  const auto seconds = static_cast<time_t>(options.timeout_seconds);
  const auto micros = static_cast<time_t>((options.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  std::vector<ScoreRecord> out;
  out.reserve(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += options.max_batch) {
    const std::size_t len = std::min(options.max_batch, examples.size() - start);
    auto part = exchange(client, ep.path, examples.subspan(start, len), options);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

RemoteScorer::RemoteScorer(std::string endpoint, RemoteOptions options, std::optional<std::size_t> dimension)
    : BlackBoxScorer("remote:" + endpoint, dimension), endpoint_(std::move(endpoint)), options_(std::move(options)) {}

std::vector<double> RemoteScorer::compute_scores(std::span<const AuditExample* const> examples) {
  const auto records = query_remote(endpoint_, examples, options_);
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.score);
  return out;
}

// ---- ScoreTableServer ---------------------------------------------------

struct ScoreTableServer::Impl {
  std::unordered_map<std::string, double> table;
  Responder responder;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::string path;
  std::atomic<std::size_t> served{0};
};

ScoreTableServer::ScoreTableServer(std::unordered_map<std::string, double> table, Responder responder)
    : impl_(std::make_unique<Impl>()) {
  impl_->table = std::move(table);
  impl_->responder = std::move(responder);
}

ScoreTableServer::~ScoreTableServer() { stop(); }

int ScoreTableServer::start(int port, const std::string& path) {
  Impl* impl = impl_.get();
  impl->path = path;
  impl->server.Post(path, [impl](const httplib::Request& req, httplib::Response& res) {
    impl->served.fetch_add(1);
    if (impl->responder) {
      res.set_content(impl->responder(req.body), "application/json");
      return;
    }
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      return;
    }
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& item : request.value("items", nlohmann::json::array())) {
      const std::string id = item.value("id", "");
      auto it = impl->table.find(id);
      if (it == impl->table.end()) continue;
      items.push_back({{"id", id}, {"score", it->second}});
    }
    nlohmann::ordered_json body;
    body["items"] = std::move(items);
    res.set_content(body.dump(), "application/json");
  });
  impl->port = port == 0 ? impl->server.bind_to_any_port("127.0.0.1") : port;
  if (port != 0 && !impl->server.bind_to_port("127.0.0.1", port)) {
    fail(ErrorCode::kIoError, "cannot bind port " + std::to_string(port));
  }
  if (impl->port <= 0) fail(ErrorCode::kIoError, "cannot bind loopback port");
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
  return impl->port;
}

void ScoreTableServer::stop() {
  if (!impl_) return;
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string ScoreTableServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + impl_->path;
}

std::size_t ScoreTableServer::requests_served() const { return impl_->served.load(); }

}  // namespace activeaudit
