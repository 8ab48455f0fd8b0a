// Copyright 2026 The Riskgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskgate/http_server.h"

#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

namespace riskgate {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void SendJson(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// SO_REUSEADDR only: the library default also sets SO_REUSEPORT, which lets a
// second process bind the same port and silently split the traffic.
void ExclusiveSocketOptions(socket_t sock) {
  int yes = 1;
  setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes),
             sizeof(yes));
}

int BindPort(httplib::Server& server, const std::string& host, int port) {
  if (port == 0) {
    const int bound = server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + " on any port");
    return bound;
  }
  if (!server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

}  // namespace

struct HttpServer::Impl {
  httplib::Server api;
  httplib::Server metrics;
  bool split = false;
  std::thread api_thread;
  std::thread metrics_thread;
};

HttpServer::HttpServer(Gateway& gateway, HttpOptions options)
    : impl_(std::make_unique<Impl>()),
      gateway_(gateway),
      options_(std::move(options)) {
  impl_->split = options_.metrics_port != options_.api_port;
  impl_->api.set_socket_options(ExclusiveSocketOptions);
  impl_->metrics.set_socket_options(ExclusiveSocketOptions);

  impl_->api.Post("/v1/generate", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    if (!options_.api_key.empty() &&
        req.get_header_value("X-API-Key") != options_.api_key) {
      SendJson(res, 401, {{"error", "missing or wrong API key"}});
      return;
    }
    GatewayRequest greq;
    try {
      const json body = json::parse(req.body);
      greq.text = body.at("text").get<std::string>();
      greq.session_id = body.value("session", std::string());
      greq.client_id = body.value("client", std::string());
    } catch (const std::exception& e) {
      SendJson(res, 400, {{"error", std::string("bad request body: ") + e.what()}});
      return;
    }
    if (greq.client_id.empty()) greq.client_id = req.get_header_value("X-Client-Id");
    if (greq.client_id.empty()) greq.client_id = req.remote_addr;
    const GatewayResponse out = gateway_.Handle(greq);
    ordered_json body;
    body["trace_id"] = out.trace_id;
    body["tier"] = std::string(risk::ToString(out.trace.tier));
    body["outcome"] = out.trace.outcome;
    if (out.status == 200) {
      body["text"] = out.text;
      body["fingerprint"] = out.trace.fingerprint;
    } else {
      body["error"] = out.text;
      ordered_json evidence = ordered_json::array();
      for (const filter::Evidence& e : out.trace.evidence) {
        evidence.push_back({{"source", std::string(filter::ToString(e.source))},
                            {"detail", e.detail}});
      }
      body["evidence"] = evidence;
    }
    SendJson(res, out.status, body);
  });

  auto metrics_handler = [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(telemetry::Expose(gateway_.metrics()),
                    std::string(telemetry::kExpositionContentType).c_str());
  };
  (impl_->split ? impl_->metrics : impl_->api).Get("/metrics", metrics_handler);
}

HttpServer::~HttpServer() { Stop(); }

void HttpServer::Start() {
  api_port_ = BindPort(impl_->api, options_.host, options_.api_port);
  metrics_port_ = api_port_;
  if (impl_->split) {
    metrics_port_ = BindPort(impl_->metrics, options_.host, options_.metrics_port);
    impl_->metrics_thread = std::thread([this] { impl_->metrics.listen_after_bind(); });
  }
  impl_->api_thread = std::thread([this] { impl_->api.listen_after_bind(); });
  impl_->api.wait_until_ready();
  if (impl_->split) impl_->metrics.wait_until_ready();
}

void HttpServer::Stop() {
  if (!impl_) return;
  impl_->api.stop();
  impl_->metrics.stop();
  if (impl_->api_thread.joinable()) impl_->api_thread.join();
  if (impl_->metrics_thread.joinable()) impl_->metrics_thread.join();
}

}  // namespace riskgate
