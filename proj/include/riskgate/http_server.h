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

#ifndef RISKGATE_HTTP_SERVER_H_
#define RISKGATE_HTTP_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "riskgate/gateway.h"
#include "riskgate/telemetry.h"

namespace riskgate {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int api_port = 8080;      // 0 picks a free port
  int metrics_port = 8000;  // equal to api_port serves both on one listener
  std::string api_key;      // required in X-API-Key when non-empty
};

// POST /v1/generate {"text", "session", "client"?} and GET /metrics.
class HttpServer {
 public:
  HttpServer(Gateway& gateway, HttpOptions options);
  ~HttpServer();

  // Binds both listeners and starts serving on background threads. Throws
  // std::runtime_error if a port cannot be bound.
  void Start();
  void Stop();

  int api_port() const { return api_port_; }
  int metrics_port() const { return metrics_port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Gateway& gateway_;
  HttpOptions options_;
  int api_port_ = 0;
  int metrics_port_ = 0;
};

}  // namespace riskgate

#endif  // RISKGATE_HTTP_SERVER_H_
