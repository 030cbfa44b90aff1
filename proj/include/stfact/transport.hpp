// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace stfact {

struct HttpRequest {
  std::string origin;  // scheme://host[:port]
  std::string path;
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
  double timeout_seconds = 60.0;
};

struct HttpResponse {
  int status = 0;  // 0 = no response (connection failure or timeout)
  std::string body;
  std::string error;
};

/// Seam between the backend clients and the network. Tests inject counting
/// or scripted transports here.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; one connection per request.
std::shared_ptr<Transport> make_http_transport();

/// Splits "http://host:8080/v1" into origin "http://host:8080" and path "/v1".
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

}  // namespace stfact
