// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>

#include "stfact/error.hpp"
#include "stfact/transport.hpp"

namespace stfact {

namespace {

class HttpLibTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    httplib::Client client(request.origin);
    const double t = request.timeout_seconds > 0 ? request.timeout_seconds : 60.0;
    const auto sec = static_cast<time_t>(std::floor(t));
    const auto usec = static_cast<time_t>((t - std::floor(t)) * 1e6);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    client.set_keep_alive(false);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    HttpResponse out;
    auto res = client.Post(request.path, headers, request.body, "application/json");
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttpLibTransport>(); }

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfig, "base_url lacks a scheme: '" + base_url + "'");
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {base_url, ""};
  std::string path = base_url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {base_url.substr(0, path_start), path};
}

}  // namespace stfact
