#include "http.hpp"

#include <regex>

#include "error.hpp"
#include "httplib.h"

namespace mortar {
namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string base_path;
};

Endpoint SplitEndpoint(const std::string &endpoint) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint, m, kUrl)) {
    throw Error(ErrorKind::kConfig, "bad endpoint URL '" + endpoint + "'");
  }
  std::string base = m[2].matched ? m[2].str() : "";
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {m[1].str(), base};
}

void Configure(httplib::Client &client, double timeout_seconds) {
  auto secs = static_cast<time_t>(timeout_seconds);
  auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
}

}  // namespace

HttpResponse HttpPostJson(const std::string &endpoint, const std::string &path,
                          const std::string &body, const HttpHeaders &headers,
                          double timeout_seconds) {
  Endpoint ep = SplitEndpoint(endpoint);
  httplib::Client client(ep.scheme_host_port);
  Configure(client, timeout_seconds);
  httplib::Headers hs;
  for (const auto &[k, v] : headers) hs.emplace(k, v);
  auto res = client.Post(ep.base_path + path, hs, body, "application/json");
  if (!res) {
    throw Error(ErrorKind::kTransport, "POST " + endpoint + path + " failed: " +
                                           httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

HttpResponse HttpGet(const std::string &endpoint, const std::string &path,
                     double timeout_seconds) {
  Endpoint ep = SplitEndpoint(endpoint);
  httplib::Client client(ep.scheme_host_port);
  Configure(client, timeout_seconds);
  auto res = client.Get(ep.base_path + path);
  if (!res) {
    throw Error(ErrorKind::kTransport, "GET " + endpoint + path + " failed: " +
                                           httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

}  // namespace mortar
