#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mortar {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// `endpoint` is "scheme://host[:port][/base]"; `path` is appended to the
// base. Throws Error(kTransport) when no response arrives and Error(kConfig)
// for an unparseable endpoint.
HttpResponse HttpPostJson(const std::string &endpoint, const std::string &path,
                          const std::string &body, const HttpHeaders &headers,
                          double timeout_seconds);

HttpResponse HttpGet(const std::string &endpoint, const std::string &path,
                     double timeout_seconds);

}  // namespace mortar
