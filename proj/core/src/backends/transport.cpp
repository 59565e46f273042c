#include "adlforge/backends/transport.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include "adlforge/model/hashing.hpp"

namespace adlforge::backends {

using nlohmann::json;

HttpTransport::HttpTransport(HttpEndpoints endpoints) : endpoints_(std::move(endpoints)) {}

json HttpTransport::wire_body(const BackendRequest& req) {
  json body = json::object();
  switch (req.role) {
    case Role::caption:
      if (req.media.size() != 1) throw PreconditionError("caption request needs exactly one image");
      body["image"] = base64_encode(req.media.front().bytes);
      body["prompt"] = req.payload.at("prompt");
      break;
    case Role::detect: {
      json images = json::array();
      for (const auto& m : req.media) images.push_back(base64_encode(m.bytes));
      body["images"] = std::move(images);
      break;
    }
    case Role::localize:
      if (req.media.size() != 1) throw PreconditionError("localize request needs exactly one image");
      body["image"] = base64_encode(req.media.front().bytes);
      body["labels"] = req.payload.at("labels");
      break;
    case Role::chat:
      body["messages"] = req.payload.at("messages");
      body["temperature"] = req.payload.value("temperature", 0.0);
      body["max_tokens"] = req.payload.value("max_tokens", 1024);
      break;
  }
  return body;
}

namespace {

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

std::string HttpTransport::send(const BackendRequest& req) {
  if (NetworkGuard::network_disabled())
    throw TransportError(fmt::format("network access is disabled; refused {} call", to_string(req.role)));
  const auto it = endpoints_.base_urls.find(req.role);
  if (it == endpoints_.base_urls.end() || it->second.empty())
    throw PreconditionError(fmt::format("no endpoint configured for role {}", to_string(req.role)));
  const auto [host, prefix] = split_url(it->second);

  httplib::Client cli(host);
  const auto secs = endpoints_.timeout_ms / 1000;
  const auto usecs = (endpoints_.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);

  const std::string path = prefix + std::string(route(req.role));
  auto res = cli.Post(path, wire_body(req).dump(), "application/json");
  if (!res)
    throw TransportError(fmt::format("{} {}{}: {}", to_string(req.role), host, path,
                                     httplib::to_string(res.error())));
  if (res->status != 200)
    throw StatusError(res->status, fmt::format("{} {}{} returned HTTP {}: {}", to_string(req.role),
                                               host, path, res->status, res->body.substr(0, 300)));
  return res->body;
}

std::string SentinelTransport::send(const BackendRequest& req) {
  throw TransportError(fmt::format("sentinel transport: unexpected {} call (cache key {})",
                                   to_string(req.role), req.cache_key()));
}

std::string CountingTransport::send(const BackendRequest& req) {
  ++total_;
  ++per_role_[static_cast<int>(req.role)];
  return inner_->send(req);
}

}  // namespace adlforge::backends
