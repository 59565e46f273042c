#pragma once

#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <string>

#include "adlforge/backends/request.hpp"

namespace adlforge::backends {

/// Sends one request and returns the raw response body.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string send(const BackendRequest& req) = 0;
};

/// Process-wide switch that makes every network transport fail before it
/// touches a socket. Engaged by mock runs.
class NetworkGuard {
 public:
  static void disable_network() { disabled_.store(true); }
  static void enable_network() { disabled_.store(false); }
  static bool network_disabled() { return disabled_.load(); }

 private:
  static inline std::atomic<bool> disabled_{false};
};

struct HttpEndpoints {
  std::map<Role, std::string> base_urls;  // e.g. "http://127.0.0.1:8000"
  int timeout_ms = 30000;
};

/// JSON-over-HTTP client for the model service wire protocol.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(HttpEndpoints endpoints);
  std::string send(const BackendRequest& req) override;

  /// The JSON body put on the wire for a request.
  static nlohmann::json wire_body(const BackendRequest& req);

 private:
  HttpEndpoints endpoints_;
};

/// Fails on every call. Stands in for the network when a run must not
/// reach any model service.
class SentinelTransport : public Transport {
 public:
  std::string send(const BackendRequest& req) override;
};

/// Forwards to an inner transport and counts calls per role.
class CountingTransport : public Transport {
 public:
  explicit CountingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  std::string send(const BackendRequest& req) override;

  std::size_t calls() const { return total_.load(); }
  std::size_t calls(Role r) const { return per_role_[static_cast<int>(r)].load(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::atomic<std::size_t> total_{0};
  std::array<std::atomic<std::size_t>, 4> per_role_{};
};

}  // namespace adlforge::backends
