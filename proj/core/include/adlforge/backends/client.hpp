#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adlforge/backends/cache.hpp"
#include "adlforge/backends/rate_limiter.hpp"
#include "adlforge/backends/request.hpp"
#include "adlforge/backends/transport.hpp"

namespace adlforge::backends {

struct ClientOptions {
  std::map<Role, std::string> model_ids;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{200};
  double temperature = 0.0;
  int max_tokens = 1024;
};

struct CallStats {
  std::size_t wire_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
};

/// Uniform entry point for every model call: cache lookup, rate-limited wire
/// call with exponential-backoff retries, schema check, cache store.
/// Safe to share between worker threads.
class BackendClient {
 public:
  BackendClient(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache,
                ClientOptions options = {}, RateLimiter* limiter = &RateLimiter::global());

  /// Raw response body for a request.
  std::string call(const BackendRequest& req);

  std::string caption(const EncodedImage& image, const std::string& prompt, int frame_index);
  std::vector<std::string> detect(const std::vector<EncodedImage>& images);
  std::vector<LocalizedBox> localize(const EncodedImage& image, const std::vector<std::string>& labels);
  std::string chat(const std::vector<ChatMessage>& messages);

  BackendRequest make_request(Role role, nlohmann::json payload,
                              std::vector<EncodedImage> media = {}) const;

  CallStats stats() const;
  void reset_stats();
  const ClientOptions& options() const { return options_; }

 private:
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
  ClientOptions options_;
  RateLimiter* limiter_;
  std::atomic<std::size_t> wire_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
};

}  // namespace adlforge::backends
