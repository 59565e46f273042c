#include "adlforge/backends/client.hpp"

#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace adlforge::backends {

using nlohmann::json;

BackendClient::BackendClient(std::shared_ptr<Transport> transport, std::shared_ptr<ResponseCache> cache,
                             ClientOptions options, RateLimiter* limiter)
    : transport_(std::move(transport)),
      cache_(std::move(cache)),
      options_(std::move(options)),
      limiter_(limiter) {
  if (!transport_) throw PreconditionError("backend client needs a transport");
}

BackendRequest BackendClient::make_request(Role role, json payload, std::vector<EncodedImage> media) const {
  BackendRequest req;
  req.role = role;
  req.payload = std::move(payload);
  req.media = std::move(media);
  if (auto it = options_.model_ids.find(role); it != options_.model_ids.end()) req.model_id = it->second;
  return req;
}

std::string BackendClient::call(const BackendRequest& req) {
  const std::string key = req.cache_key();
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      try {
        validate_response(req.role, *hit);
        ++cache_hits_;
        return *hit;
      } catch (const ResponseSchemaError& e) {
        spdlog::warn("cached {} response {} fails schema ({}); refetching", to_string(req.role), key, e.what());
      }
    }
  }

  std::string last_error;
  bool last_was_status = false;
  int last_status = 0;
  const int attempts = std::max(1, options_.max_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      ++retries_;
      std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    }
    if (limiter_) limiter_->acquire();
    ++wire_calls_;
    try {
      std::string body = transport_->send(req);
      validate_response(req.role, body);
      if (cache_) cache_->put(key, body);
      return body;
    } catch (const StatusError& e) {
      // Client errors will not improve on retry.
      if (e.status() != 429 && e.status() < 500) throw;
      last_error = e.what();
      last_was_status = true;
      last_status = e.status();
    } catch (const TransportError& e) {
      last_error = e.what();
      last_was_status = false;
    }
    spdlog::debug("{} call attempt {}/{} failed: {}", to_string(req.role), attempt + 1, attempts, last_error);
  }
  const auto msg = fmt::format("{} call failed after {} attempts: {}", to_string(req.role), attempts, last_error);
  if (last_was_status) throw StatusError(last_status, msg);
  throw TransportError(msg);
}

std::string BackendClient::caption(const EncodedImage& image, const std::string& prompt, int frame_index) {
  auto req = make_request(Role::caption, json{{"prompt", prompt}, {"frame_index", frame_index}}, {image});
  return json::parse(call(req)).at("caption").get<std::string>();
}

std::vector<std::string> BackendClient::detect(const std::vector<EncodedImage>& images) {
  auto req = make_request(Role::detect, json::object(), images);
  return json::parse(call(req)).at("objects").get<std::vector<std::string>>();
}

std::vector<LocalizedBox> BackendClient::localize(const EncodedImage& image, const std::vector<std::string>& labels) {
  auto req = make_request(Role::localize, json{{"labels", labels}}, {image});
  const json j = json::parse(call(req));
  std::vector<LocalizedBox> out;
  const auto n = j["labels"].size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LocalizedBox b;
    for (int k = 0; k < 4; ++k) b.box[k] = j["boxes"][i][k].get<double>();
    b.label = j["labels"][i].get<std::string>();
    b.score = j["scores"][i].get<double>();
    b.feature = j["features"][i].get<std::vector<float>>();
    out.push_back(std::move(b));
  }
  return out;
}

std::string BackendClient::chat(const std::vector<ChatMessage>& messages) {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  auto req = make_request(Role::chat, json{{"messages", std::move(msgs)},
                                           {"temperature", options_.temperature},
                                           {"max_tokens", options_.max_tokens}});
  return json::parse(call(req)).at("content").get<std::string>();
}

CallStats BackendClient::stats() const {
  return {wire_calls_.load(), cache_hits_.load(), retries_.load()};
}

void BackendClient::reset_stats() {
  wire_calls_ = 0;
  cache_hits_ = 0;
  retries_ = 0;
}

}  // namespace adlforge::backends
