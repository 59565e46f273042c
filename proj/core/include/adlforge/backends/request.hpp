#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adlforge/model/error.hpp"

namespace adlforge::backends {

/// The four model roles a pipeline can call.
enum class Role { caption, detect, localize, chat };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);
/// URL route of a role on the wire ("/caption", ...).
std::string_view route(Role r);

/// Encoded still image (JPEG or PNG bytes).
struct EncodedImage {
  std::string bytes;
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// One logical model call. `payload` holds the role-specific body without
/// media; attached images travel in `media` and are keyed by their hash.
struct BackendRequest {
  Role role = Role::chat;
  nlohmann::json payload = nlohmann::json::object();
  std::vector<EncodedImage> media;
  std::string model_id;

  /// Content hash of attached media; empty iff no media is attached.
  std::string media_hash() const;
  /// Deterministic cache key: SHA-256 of the sorted-key serialization of
  /// {role, model_id, payload, media_hash}.
  std::string cache_key() const;
  /// The sorted-key text hashed by cache_key().
  std::string canonical_text() const;
  /// Human-readable text of the request (prompts, message contents, labels)
  /// used by fixture matchers and error messages.
  std::string match_text() const;
};

struct LocalizedBox {
  std::array<double, 4> box{};  // x1, y1, x2, y2 in pixels
  std::string label;
  double score = 0.0;
  std::vector<float> feature;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

/// Connection failures, timeouts, exhausted retries.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Non-200 HTTP response.
class StatusError : public BackendError {
 public:
  StatusError(int status, const std::string& what) : BackendError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Response that does not follow the wire schema of its role.
class ResponseSchemaError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// A mock backend received a request no fixture matches.
class FixtureMissError : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Checks a raw response body against its role's wire schema. Throws
/// ResponseSchemaError.
void validate_response(Role role, std::string_view body);

}  // namespace adlforge::backends
