#include "adlforge/backends/request.hpp"

#include <cmath>

#include <fmt/format.h>

#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/hashing.hpp"

namespace adlforge::backends {

using nlohmann::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::caption: return "caption";
    case Role::detect: return "detect";
    case Role::localize: return "localize";
    case Role::chat: return "chat";
  }
  return "chat";
}

Role role_from_string(std::string_view s) {
  if (s == "caption") return Role::caption;
  if (s == "detect") return Role::detect;
  if (s == "localize") return Role::localize;
  if (s == "chat") return Role::chat;
  throw PreconditionError(fmt::format("unknown backend role '{}'", s));
}

std::string_view route(Role r) {
  switch (r) {
    case Role::caption: return "/caption";
    case Role::detect: return "/detect";
    case Role::localize: return "/localize";
    case Role::chat: return "/chat";
  }
  return "/chat";
}

std::string BackendRequest::media_hash() const {
  if (media.empty()) return {};
  if (media.size() == 1) return sha256_hex(media.front().bytes);
  std::string joined;
  for (const auto& m : media) {
    joined += sha256_hex(m.bytes);
    joined += '\n';
  }
  return sha256_hex(joined);
}

std::string BackendRequest::canonical_text() const {
  // nlohmann's default object type is an ordered std::map, so dump() already
  // emits keys sorted at every nesting level.
  json j = json::object();
  j["role"] = std::string(to_string(role));
  j["model_id"] = model_id;
  j["payload"] = payload;
  if (auto h = media_hash(); h.empty())
    j["media_hash"] = nullptr;
  else
    j["media_hash"] = std::move(h);
  return j.dump();
}

std::string BackendRequest::cache_key() const { return sha256_hex(canonical_text()); }

namespace {

void collect_text(const json& j, std::string& out) {
  if (j.is_string()) {
    out += j.get_ref<const std::string&>();
    out += '\n';
  } else if (j.is_array() || j.is_object()) {
    for (const auto& v : j) collect_text(v, out);
  }
}

}  // namespace

std::string BackendRequest::match_text() const {
  std::string out;
  collect_text(payload, out);
  return out;
}

namespace {

json parse_body(Role role, std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error&) {
    throw ResponseSchemaError(fmt::format("{} response is not JSON: {}", to_string(role),
                                          body.substr(0, 200)));
  }
}

[[noreturn]] void bad(Role role, std::string_view why) {
  throw ResponseSchemaError(fmt::format("{} response: {}", to_string(role), why));
}

}  // namespace

void validate_response(Role role, std::string_view body) {
  const json j = parse_body(role, body);
  if (!j.is_object()) bad(role, "not an object");
  switch (role) {
    case Role::caption:
      if (!j.contains("caption") || !j["caption"].is_string()) bad(role, "missing string 'caption'");
      return;
    case Role::chat:
      if (!j.contains("content") || !j["content"].is_string()) bad(role, "missing string 'content'");
      return;
    case Role::detect:
      if (!j.contains("objects") || !j["objects"].is_array()) bad(role, "missing list 'objects'");
      for (const auto& o : j["objects"])
        if (!o.is_string()) bad(role, "non-string object label");
      return;
    case Role::localize: {
      for (const char* k : {"boxes", "features", "labels", "scores"})
        if (!j.contains(k) || !j[k].is_array()) bad(role, fmt::format("missing list '{}'", k));
      const auto n = j["labels"].size();
      if (j["boxes"].size() != n || j["features"].size() != n || j["scores"].size() != n)
        bad(role, "boxes/features/labels/scores lengths differ");
      for (std::size_t i = 0; i < n; ++i) {
        const auto& b = j["boxes"][i];
        if (!b.is_array() || b.size() != 4) bad(role, "box is not [x1,y1,x2,y2]");
        for (const auto& v : b)
          if (!v.is_number()) bad(role, "non-numeric box coordinate");
        const auto& f = j["features"][i];
        if (!f.is_array() || f.size() != static_cast<std::size_t>(kObjectFeatureDim))
          bad(role, fmt::format("feature dim must be {}", kObjectFeatureDim));
        for (const auto& v : f)
          if (!v.is_number() || !std::isfinite(v.get<double>())) bad(role, "non-finite feature entry");
        if (!j["labels"][i].is_string()) bad(role, "non-string label");
        if (!j["scores"][i].is_number()) bad(role, "non-numeric score");
      }
      return;
    }
  }
}

}  // namespace adlforge::backends
