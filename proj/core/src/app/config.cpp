#include "adlforge/app/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include <fmt/format.h>

#include "adlforge/model/error.hpp"

namespace adlforge::app {

using nlohmann::json;

namespace {

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<json(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw PreconditionError(fmt::format("config {}: '{}' is not a valid number", key, text));
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  auto s = trim(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw PreconditionError(fmt::format("config {}: '{}' is not a boolean", key, text));
}

template <typename T>
Field num(T RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = parse_number<T>("", v); },
          [m](const RunConfig& c) { return json(c.*m); }};
}
Field str(std::string RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = trim(v); }, [m](const RunConfig& c) { return json(c.*m); }};
}
Field flag(bool RunConfig::*m) {
  return {[m](RunConfig& c, const std::string& v) { c.*m = parse_bool("", v); },
          [m](const RunConfig& c) { return json(c.*m); }};
}
Field role_map(std::map<backends::Role, std::string> RunConfig::*m, backends::Role r) {
  return {[m, r](RunConfig& c, const std::string& v) {
            if (trim(v).empty())
              (c.*m).erase(r);
            else
              (c.*m)[r] = trim(v);
          },
          [m, r](const RunConfig& c) {
            const auto it = (c.*m).find(r);
            return it == (c.*m).end() ? json("") : json(it->second);
          }};
}

const std::map<std::string, Field>& fields() {
  using backends::Role;
  static const std::map<std::string, Field> f = {
      {"run.seed", num(&RunConfig::seed)},
      {"run.workers", num(&RunConfig::workers)},
      {"run.corpus", str(&RunConfig::corpus)},
      {"run.out", str(&RunConfig::out)},
      {"run.cache_dir", str(&RunConfig::cache_dir)},
      {"run.mock_backends", flag(&RunConfig::mock_backends)},
      {"run.fixtures", str(&RunConfig::fixtures)},
      {"run.prompts_dir", str(&RunConfig::prompts_dir)},
      {"backends.caption_url", role_map(&RunConfig::urls, Role::caption)},
      {"backends.detect_url", role_map(&RunConfig::urls, Role::detect)},
      {"backends.localize_url", role_map(&RunConfig::urls, Role::localize)},
      {"backends.chat_url", role_map(&RunConfig::urls, Role::chat)},
      {"backends.caption_model", role_map(&RunConfig::models, Role::caption)},
      {"backends.detect_model", role_map(&RunConfig::models, Role::detect)},
      {"backends.localize_model", role_map(&RunConfig::models, Role::localize)},
      {"backends.chat_model", role_map(&RunConfig::models, Role::chat)},
      {"backends.timeout_ms", num(&RunConfig::timeout_ms)},
      {"backends.max_retries", num(&RunConfig::max_retries)},
      {"backends.backoff_ms", num(&RunConfig::backoff_ms)},
      {"backends.rate_per_minute", num(&RunConfig::rate_per_minute)},
      {"synth.subjects", num(&RunConfig::synth_subjects)},
      {"synth.cameras", num(&RunConfig::synth_cameras)},
      {"synth.clips_per_action", num(&RunConfig::synth_clips_per_action)},
      {"synth.min_frames", num(&RunConfig::synth_min_frames)},
      {"synth.max_frames", num(&RunConfig::synth_max_frames)},
      {"synth.fps", num(&RunConfig::synth_fps)},
      {"curation.margin_frac", num(&RunConfig::margin_frac)},
      {"curation.min_box", num(&RunConfig::min_box)},
      {"curation.crop_mode", str(&RunConfig::crop_mode)},
      {"curation.out_size", num(&RunConfig::out_size)},
      {"curation.sequence_count", num(&RunConfig::sequence_count)},
      {"curation.min_len", num(&RunConfig::min_len)},
      {"curation.max_len", num(&RunConfig::max_len)},
      {"curation.sequence_generator", str(&RunConfig::sequence_generator)},
      {"curation.target_videos", num(&RunConfig::target_videos)},
      {"annotate.target_fps", num(&RunConfig::target_fps)},
      {"objects.min_sim", num(&RunConfig::min_sim)},
      {"objects.exclusive", flag(&RunConfig::exclusive)},
      {"objects.confidence_floor", num(&RunConfig::confidence_floor)},
      {"eval.k", num(&RunConfig::k)},
      {"eval.clip_seconds", num(&RunConfig::clip_seconds)},
  };
  return f;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : fields()) out.push_back(name);
    return out;
  }();
  return k;
}

std::string RunConfig::env_name(const std::string& key) {
  std::string out = "ADLFORGE_";
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw PreconditionError(fmt::format("unknown config key '{}'", key));
  try {
    it->second.set(*this, value);
  } catch (const PreconditionError&) {
    throw PreconditionError(fmt::format("config {}: invalid value '{}'", key, value));
  }
}

std::vector<std::string> RunConfig::apply_env(const std::function<const char*(const char*)>& getenv) {
  std::vector<std::string> applied;
  for (const auto& key : keys()) {
    const auto name = env_name(key);
    const char* v = getenv ? getenv(name.c_str()) : std::getenv(name.c_str());
    if (!v) continue;
    set(key, v);
    applied.push_back(key);
  }
  return applied;
}

void RunConfig::validate() const {
  auto need = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw PreconditionError(fmt::format("config {}: {}", key, what));
  };
  need(workers >= 1, "run.workers", "must be >= 1");
  need(!out.empty(), "run.out", "must not be empty");
  need(timeout_ms > 0, "backends.timeout_ms", "must be > 0");
  need(max_retries >= 1, "backends.max_retries", "must be >= 1");
  need(backoff_ms >= 0, "backends.backoff_ms", "must be >= 0");
  need(rate_per_minute >= 0, "backends.rate_per_minute", "must be >= 0");
  need(synth_subjects >= 1 && synth_cameras >= 1 && synth_clips_per_action >= 1, "synth", "counts must be >= 1");
  need(synth_min_frames >= 1 && synth_min_frames <= synth_max_frames, "synth.min_frames",
       "must be in [1, synth.max_frames]");
  need(synth_fps > 0, "synth.fps", "must be > 0");
  need(margin_frac >= 0 && margin_frac <= 1, "curation.margin_frac", "must be in [0, 1]");
  need(min_box >= 1, "curation.min_box", "must be >= 1");
  need(crop_mode == "per_video_union" || crop_mode == "per_frame", "curation.crop_mode",
       "must be per_video_union or per_frame");
  need(out_size >= 16, "curation.out_size", "must be >= 16");
  need(sequence_count >= 1, "curation.sequence_count", "must be >= 1");
  need(min_len >= 2 && min_len <= max_len, "curation.min_len", "must satisfy 2 <= min_len <= max_len");
  need(sequence_generator == "sampler" || sequence_generator == "llm", "curation.sequence_generator",
       "must be sampler or llm");
  need(target_videos >= 1, "curation.target_videos", "must be >= 1");
  need(target_fps > 0, "annotate.target_fps", "must be > 0");
  need(min_sim >= -1 && min_sim <= 1, "objects.min_sim", "must be in [-1, 1]");
  need(confidence_floor >= 0 && confidence_floor <= 1, "objects.confidence_floor", "must be in [0, 1]");
  need(k >= 2, "eval.k", "must be >= 2");
  need(clip_seconds > 0, "eval.clip_seconds", "must be > 0");
}

json RunConfig::snapshot() const {
  json j = json::object();
  for (const auto& [key, f] : fields()) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = f.get(*this);
  }
  return j;
}

std::filesystem::path RunConfig::cache_path() const {
  if (!cache_dir.empty()) return cache_dir;
  return std::filesystem::path(out).string() + ".cache";
}

}  // namespace adlforge::app
