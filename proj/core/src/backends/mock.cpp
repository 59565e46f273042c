#include "adlforge/backends/mock.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>

#include <fmt/format.h>

#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/rng.hpp"

namespace adlforge::backends {

using nlohmann::json;

std::string request_digest(const BackendRequest& req) { return sha256_hex(req.canonical_text()); }

namespace {

std::string wrap_text(Role role, const std::string& text) {
  switch (role) {
    case Role::caption: return json{{"caption", text}}.dump();
    case Role::chat: return json{{"content", text}}.dump();
    case Role::detect: return json{{"objects", json::array({text})}}.dump();
    case Role::localize: break;
  }
  throw PreconditionError("text replies are not valid for localize fixtures; use 'body'");
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string between(const std::string& text, std::string_view start, std::string_view end) {
  const auto a = text.find(start);
  if (a == std::string::npos) return {};
  const auto b = text.find(end, a + start.size());
  return text.substr(a + start.size(), b == std::string::npos ? std::string::npos : b - a - start.size());
}

std::uint64_t media_seed(const BackendRequest& req) {
  const auto h = req.media_hash();
  return fnv1a64(h.empty() ? req.canonical_text() : h);
}

// --- captioner --------------------------------------------------------------

std::string gen_caption(const BackendRequest& req) {
  static constexpr std::array<const char*, 5> kRooms = {"white", "beige", "light blue", "grey", "yellow"};
  static constexpr std::array<const char*, 5> kPoses = {"stands upright", "leans slightly forward",
                                                        "moves one arm", "turns toward the camera",
                                                        "shifts weight to one leg"};
  static constexpr std::array<const char*, 5> kObjects = {"table", "chair", "cup", "sofa", "shelf"};
  const auto s = media_seed(req);
  const auto prompt = req.payload.value("prompt", "");
  if (prompt.find("Summarize") != std::string::npos)
    return fmt::format("An indoor scene with a person near a {} against a {} wall.", kObjects[(s >> 8) % 5],
                       kRooms[s % 5]);
  if (prompt.find("video clip") != std::string::npos)
    return fmt::format("The person {} in a {} room and then {}.", kPoses[s % 5], kRooms[(s >> 4) % 5],
                       kPoses[(s >> 12) % 5]);
  return fmt::format("A person {} in a {} room beside a {}.", kPoses[(s >> 16) % 5], kRooms[s % 5],
                     kObjects[(s >> 8) % 5]);
}

std::string gen_caption_frame_echo(const BackendRequest& req) {
  return fmt::format("frame:{}", req.payload.value("frame_index", -1));
}

// --- detector / localizer ---------------------------------------------------

constexpr std::array<const char*, 12> kSceneObjects = {"table", "chair", "bottle", "cup",  "book", "phone",
                                                       "plant", "bag",   "sofa",   "lamp", "shoe", "glasses"};

json gen_detect(const BackendRequest& req) {
  json objects = json::array();
  for (std::size_t i = 0; i < req.media.size(); ++i) {
    const auto s = fnv1a64(sha256_hex(req.media[i].bytes));
    const int k = 2 + static_cast<int>(s % 3);
    for (int j = 0; j < k; ++j) {
      std::string name = kSceneObjects[(s >> (8 * j + 4)) % kSceneObjects.size()];
      if ((s >> (40 + j)) & 1) name[0] = static_cast<char>(std::toupper(name[0]));
      objects.push_back(name);
    }
  }
  return json{{"objects", objects}};
}

json gen_localize(const BackendRequest& req) {
  const auto jitter_seed = media_seed(req);
  json boxes = json::array(), features = json::array(), labels = json::array(), scores = json::array();
  auto emit = [&](const std::string& label, double score, std::uint64_t seed) {
    const auto h = fnv1a64(label);
    Rng jit(seed);
    const double w = 40 + static_cast<double>(h % 80), ht = 40 + static_cast<double>((h >> 8) % 120);
    const double x1 = 16 + static_cast<double>((h >> 16) % 360) + jit.uniform_int(-4, 4);
    const double y1 = 16 + static_cast<double>((h >> 32) % 300) + jit.uniform_int(-4, 4);
    boxes.push_back({x1, y1, std::min(511.0, x1 + w), std::min(511.0, y1 + ht)});
    Rng base(h);
    json f = json::array();
    for (int d = 0; d < kObjectFeatureDim; ++d)
      f.push_back(static_cast<float>(base.normal(0, 1) + 0.05 * jit.normal(0, 1)));
    features.push_back(std::move(f));
    labels.push_back(label);
    scores.push_back(score);
  };
  const auto wanted = req.payload.value("labels", std::vector<std::string>{});
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    const auto h = fnv1a64(wanted[i]);
    emit(wanted[i], 0.5 + static_cast<double>(h % 40) / 100.0, jitter_seed + i);
    // A weak duplicate below any sensible confidence floor.
    if (i == 0) emit(wanted[i], 0.05, jitter_seed + 1000);
  }
  return json{{"boxes", boxes}, {"features", features}, {"labels", labels}, {"scores", scores}};
}

// --- chat -------------------------------------------------------------------

struct JointFirstLast {
  std::pair<int, int> first{}, last{};
  bool seen = false;
};

std::map<std::string, JointFirstLast> parse_joint_extremes(const std::string& text) {
  static const std::regex re(R"(the (right knee|left knee|right hand|left hand|head) is at \((-?\d+), (-?\d+)\))");
  std::map<std::string, JointFirstLast> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    auto& j = out[(*it)[1].str()];
    const std::pair<int, int> p{std::stoi((*it)[2].str()), std::stoi((*it)[3].str())};
    if (!j.seen) j.first = p;
    j.last = p;
    j.seen = true;
  }
  return out;
}

std::string describe_motion(const std::pair<int, int>& a, const std::pair<int, int>& b) {
  const int dx = b.first - a.first, dy = b.second - a.second;
  const double mag = std::hypot(dx, dy);
  std::string dir;
  if (mag < 3) return "stays almost still. The amount of motion is negligible.";
  if (std::abs(dy) >= std::abs(dx))
    dir = dy < 0 ? "moves upward" : "moves downward";
  else
    dir = dx < 0 ? "moves to the left" : "moves to the right";
  return fmt::format("{} over the video. The amount of motion is {}.", dir,
                     mag < 20 ? "small" : (mag < 60 ? "moderate" : "large"));
}

std::string gen_joint_motion(const std::string& text) {
  const auto ex = parse_joint_extremes(text);
  std::string out;
  for (const char* name : {"head", "right hand", "left hand", "right knee", "left knee"}) {
    std::string cap = name;
    cap[0] = static_cast<char>(std::toupper(cap[0]));
    const auto it = ex.find(name);
    out += fmt::format("{}: {} ", cap, it == ex.end() ? "is not observed." : describe_motion(it->second.first, it->second.last));
  }
  out += "The person keeps an upright posture with the head above the hands and the knees below the hips.";
  return out;
}

std::string gen_pose_description(const std::string& text) {
  const auto action = between(text, "performs the action(s) \"", "\"");
  const auto ex = parse_joint_extremes(text);
  int moving = 0;
  for (const auto& [name, j] : ex)
    if (std::hypot(j.last.first - j.first.first, j.last.second - j.first.second) >= 3) ++moving;
  return fmt::format(
      "While performing {}, the person keeps the torso mostly upright and the head above the body. "
      "{} of the five tracked joints change position noticeably, with the hands moving more than the knees.",
      action.empty() ? "the actions" : action, moving);
}

std::string gen_pose_qa(const std::string& text) {
  const auto desc = between(text, "joint motion of a person in a video: ", ". Using only this description");
  json items = json::array();
  items.push_back({{"Q", "What is the motion of the body and joints relative to the actions?"},
                   {"A", fmt::format("Based on the pose, {}", desc)}});
  items.push_back({{"Q", "Which joints are moving in the video?"},
                   {"A", "The hands move the most, the head moves a little and the knees stay mostly in place."}});
  return items.dump();
}

std::string gen_dense(const std::string& text) {
  const auto actions = between(text, "Actions performed in order: ", ". Please generate");
  const auto frame_pos = text.find("In frame ");
  const auto first_caption =
      frame_pos == std::string::npos ? std::string() : between(text.substr(frame_pos), ": ", "\n");
  const std::string answer = fmt::format(
      "In this video a person is seen in an indoor room. {} The person performs the following actions in "
      "order: {}. The background stays the same throughout the video and the person remains the focus.",
      first_caption, actions.empty() ? "several everyday activities" : actions);
  // Python-literal style on purpose: the parser must normalize it.
  std::string escaped;
  for (char c : answer) escaped += c == '\'' ? std::string("\\'") : std::string(1, c);
  return fmt::format("{{'Q': 'Can you describe the video in detail?', 'A': '{}'}}", escaped);
}

std::string gen_qa_summary(const std::string& text) {
  const auto caption = between(text, "The video caption is: ", ". The additional dense caption is:");
  json items = json::array();
  items.push_back({{"Q", "Can you provide a summary of the video?"}, {"A", caption}});
  items.push_back({{"Q", "What are the main events in the video?"},
                   {"A", fmt::format("The main events are the following. {}", caption)}});
  items.push_back({{"Q", "Could you briefly describe the video content?"},
                   {"A", fmt::format("Briefly, {}", caption)}});
  return "Here are the questions:\n```json\n" + items.dump(2) + "\n```";
}

std::string gen_qa_detail(const std::string& text) {
  const auto caption = between(text, "The video caption is: ", ". The additional dense caption is:");
  const auto actions = between(caption, "following actions in order: ", ". ");
  json items = json::array();
  items.push_back({{"Q", "What are the actions occurring sequentially in the video?"},
                   {"A", fmt::format("The person performs, in order: {}.", actions.empty() ? "several actions" : actions)}});
  items.push_back({{"Q", "What are the objects in the scene?"},
                   {"A", "The scene contains household furniture such as a table and a chair."}});
  items.push_back({{"Q", "What is the person doing?"}, {"A", caption}});
  return items.dump();
}

std::string gen_relevance(const std::string& text) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> kTable = {
      {"drink", {"bottle", "cup", "glass"}}, {"eat", {"bowl", "plate", "cup"}},
      {"read", {"book"}},                    {"writ", {"book", "pen", "paper"}},
      {"phone", {"phone"}},                  {"typing", {"keyboard", "laptop"}},
      {"sit", {"chair", "sofa"}},            {"stand", {"chair", "sofa"}},
      {"shoe", {"shoe"}},                    {"glasses", {"glasses"}},
      {"bag", {"bag"}},                      {"hat", {"hat"}},
  };
  const auto action = lower(between(text, "the action \"", "\""));
  const auto found_text = between(text, "the objects I found are: ", ". I only want");
  std::vector<std::string> found;
  for (std::size_t pos = 0; pos <= found_text.size();) {
    auto next = found_text.find(',', pos);
    if (next == std::string::npos) next = found_text.size();
    auto item = found_text.substr(pos, next - pos);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) found.push_back(item);
    pos = next + 1;
  }
  if (found.empty()) return "None";
  std::vector<std::string> picked;
  for (const auto& [key, objs] : kTable) {
    if (action.find(key) == std::string::npos) continue;
    for (const auto& o : objs)
      if (std::find(found.begin(), found.end(), o) != found.end() &&
          std::find(picked.begin(), picked.end(), o) == picked.end())
        picked.push_back(o);
  }
  if (picked.empty()) picked.push_back(found.front());
  std::string out;
  for (const auto& p : picked) out += (out.empty() ? "" : ", ") + p;
  return out;
}

std::string gen_sequences(const std::string& text) {
  const auto list = between(text, "activities of daily living: ", ". Combine");
  std::vector<int> ids;
  static const std::regex num_re(R"((?:^|, )(\d+)\. )");
  for (auto it = std::sregex_iterator(list.begin(), list.end(), num_re); it != std::sregex_iterator(); ++it)
    ids.push_back(std::stoi((*it)[1].str()));
  const int count = std::stoi("0" + between(text, "activities into ", " different"));
  const int lo = std::stoi("0" + between(text, "must contain between ", " and "));
  const int hi = std::stoi("0" + between(text, std::string("between ") + std::to_string(lo) + " and ", " activities"));
  if (ids.empty() || count <= 0 || lo <= 0 || hi < lo) return "I cannot do that.";
  Rng rng(fnv1a64(text));
  json out = json::array();
  for (int s = 0; s < count; ++s) {
    const int len = rng.uniform_int(lo, hi);
    json seq = json::array();
    int prev = -1;
    for (int k = 0; k < len; ++k) {
      int id;
      do {
        id = ids[rng.uniform_index(ids.size())];
      } while (id == prev && ids.size() > 1);
      seq.push_back(id);
      prev = id;
    }
    out.push_back(std::move(seq));
  }
  return out.dump();
}

std::string gen_judge(const std::string& text) {
  return std::to_string(3 + fnv1a64(text) % 3);
}

std::string gen_chat(const BackendRequest& req) {
  std::string user_text;
  for (const auto& m : req.payload.value("messages", json::array()))
    if (m.value("role", "") == "user") {
      user_text = m.value("content", "");
      break;
    }
  const auto has = [&](std::string_view s) { return user_text.find(s) != std::string::npos; };
  if (has("Score (1-5):")) return gen_judge(user_text);
  if (has("Combine these activities into")) return gen_sequences(user_text);
  if (has("I only want the objects that are relevant to the action")) return gen_relevance(user_text);
  if (has("answer the following two questions")) return gen_pose_qa(user_text);
  if (has("Write a general description of the pose")) return gen_pose_description(user_text);
  if (has("I want to know the general motion of these joints")) return gen_joint_motion(user_text);
  if (has("Generate three different questions on summarizing")) return gen_qa_summary(user_text);
  if (has("Generate three different questions on the details")) return gen_qa_detail(user_text);
  if (has("The fragmented video description is:")) return gen_dense(user_text);
  throw FixtureMissError(fmt::format("synthetic chat generator has no responder for prompt: {}",
                                     user_text.substr(0, 160)));
}

std::string run_generator(const std::string& name, const BackendRequest& req) {
  if (name == "synthetic") {
    switch (req.role) {
      case Role::caption: return wrap_text(req.role, gen_caption(req));
      case Role::detect: return gen_detect(req).dump();
      case Role::localize: return gen_localize(req).dump();
      case Role::chat: return wrap_text(req.role, gen_chat(req));
    }
  }
  if (name == "caption_frame_echo") return wrap_text(Role::caption, gen_caption_frame_echo(req));
  if (name == "judge_constant_5") return wrap_text(Role::chat, "5");
  throw PreconditionError(fmt::format("unknown mock generator '{}'", name));
}

}  // namespace

std::vector<std::string> builtin_generator_names() {
  return {"synthetic", "caption_frame_echo", "judge_constant_5"};
}

FixtureTable FixtureTable::from_json(const json& j) {
  const json& list = j.is_array() ? j : j.at("fixtures");
  FixtureTable t;
  for (const auto& e : list) {
    Fixture f;
    if (e.contains("role")) f.role = role_from_string(e.at("role").get<std::string>());
    if (e.contains("contains")) {
      if (e["contains"].is_string())
        f.contains.push_back(e["contains"].get<std::string>());
      else
        f.contains = e["contains"].get<std::vector<std::string>>();
    }
    if (e.contains("reply")) f.reply = e["reply"].get<std::string>();
    if (e.contains("body")) f.body = e["body"];
    f.echo = e.value("echo", false);
    f.generator = e.value("generator", "");
    if (!f.generator.empty()) {
      const auto names = builtin_generator_names();
      if (std::find(names.begin(), names.end(), f.generator) == names.end())
        throw PreconditionError(fmt::format("unknown mock generator '{}'", f.generator));
    }
    if (!f.reply && !f.body && !f.echo && f.generator.empty())
      throw PreconditionError("fixture needs one of reply, body, echo, generator");
    t.add(std::move(f));
  }
  return t;
}

FixtureTable FixtureTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(fmt::format("cannot open fixture table {}", path.string()));
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw PreconditionError(fmt::format("invalid fixture table {}: {}", path.string(), e.what()));
  }
}

FixtureTable FixtureTable::synthetic() {
  FixtureTable t;
  Fixture f;
  f.generator = "synthetic";
  t.add(std::move(f));
  return t;
}

FixtureTable& FixtureTable::add(Fixture f) {
  fixtures_.push_back(std::move(f));
  return *this;
}

const Fixture* FixtureTable::match(const BackendRequest& req) const {
  std::string text;
  bool have_text = false;
  for (const auto& f : fixtures_) {
    if (f.role && *f.role != req.role) continue;
    if (!f.contains.empty() && !have_text) {
      text = req.match_text();
      have_text = true;
    }
    const bool all = std::all_of(f.contains.begin(), f.contains.end(),
                                 [&](const std::string& s) { return text.find(s) != std::string::npos; });
    if (all) return &f;
  }
  return nullptr;
}

std::string MockTransport::send(const BackendRequest& req) {
  const Fixture* f = table_.match(req);
  if (!f)
    throw FixtureMissError(fmt::format("no fixture matches {} request {} ({})", to_string(req.role),
                                       req.cache_key().substr(0, 16), req.match_text().substr(0, 160)));
  if (f->custom) return f->custom(req);
  if (f->reply) return wrap_text(req.role, *f->reply);
  if (f->body) return f->body->dump();
  if (f->echo) return wrap_text(req.role, request_digest(req));
  return run_generator(f->generator, req);
}

std::shared_ptr<Transport> mock_backend(FixtureTable table) {
  return std::make_shared<MockTransport>(std::move(table));
}

}  // namespace adlforge::backends
