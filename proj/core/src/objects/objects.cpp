#include "adlforge/objects/objects.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/curation/codec.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/manifest.hpp"

namespace adlforge::objects {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> uniform_sample_indices(int num_frames, int count) {
  if (num_frames < 1 || count < 1) throw PreconditionError("uniform sampling needs num_frames >= 1 and count >= 1");
  std::vector<int> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.push_back(static_cast<int>(static_cast<long long>(k) * num_frames / count));
  return out;
}

namespace {

std::string casefold(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n\"'.`*-");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n\"'.`*");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<std::string> merge_detections(const std::vector<std::vector<std::string>>& per_frame) {
  std::vector<std::string> out;
  for (const auto& frame : per_frame)
    for (const auto& name : frame) {
      auto key = casefold(trim(name));
      if (!key.empty() && std::find(out.begin(), out.end(), key) == out.end()) out.push_back(std::move(key));
    }
  return out;
}

namespace {

std::vector<backends::EncodedImage> encode_all(const std::vector<cv::Mat>& frames, int quality) {
  std::vector<backends::EncodedImage> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(curation::encode_jpeg(f, quality));
  return out;
}

}  // namespace

std::vector<std::string> detect_objects(const std::vector<cv::Mat>& frames, backends::BackendClient& detector,
                                        int jpeg_quality) {
  return detect_objects(encode_all(frames, jpeg_quality), detector);
}

std::vector<std::string> detect_objects(const std::vector<backends::EncodedImage>& frames,
                                        backends::BackendClient& detector) {
  std::vector<std::vector<std::string>> per_frame;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      per_frame.push_back(detector.detect({frames[i]}));
    } catch (const backends::BackendError& e) {
      spdlog::warn("detection failed on sampled frame {}: {}", i, e.what());
      ++failures;
    }
  }
  if (!frames.empty() && failures == frames.size())
    throw Error(fmt::format("object detection failed on all {} sampled frames", frames.size()));
  return merge_detections(per_frame);
}

RelevanceResult parse_relevance_reply(const std::string& reply, const std::vector<std::string>& found) {
  RelevanceResult out;
  const auto whole = casefold(trim(reply));
  if (whole == "none" || whole.empty()) return out;
  std::size_t pos = 0;
  while (pos <= reply.size()) {
    auto next = reply.find_first_of(",\n", pos);
    if (next == std::string::npos) next = reply.size();
    const auto name = trim(reply.substr(pos, next - pos));
    pos = next + 1;
    if (name.empty()) continue;
    const auto key = casefold(name);
    if (key == "none") continue;
    auto it = std::find_if(found.begin(), found.end(), [&](const std::string& f) { return casefold(f) == key; });
    if (it == found.end()) {
      out.dropped.push_back(name);
      continue;
    }
    if (std::find(out.relevant.begin(), out.relevant.end(), *it) == out.relevant.end()) out.relevant.push_back(*it);
  }
  return out;
}

RelevanceResult filter_relevant(const std::string& action_label, const std::vector<std::string>& found,
                                backends::BackendClient& chat, const annotate::PromptLibrary& prompts,
                                const annotate::RetryPolicy& policy) {
  if (found.empty()) return {};
  std::string listed;
  for (const auto& f : found) listed += (listed.empty() ? "" : ", ") + f;
  const auto reply = annotate::chat_structured_text(
      chat, {{"user", prompts.relevant_objects(action_label, listed)}},
      [](const std::string& r) {
        if (r.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError("empty relevance reply", r);
      },
      policy);
  auto result = parse_relevance_reply(reply, found);
  for (const auto& d : result.dropped)
    spdlog::warn("relevance filter for \"{}\": dropped \"{}\" (not among detected objects)", action_label, d);
  return result;
}

void ObjectTrackSet::validate() const {
  const auto where = fmt::format("{}/{}", video_id, clip_id);
  const int nn = n();
  const int t_count = static_cast<int>(frames.size());
  if (static_cast<int>(boxes.size()) != t_count) throw ValidationError(where + ": boxes/frames length mismatch");
  for (const auto& row : boxes) {
    if (static_cast<int>(row.size()) != nn) throw ValidationError(where + ": box row has wrong object count");
    for (const auto& b : row)
      if (b && !((*b)[0] < (*b)[2] && (*b)[1] < (*b)[3] && (*b)[0] >= 0 && (*b)[1] >= 0))
        throw ValidationError(fmt::format("{}: invalid box {}", where, format_box(*b)));
  }
  if (features.rows() != t_count * nn)
    throw ValidationError(fmt::format("{}: {} feature rows, expected {}", where, features.rows(), t_count * nn));
  if (!links.empty()) {
    if (static_cast<int>(links.size()) != std::max(0, t_count - 1)) throw ValidationError(where + ": link rows");
    for (std::size_t t = 0; t < links.size(); ++t) {
      if (static_cast<int>(links[t].size()) != nn) throw ValidationError(where + ": link row width");
      for (const auto& l : links[t])
        if (l && (*l < 0 || *l >= nn || !boxes[t + 1][*l]))
          throw ValidationError(fmt::format("{}: link target {} invalid at transition {}", where, *l, t));
    }
  }
}

ObjectTrackSet localize_and_embed(const std::string& video_id, const std::string& clip_id,
                                  const std::vector<int>& frame_indices, const std::vector<cv::Mat>& frames,
                                  const std::vector<std::string>& labels, backends::BackendClient& localizer,
                                  const LocalizeOptions& opt) {
  if (frames.empty()) throw PreconditionError("localization needs at least one frame");
  for (const auto& f : frames)
    if (f.size() != frames.front().size()) throw PreconditionError("sampled frames differ in size");
  return localize_and_embed(video_id, clip_id, frame_indices, encode_all(frames, opt.jpeg_quality),
                            frames.front().size(), labels, localizer, opt);
}

ObjectTrackSet localize_and_embed(const std::string& video_id, const std::string& clip_id,
                                  const std::vector<int>& frame_indices,
                                  const std::vector<backends::EncodedImage>& frames, cv::Size frame_size,
                                  const std::vector<std::string>& labels, backends::BackendClient& localizer,
                                  const LocalizeOptions& opt) {
  if (labels.empty()) throw PreconditionError("localization needs at least one label");
  if (frame_indices.size() != frames.size()) throw PreconditionError("frame/index count mismatch");
  ObjectTrackSet set;
  set.video_id = video_id;
  set.clip_id = clip_id;
  set.labels = labels;
  set.frames = frame_indices;
  const int n = static_cast<int>(labels.size());
  const int t_count = static_cast<int>(frames.size());
  set.features = FeatureMatrix(t_count * n, kObjectFeatureDim, {kProducerObject, opt.model_id, video_id + "/" + clip_id});
  set.boxes.assign(t_count, std::vector<std::optional<Box>>(n));
  int present = 0;
  for (int t = 0; t < t_count; ++t) {
    const auto dets = localizer.localize(frames[t], labels);
    const double w = frame_size.width, h = frame_size.height;
    for (int i = 0; i < n; ++i) {
      const backends::LocalizedBox* best = nullptr;
      for (const auto& d : dets)
        if (casefold(d.label) == casefold(labels[i]) && d.score >= opt.confidence_floor &&
            (!best || d.score > best->score))
          best = &d;
      if (!best) continue;
      Box b = best->box;
      b[0] = std::clamp(b[0], 0.0, w);
      b[2] = std::clamp(b[2], 0.0, w);
      b[1] = std::clamp(b[1], 0.0, h);
      b[3] = std::clamp(b[3], 0.0, h);
      if (!(b[0] < b[2] && b[1] < b[3])) continue;
      double norm = 0;
      for (float v : best->feature) norm += static_cast<double>(v) * v;
      norm = std::sqrt(norm);
      if (!(norm > 0) || static_cast<int>(best->feature.size()) != kObjectFeatureDim) continue;
      set.boxes[t][i] = b;
      auto row = set.features.row(t * n + i);
      for (int d = 0; d < kObjectFeatureDim; ++d) row[d] = static_cast<float>(best->feature[d] / norm);
      ++present;
    }
  }
  if (present == 0) throw PreconditionError(fmt::format("{}/{}: objects not localizable", video_id, clip_id));
  return set;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += static_cast<double>(a[k]) * b[k];
    na += static_cast<double>(a[k]) * a[k];
    nb += static_cast<double>(b[k]) * b[k];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Links track_features(std::span<const float> data, int dim, int frames, int n,
                     const std::vector<std::vector<bool>>& present, const TrackOptions& opt) {
  if (static_cast<long long>(data.size()) != static_cast<long long>(frames) * n * dim)
    throw PreconditionError("feature data does not match frames x objects x dim");
  auto row = [&](int t, int i) { return data.subspan(static_cast<std::size_t>(t * n + i) * dim, dim); };
  Links links(std::max(0, frames - 1), std::vector<std::optional<int>>(n));
  for (int t = 0; t + 1 < frames; ++t) {
    if (opt.exclusive) {
      struct Cand {
        double sim;
        int i, j;
      };
      std::vector<Cand> cands;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (present[t][i] && present[t + 1][j]) {
            const double s = cosine(row(t, i), row(t + 1, j));
            if (s >= opt.min_sim) cands.push_back({s, i, j});
          }
      std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
      });
      std::vector<bool> used_i(n), used_j(n);
      for (const auto& c : cands)
        if (!used_i[c.i] && !used_j[c.j]) {
          links[t][c.i] = c.j;
          used_i[c.i] = used_j[c.j] = true;
        }
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (!present[t][i]) continue;
      int best = -1;
      double best_sim = 0;
      for (int j = 0; j < n; ++j) {
        if (!present[t + 1][j]) continue;
        const double s = cosine(row(t, i), row(t + 1, j));
        if (best < 0 || s > best_sim) {
          best = j;
          best_sim = s;
        }
      }
      if (best >= 0 && best_sim >= opt.min_sim) links[t][i] = best;
    }
  }
  return links;
}

void track_by_similarity(ObjectTrackSet& set, const TrackOptions& opt) {
  const int t_count = static_cast<int>(set.frames.size());
  std::vector<std::vector<bool>> present(t_count, std::vector<bool>(set.n()));
  int frames_with_objects = 0;
  for (int t = 0; t < t_count; ++t) {
    bool any = false;
    for (int i = 0; i < set.n(); ++i) any = (present[t][i] = set.present(t, i)) || any;
    frames_with_objects += any;
  }
  if (frames_with_objects < 2)
    spdlog::warn("{}/{}: fewer than two frames with objects; no links", set.video_id, set.clip_id);
  set.links = track_features(set.features.data(), set.features.dim(), t_count, set.n(), present, opt);
}

std::string object_context(const std::vector<std::string>& labels) {
  std::string joined;
  for (const auto& l : labels) joined += (joined.empty() ? "" : ", ") + l;
  return "The relevant objects in the video are: " + joined;
}

std::string format_box(const Box& b) {
  return fmt::format("[{},{},{},{}]", std::lround(b[0]), std::lround(b[1]), std::lround(b[2]), std::lround(b[3]));
}

ObjectCues object_qa_and_context(const std::string& video_id, const std::vector<const ObjectTrackSet*>& sets) {
  std::vector<std::string> labels;
  for (const auto* s : sets)
    for (const auto& l : s->labels)
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  if (labels.empty()) throw PreconditionError(fmt::format("{}: no relevant objects", video_id));

  // First present box of the most relevant object.
  std::optional<Box> quoted;
  std::string quoted_label;
  for (const auto& label : labels) {
    for (const auto* s : sets) {
      const auto it = std::find(s->labels.begin(), s->labels.end(), label);
      if (it == s->labels.end()) continue;
      const int i = static_cast<int>(it - s->labels.begin());
      for (std::size_t t = 0; t < s->boxes.size() && !quoted; ++t)
        if (s->boxes[t][i]) quoted = s->boxes[t][i];
      if (quoted) break;
    }
    if (quoted) {
      quoted_label = label;
      break;
    }
  }
  ObjectCues out;
  out.context = object_context(labels);
  std::string joined;
  for (const auto& l : labels) joined += (joined.empty() ? "" : ", ") + l;
  out.qa.push_back({video_id, "What are the relevant objects in the scene?", joined, QaType::object_qa,
                    QaSource::template_, std::nullopt});
  if (quoted)
    out.qa.push_back({video_id, fmt::format("What is the object in the trajectory {}?", format_box(*quoted)),
                      quoted_label, QaType::object_qa, QaSource::template_, std::nullopt});
  else
    spdlog::warn("{}: no localized box to quote; trajectory question skipped", video_id);
  return out;
}

ObjectCues object_qa_and_context(const ObjectTrackSet& set) { return object_qa_and_context(set.video_id, {&set}); }

json track_to_json(const ObjectTrackSet& set) {
  json boxes = json::array();
  for (const auto& row : set.boxes) {
    json r = json::array();
    for (const auto& b : row) r.push_back(b ? json(*b) : json(nullptr));
    boxes.push_back(std::move(r));
  }
  json links = json::array();
  for (const auto& row : set.links) {
    json r = json::array();
    for (const auto& l : row) r.push_back(l ? json(*l) : json(nullptr));
    links.push_back(std::move(r));
  }
  return {{"video_id", set.video_id}, {"clip_id", set.clip_id}, {"labels", set.labels},
          {"frames", set.frames},     {"boxes", std::move(boxes)}, {"links", std::move(links)},
          {"features", set.clip_id + ".features"}};
}

ObjectTrackSet track_from_json(const json& j) {
  try {
    ObjectTrackSet s;
    s.video_id = j.at("video_id").get<std::string>();
    s.clip_id = j.at("clip_id").get<std::string>();
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.frames = j.at("frames").get<std::vector<int>>();
    for (const auto& row : j.at("boxes")) {
      std::vector<std::optional<Box>> r;
      for (const auto& b : row) r.push_back(b.is_null() ? std::nullopt : std::optional<Box>(b.get<Box>()));
      s.boxes.push_back(std::move(r));
    }
    for (const auto& row : j.at("links")) {
      std::vector<std::optional<int>> r;
      for (const auto& l : row) r.push_back(l.is_null() ? std::nullopt : std::optional<int>(l.get<int>()));
      s.links.push_back(std::move(r));
    }
    return s;
  } catch (const json::exception& e) {
    throw ManifestError(fmt::format("bad track file: {}", e.what()));
  }
}

void write_trackset(const ObjectTrackSet& set, const fs::path& dir) {
  write_feature_matrix(set.features, dir / (set.clip_id + ".features"));
  write_file_atomic(dir / (set.clip_id + ".json"), track_to_json(set).dump() + "\n");
}

ObjectTrackSet read_trackset(const fs::path& json_path) {
  auto j = json::parse(read_file(json_path), nullptr, false);
  if (j.is_discarded()) throw ManifestError(fmt::format("{}: not JSON", json_path.string()));
  auto s = track_from_json(j);
  s.features = read_feature_matrix(json_path.parent_path() / j.value("features", s.clip_id + ".features"));
  s.validate();
  return s;
}

}  // namespace adlforge::objects
