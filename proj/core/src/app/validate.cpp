#include "adlforge/app/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "adlforge/annotate/caption.hpp"
#include "adlforge/app/provenance.hpp"
#include "adlforge/curation/sequences.hpp"
#include "adlforge/eval/mcq.hpp"
#include "adlforge/model/action_vocab.hpp"
#include "adlforge/model/error.hpp"
#include "adlforge/model/hashing.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/objects/objects.hpp"

namespace adlforge::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Checker {
 public:
  Checker(ValidationReport& r, curation::VideoCodec* codec) : r_(r), codec_(codec) {}

  void file(const fs::path& p) {
    const auto name = p.filename().string();
    const auto parent = p.parent_path();
    try {
      if (name == "corpus.jsonl") {
        corpus(p);
      } else if (name == "sequences.jsonl") {
        sequences(p);
      } else if (name == "stitched.jsonl") {
        stitched(p);
      } else if (name == "captions.jsonl") {
        captions(p);
      } else if (name == "qa.jsonl" || name == "qa_base.jsonl" || name == "pose_qa.jsonl" ||
                 (name.starts_with("qa_") && name.ends_with("_context.jsonl"))) {
        qa(p);
      } else if (name.starts_with("mcq") && p.extension() == ".jsonl") {
        eval::load_mcq(p);
      } else if (name == kProvenanceFile) {
        provenance(p);
      } else if (p.extension() == ".json" && fs::exists(parent.parent_path() / "objects.jsonl") &&
                 !name.ends_with(".features.json")) {
        trackset(p);
      } else {
        return;
      }
      r_.checked.push_back(p.string());
    } catch (const std::exception& e) {
      r_.checked.push_back(p.string());
      error(p, e.what());
    }
  }

 private:
  void error(const fs::path& p, const std::string& what) { r_.errors.push_back(fmt::format("{}: {}", p.string(), what)); }

  void corpus(const fs::path& p) {
    for (const auto& c : load_corpus_manifest(p, ActionVocabulary::builtin())) {
      if (!fs::exists(resolve_relative(p, c.video_path))) error(p, fmt::format("clip {}: media missing", c.clip_id));
      if (c.pose_path && !fs::exists(resolve_relative(p, *c.pose_path)))
        error(p, fmt::format("clip {}: pose sidecar missing", c.clip_id));
    }
  }

  void sequences(const fs::path& p) {
    std::set<std::string> ids;
    const auto vocab = ActionVocabulary::builtin();
    for (const auto& s : curation::load_sequences(p)) {
      if (!ids.insert(s.sequence_id).second) error(p, fmt::format("duplicate sequence_id {}", s.sequence_id));
      try {
        curation::validate_sequence(s, vocab);
      } catch (const Error& e) {
        error(p, fmt::format("{}: {}", s.sequence_id, e.what()));
      }
    }
  }

  void stitched(const fs::path& p) {
    std::set<std::string> ids;
    for (const auto& v : load_stitched_manifest(p)) {
      if (!ids.insert(v.video_id).second) error(p, fmt::format("duplicate video_id {}", v.video_id));
      try {
        validate_stitched(v);
      } catch (const ValidationError& e) {
        error(p, e.what());
        continue;
      }
      const auto media = resolve_relative(p, v.video_path);
      if (!fs::exists(media)) {
        error(p, fmt::format("video {}: media {} missing", v.video_id, v.video_path));
        continue;
      }
      if (codec_) {
        try {
          const int n = codec_->open(media)->frame_count();
          if (n != v.total_frames())
            error(p, fmt::format("video {}: media has {} frames, segments cover {}", v.video_id, n, v.total_frames()));
        } catch (const Error& e) {
          error(p, fmt::format("video {}: {}", v.video_id, e.what()));
        }
      }
    }
  }

  void captions(const fs::path& p) {
    for_each_jsonl(p, [&](int line, const json& j) {
      const auto d = annotate::caption_dict_from_json(j);
      if (d.entries.empty()) error(p, fmt::format("line {}: {} has no captions", line, d.video_id));
      for (const auto& [frame, text] : d.entries)
        if (text.empty()) error(p, fmt::format("line {}: {} frame {} has an empty caption", line, d.video_id, frame));
    });
  }

  void qa(const fs::path& p) {
    const auto name = p.filename().string();
    std::map<std::string, std::map<QaType, int>> counts;
    for (const auto& q : load_qa_manifest(p)) {
      try {
        validate_qa_pair(q);
      } catch (const ValidationError& e) {
        error(p, fmt::format("{}: {}", q.video_id, e.what()));
      }
      ++counts[q.video_id][q.qtype];
      const bool ctx_file = name.ends_with("_context.jsonl");
      if (ctx_file != is_context_augmented(q.qtype))
        error(p, fmt::format("{}: {} pair in the wrong file", q.video_id, to_string(q.qtype)));
    }
    if (name != "qa.jsonl" && name != "qa_base.jsonl") return;
    for (const auto& [video, c] : counts) {
      auto n = [&](QaType t) { return c.count(t) ? c.at(t) : 0; };
      if (n(QaType::dense_description) != 1 || n(QaType::summary) != 3 || n(QaType::detail) != 3)
        error(p, fmt::format("{}: base QA must be 1 dense + 3 summary + 3 detail, found {} + {} + {}", video,
                             n(QaType::dense_description), n(QaType::summary), n(QaType::detail)));
      if (name == "qa.jsonl") {
        if (n(QaType::pose_qa) != 2) error(p, fmt::format("{}: expected 2 pose QA pairs, found {}", video, n(QaType::pose_qa)));
        if (n(QaType::object_qa) != 0 && n(QaType::object_qa) != 2)
          error(p, fmt::format("{}: expected 0 or 2 object QA pairs, found {}", video, n(QaType::object_qa)));
      }
    }
  }

  void trackset(const fs::path& p) {
    const auto set = objects::read_trackset(p);
    set.validate();
    if (set.features.dim() != kObjectFeatureDim)
      error(p, fmt::format("features have dim {}, expected {}", set.features.dim(), kObjectFeatureDim));
  }

  void provenance(const fs::path& p) {
    const auto dir = p.parent_path();
    const auto prov = read_provenance(dir);
    for (const auto& [rel, sha] : prov.outputs) {
      const auto f = dir / rel;
      if (!fs::exists(f))
        error(p, fmt::format("recorded output {} is missing", rel));
      else if (sha256_file(f) != sha)
        error(p, fmt::format("recorded output {} changed since it was written", rel));
    }
  }

  ValidationReport& r_;
  curation::VideoCodec* codec_;
};

bool is_manifest(const fs::path& p) { return p.extension() == ".jsonl"; }

}  // namespace

ValidationReport validate_path(const fs::path& path, curation::VideoCodec* codec) {
  ValidationReport r;
  Checker check(r, codec);
  if (!fs::exists(path)) {
    r.errors.push_back(fmt::format("{}: does not exist", path.string()));
    return r;
  }
  if (!fs::is_directory(path)) {
    check.file(path);
    if (r.checked.empty()) r.errors.push_back(fmt::format("{}: not a recognized artifact", path.string()));
    return r;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::set<fs::path> manifest_dirs;
  for (const auto& f : files) {
    check.file(f);
    if (is_manifest(f)) manifest_dirs.insert(f.parent_path());
  }
  for (const auto& d : manifest_dirs)
    if (!fs::exists(d / kProvenanceFile)) r.errors.push_back(fmt::format("{}: no provenance record", d.string()));
  return r;
}

}  // namespace adlforge::app
