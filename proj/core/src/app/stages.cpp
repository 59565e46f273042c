#include "adlforge/app/stages.hpp"

#include <chrono>
#include <map>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "adlforge/annotate/caption.hpp"
#include "adlforge/annotate/describe.hpp"
#include "adlforge/app/provenance.hpp"
#include "adlforge/curation/sequences.hpp"
#include "adlforge/curation/stitch.hpp"
#include "adlforge/curation/synthetic.hpp"
#include "adlforge/eval/judge.hpp"
#include "adlforge/eval/mementos.hpp"
#include "adlforge/model/json_io.hpp"
#include "adlforge/model/manifest.hpp"
#include "adlforge/model/parallel.hpp"
#include "adlforge/model/pose_io.hpp"
#include "adlforge/objects/objects.hpp"
#include "adlforge/pose/pose_cues.hpp"

namespace adlforge::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
json guarded(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void finish(const fs::path& out, const std::string& stage, const RunConfig& config,
            const std::vector<fs::path>& inputs) {
  auto p = make_provenance(stage, config);
  p.inputs = hash_files(inputs, out);
  write_provenance(out, std::move(p));
  spdlog::info("{}: wrote {}", stage, out.string());
}

std::vector<json> rows_of(const auto& items) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto& it : items) rows.push_back(json(it));
  return rows;
}

std::vector<json> load_rows(const fs::path& path) {
  std::vector<json> rows;
  for_each_jsonl(path, [&](int, const json& j) { rows.push_back(j); });
  return rows;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

std::map<std::string, const ClipRecord*> index_clips(const std::vector<ClipRecord>& corpus) {
  std::map<std::string, const ClipRecord*> by_id;
  for (const auto& c : corpus) by_id[c.clip_id] = &c;
  return by_id;
}

int count_type(const std::vector<QaPair>& pairs, QaType t) {
  int n = 0;
  for (const auto& p : pairs) n += p.qtype == t;
  return n;
}

}  // namespace

backends::FixtureTable mock_fixtures(const RunConfig& config) {
  backends::FixtureTable table;
  if (!config.fixtures.empty()) table = backends::FixtureTable::load(config.fixtures);
  backends::Fixture fallback;
  fallback.generator = "synthetic";
  table.add(std::move(fallback));
  return table;
}

Runtime::Runtime(RunConfig config, std::shared_ptr<curation::VideoCodec> codec,
                 std::shared_ptr<backends::Transport> transport)
    : config_(std::move(config)), codec_(std::move(codec)) {
  config_.validate();
  if (!codec_) codec_ = std::make_shared<curation::OpenCvCodec>();
  if (!transport) {
    if (config_.mock_backends) {
      backends::NetworkGuard::disable_network();
      transport = backends::mock_backend(mock_fixtures(config_));
    } else if (!config_.urls.empty()) {
      transport = std::make_shared<backends::HttpTransport>(backends::HttpEndpoints{config_.urls, config_.timeout_ms});
    } else {
      transport = std::make_shared<backends::SentinelTransport>();
    }
  }
  counter_ = std::make_shared<backends::CountingTransport>(std::move(transport));
  limiter_ = std::make_unique<backends::RateLimiter>(config_.rate_per_minute);
  backends::ClientOptions opt;
  opt.model_ids = config_.models;
  opt.max_retries = config_.max_retries;
  opt.backoff_base = std::chrono::milliseconds(config_.backoff_ms);
  client_ = std::make_unique<backends::BackendClient>(
      counter_, std::make_shared<backends::ResponseCache>(config_.cache_path()), opt, limiter_.get());
  prompts_ = config_.prompts_dir.empty() ? annotate::PromptLibrary::builtin()
                                         : annotate::PromptLibrary::with_overrides(config_.prompts_dir);
}

json stage_synth_corpus(Runtime& rt, const fs::path& out) {
  return guarded("synth-corpus", [&] {
    const auto& c = rt.config();
    curation::SyntheticCorpusOptions opt;
    opt.subjects = c.synth_subjects;
    opt.cameras = c.synth_cameras;
    opt.clips_per_action = c.synth_clips_per_action;
    opt.min_frames = c.synth_min_frames;
    opt.max_frames = c.synth_max_frames;
    opt.fps = c.synth_fps;
    opt.seed = c.seed;
    fs::create_directories(out);
    const auto clips = curation::write_synthetic_corpus(out, ActionVocabulary::builtin(), opt, rt.codec());
    finish(out, "synth-corpus", c, {});
    return json{{"clips", clips.size()}, {"manifest", (out / "corpus.jsonl").string()}};
  });
}

json stage_crop(Runtime& rt, const fs::path& corpus, const fs::path& out) {
  return guarded("crop", [&] {
    const auto& c = rt.config();
    const auto records = load_corpus_manifest(corpus, ActionVocabulary::builtin());
    const curation::CropOptions opt{c.margin_frac, c.min_box};
    std::vector<json> rows(records.size());
    parallel_for(records.size(), c.workers, [&](std::size_t i) {
      const auto& r = records[i];
      if (!r.pose_path) throw PreconditionError(fmt::format("clip {} has no pose sidecar", r.clip_id));
      const auto poses = load_pose_sequence(resolve_relative(corpus, *r.pose_path));
      rows[i] = {{"clip_id", r.clip_id}, {"crop_box", curation::crop_union(poses, opt)}};
      if (c.crop_mode == "per_frame") {
        json frames = json::array();
        for (const auto& b : curation::crop_per_frame(poses, opt)) frames.push_back(b ? json(*b) : json(nullptr));
        rows[i]["per_frame"] = std::move(frames);
      }
    });
    fs::create_directories(out);
    write_jsonl(out / "crops.jsonl", rows);
    finish(out, "crop", c, {corpus});
    return json{{"clips", rows.size()}};
  });
}

json stage_package_features(Runtime& rt, const std::vector<fs::path>& inputs, const fs::path& out,
                            const std::string& model_id) {
  return guarded("package-features", [&] {
    if (inputs.empty()) throw PreconditionError("no feature files given");
    fs::create_directories(out);
    std::vector<fs::path> hashed;
    for (const auto& in : inputs) {
      pose::package_pose_features(in, out, model_id);
      const auto stem = feature_stem(in);
      hashed.push_back(stem.string() + ".f32");
      hashed.push_back(stem.string() + ".json");
    }
    finish(out, "package-features", rt.config(), hashed);
    return json{{"packaged", inputs.size()}};
  });
}

json stage_sequences(Runtime& rt, const fs::path& out) {
  return guarded("sequences", [&] {
    const auto& c = rt.config();
    curation::SequenceOptions opt{c.sequence_count, c.min_len, c.max_len, c.seed};
    const auto gen =
        c.sequence_generator == "llm" ? curation::SequenceGenerator::llm : curation::SequenceGenerator::sampler;
    const auto seqs = curation::generate_composite_sequences(ActionVocabulary::builtin(), opt, gen, &rt.client());
    fs::create_directories(out);
    curation::write_sequences(out / "sequences.jsonl", seqs);
    finish(out, "sequences", c, {});
    return json{{"sequences", seqs.size()}};
  });
}

json stage_stitch(Runtime& rt, const fs::path& corpus, const fs::path& sequences, const fs::path& out) {
  return guarded("stitch", [&] {
    const auto& c = rt.config();
    const auto records = load_corpus_manifest(corpus, ActionVocabulary::builtin());
    const auto seqs = curation::load_sequences(sequences);
    curation::StitchOptions sopt;
    sopt.seed = c.seed;
    sopt.target_count = c.target_videos;
    auto videos = curation::assign_clips(seqs, records, sopt);
    const auto by_id = index_clips(records);

    curation::RenderOptions ropt;
    ropt.crop = {c.margin_frac, c.min_box};
    ropt.mode = c.crop_mode == "per_frame" ? curation::CropMode::per_frame : curation::CropMode::per_video_union;
    ropt.out_w = ropt.out_h = c.out_size;
    fs::create_directories(out / "videos");
    parallel_for(videos.size(), c.workers, [&](std::size_t i) {
      auto& v = videos[i];
      v.video_path = "videos/" + v.video_id + rt.codec().extension();
      curation::render_stitched(v, curation::segment_clips(v, by_id), corpus, rt.codec(), ropt, out / v.video_path);
      validate_stitched(v);
    });
    write_stitched_manifest(out / "stitched.jsonl", videos);
    finish(out, "stitch", c, {corpus, sequences});
    double actions = 0;
    for (const auto& v : videos) actions += static_cast<double>(v.segments.size());
    return json{{"videos", videos.size()}, {"mean_actions", videos.empty() ? 0.0 : actions / videos.size()}};
  });
}

json stage_caption(Runtime& rt, const fs::path& stitched, const fs::path& out) {
  return guarded("caption", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    annotate::CaptionOptions opt;
    opt.target_fps = c.target_fps;
    opt.prompts = rt.prompts().caption_prompts();
    std::vector<annotate::CaptionDict> dicts(videos.size());
    parallel_for(videos.size(), c.workers, [&](std::size_t i) {
      dicts[i] = annotate::caption_video(videos[i], resolve_relative(stitched, videos[i].video_path), rt.codec(),
                                         rt.client(), opt);
    });
    std::vector<json> rows;
    int failed = 0;
    for (const auto& d : dicts) {
      rows.push_back(annotate::to_json(d));
      failed += static_cast<int>(d.failed_frames.size());
    }
    fs::create_directories(out);
    write_jsonl(out / "captions.jsonl", rows);
    finish(out, "caption", c, {stitched});
    return json{{"videos", dicts.size()}, {"failed_frames", failed}};
  });
}

json stage_describe(Runtime& rt, const fs::path& stitched, const fs::path& captions, const fs::path& out) {
  return guarded("describe", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    std::map<std::string, annotate::CaptionDict> by_video;
    for (const auto& row : load_rows(captions)) {
      auto d = annotate::caption_dict_from_json(row);
      by_video[d.video_id] = std::move(d);
    }
    std::vector<annotate::DenseDescription> dense(videos.size());
    std::vector<std::vector<QaPair>> qa(videos.size());
    parallel_for(videos.size(), c.workers, [&](std::size_t i) {
      const auto& v = videos[i];
      const auto it = by_video.find(v.video_id);
      if (it == by_video.end()) throw ManifestError(fmt::format("{}: no captions", v.video_id));
      dense[i] = annotate::summarize_dense(it->second, v.action_labels(), rt.client(), rt.prompts());
      qa[i] = annotate::generate_qa(v, dense[i], it->second, rt.client(), rt.prompts());
    });
    std::vector<json> dense_rows;
    std::vector<QaPair> all;
    for (std::size_t i = 0; i < videos.size(); ++i) {
      dense_rows.push_back(annotate::to_json(dense[i]));
      all.insert(all.end(), qa[i].begin(), qa[i].end());
    }
    fs::create_directories(out);
    write_jsonl(out / "dense.jsonl", dense_rows);
    write_qa_manifest(out / "qa_base.jsonl", all);
    finish(out, "describe", c, {stitched, captions});
    return json{{"videos", videos.size()}, {"qa_pairs", all.size()}};
  });
}

json stage_posecues(Runtime& rt, const fs::path& stitched, const fs::path& corpus, const fs::path& out) {
  return guarded("posecues", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    const auto records = load_corpus_manifest(corpus, ActionVocabulary::builtin());
    const auto by_id = index_clips(records);
    const bool union_mode = c.crop_mode != "per_frame";

    std::vector<json> cues(videos.size());
    std::vector<std::vector<QaPair>> qa(videos.size());
    parallel_for(videos.size(), c.workers, [&](std::size_t i) {
      const auto& v = videos[i];
      std::vector<PoseSequence> clip_poses;
      for (const auto* clip : curation::segment_clips(v, by_id)) {
        if (!clip->pose_path) throw PreconditionError(fmt::format("{}: clip {} has no poses", v.video_id, clip->clip_id));
        clip_poses.push_back(load_pose_sequence(resolve_relative(corpus, *clip->pose_path)));
      }
      std::optional<curation::Letterbox> lb;
      if (union_mode && v.crop_box) lb = curation::make_letterbox(*v.crop_box, c.out_size, c.out_size);
      const auto poses = pose::stitched_poses(v, clip_poses, lb);
      const auto frames = annotate::sample_frames(v.total_frames(), v.fps, c.target_fps);
      const auto traces = pose::extract_traces(poses, frames);
      const auto context = pose::pose_context(traces, rt.client(), rt.prompts());
      qa[i] = pose::pose_qa(v.video_id, traces, join(v.action_labels(), ", "), rt.client(), rt.prompts());
      cues[i] = {{"video_id", v.video_id}, {"frames", frames}, {"pose_str", pose::build_pose_str(traces)},
                 {"context", context}};
    });
    std::vector<QaPair> all;
    for (const auto& q : qa) all.insert(all.end(), q.begin(), q.end());
    fs::create_directories(out);
    write_jsonl(out / "pose_cues.jsonl", cues);
    write_qa_manifest(out / "pose_qa.jsonl", all);
    finish(out, "posecues", c, {stitched, corpus});
    return json{{"videos", videos.size()}, {"qa_pairs", all.size()}};
  });
}

json stage_objects(Runtime& rt, const fs::path& stitched, const fs::path& out) {
  return guarded("objects", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    objects::LocalizeOptions lopt;
    lopt.confidence_floor = c.confidence_floor;
    if (auto it = c.models.find(backends::Role::localize); it != c.models.end()) lopt.model_id = it->second;
    const objects::TrackOptions topt{c.min_sim, c.exclusive};

    std::vector<std::vector<json>> summaries(videos.size());
    parallel_for(videos.size(), c.workers, [&](std::size_t i) {
      const auto& v = videos[i];
      // One decoding pass for the sampled frames of every segment.
      std::vector<std::vector<int>> seg_frames;
      std::vector<int> all;
      for (const auto& s : v.segments) {
        auto idx = objects::uniform_sample_indices(s.length());
        for (auto& f : idx) f += s.start_frame;
        all.insert(all.end(), idx.begin(), idx.end());
        seg_frames.push_back(std::move(idx));
      }
      const auto decoded = curation::read_frames(rt.codec(), resolve_relative(stitched, v.video_path), all);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < v.segments.size(); ++k) {
        const auto& s = v.segments[k];
        const auto n = seg_frames[k].size();
        std::vector<backends::EncodedImage> frames;
        for (std::size_t m = offset; m < offset + n; ++m) frames.push_back(curation::encode_jpeg(decoded[m]));
        const cv::Size frame_size = decoded[offset].size();
        offset += n;
        const auto found = objects::detect_objects(frames, rt.client());
        const auto rel = objects::filter_relevant(s.action_label, found, rt.client(), rt.prompts());
        json row = {{"video_id", v.video_id}, {"clip_id", s.clip_id},        {"segment", k},
                    {"found", found},         {"relevant", rel.relevant},   {"dropped", rel.dropped},
                    {"tracked", false}};
        if (!rel.relevant.empty()) {
          try {
            auto set = objects::localize_and_embed(v.video_id, s.clip_id, seg_frames[k], frames, frame_size, rel.relevant,
                                                   rt.client(), lopt);
            objects::track_by_similarity(set, topt);
            set.validate();
            objects::write_trackset(set, out / v.video_id);
            row["tracked"] = true;
          } catch (const PreconditionError& e) {
            spdlog::warn("{}", e.what());
          }
        }
        summaries[i].push_back(std::move(row));
      }
    });
    std::vector<json> rows;
    int tracked = 0;
    for (auto& s : summaries)
      for (auto& r : s) {
        tracked += r["tracked"].get<bool>();
        rows.push_back(std::move(r));
      }
    fs::create_directories(out);
    write_jsonl(out / "objects.jsonl", rows);
    finish(out, "objects", c, {stitched});
    return json{{"segments", rows.size()}, {"tracked", tracked}};
  });
}

namespace {

// Track files of an objects directory, grouped per video in segment order.
std::map<std::string, std::vector<objects::ObjectTrackSet>> load_tracksets(const fs::path& dir) {
  std::map<std::string, std::vector<objects::ObjectTrackSet>> out;
  const auto summary = dir / "objects.jsonl";
  if (!fs::exists(summary)) throw ManifestError(fmt::format("{}: missing objects.jsonl", dir.string()));
  for (const auto& row : load_rows(summary)) {
    if (!row.value("tracked", false)) continue;
    const auto video = row.at("video_id").get<std::string>();
    out[video].push_back(objects::read_trackset(dir / video / (row.at("clip_id").get<std::string>() + ".json")));
  }
  return out;
}

}  // namespace

json stage_track(Runtime& rt, const fs::path& objects_dir, const fs::path& out) {
  return guarded("track", [&] {
    const auto& c = rt.config();
    const objects::TrackOptions topt{c.min_sim, c.exclusive};
    auto sets = load_tracksets(objects_dir);
    fs::create_directories(out);
    int n = 0;
    for (auto& [video, list] : sets)
      for (auto& s : list) {
        objects::track_by_similarity(s, topt);
        s.validate();
        objects::write_trackset(s, out / video);
        ++n;
      }
    write_jsonl(out / "objects.jsonl", load_rows(objects_dir / "objects.jsonl"));
    finish(out, "track", c, {objects_dir / "objects.jsonl"});
    return json{{"tracksets", n}};
  });
}

json stage_qagen(Runtime& rt, const fs::path& stitched, const fs::path& describe, const fs::path& posecues,
                 const fs::path& objects_dir, const fs::path& out) {
  return guarded("qagen", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    std::map<std::string, std::vector<QaPair>> base, pose_pairs;
    for (auto& q : load_qa_manifest(describe / "qa_base.jsonl")) base[q.video_id].push_back(std::move(q));
    for (auto& q : load_qa_manifest(posecues / "pose_qa.jsonl")) pose_pairs[q.video_id].push_back(std::move(q));
    std::map<std::string, std::string> pose_ctx;
    for (const auto& row : load_rows(posecues / "pose_cues.jsonl"))
      pose_ctx[row.at("video_id").get<std::string>()] = row.at("context").get<std::string>();
    const auto tracks = load_tracksets(objects_dir);

    std::vector<QaPair> qa, with_pose, with_objects;
    int no_objects = 0;
    for (const auto& v : videos) {
      const auto& b = base[v.video_id];
      if (count_type(b, QaType::dense_description) != 1 || b.size() != 7)
        throw ValidationError(fmt::format("{}: expected 7 base QA pairs, found {}", v.video_id, b.size()));
      qa.insert(qa.end(), b.begin(), b.end());
      const auto& p = pose_pairs[v.video_id];
      qa.insert(qa.end(), p.begin(), p.end());
      if (auto it = pose_ctx.find(v.video_id); it != pose_ctx.end() && !it->second.empty()) {
        auto aug = annotate::augment_with_context(b, it->second, annotate::ContextKind::pose);
        with_pose.insert(with_pose.end(), aug.begin(), aug.end());
      }
      const auto t = tracks.find(v.video_id);
      if (t == tracks.end() || t->second.empty()) {
        spdlog::warn("{}: no tracked objects; object QA omitted", v.video_id);
        ++no_objects;
        continue;
      }
      std::vector<const objects::ObjectTrackSet*> ptrs;
      for (const auto& s : t->second) ptrs.push_back(&s);
      const auto cues = objects::object_qa_and_context(v.video_id, ptrs);
      qa.insert(qa.end(), cues.qa.begin(), cues.qa.end());
      auto aug = annotate::augment_with_context(b, cues.context, annotate::ContextKind::object);
      with_objects.insert(with_objects.end(), aug.begin(), aug.end());
    }
    fs::create_directories(out);
    write_qa_manifest(out / "qa.jsonl", qa);
    write_qa_manifest(out / "qa_pose_context.jsonl", with_pose);
    write_qa_manifest(out / "qa_object_context.jsonl", with_objects);
    finish(out, "qagen", c, {stitched, describe, posecues, objects_dir});
    return json{{"videos", videos.size()},
                {"qa_pairs", qa.size()},
                {"pose_context_pairs", with_pose.size()},
                {"object_context_pairs", with_objects.size()},
                {"videos_without_objects", no_objects}};
  });
}

json stage_build_mcq(Runtime& rt, const fs::path& stitched, const fs::path& out) {
  return guarded("eval-mcq", [&] {
    const auto& c = rt.config();
    const auto videos = load_stitched_manifest(stitched);
    const auto vocab = ActionVocabulary::builtin().labels();
    const eval::McqOptions opt{c.k, c.seed};
    const auto ar = eval::build_mcq(videos, vocab, eval::McqTask::AR, opt);
    const auto af = eval::build_mcq(videos, vocab, eval::McqTask::AF, opt);
    fs::create_directories(out);
    eval::write_mcq(out / "mcq_ar.jsonl", ar);
    eval::write_mcq(out / "mcq_af.jsonl", af);
    finish(out, "eval-mcq", c, {stitched});
    return json{{"ar_items", ar.size()}, {"af_items", af.size()}};
  });
}

json stage_score_mcq(Runtime& rt, const fs::path& items_path, const fs::path& answers, const fs::path& out) {
  return guarded("eval-mcq", [&] {
    const auto items = eval::load_mcq(items_path);
    const auto report = eval::score_mcq(items, eval::align_answers(items, eval::load_answers(answers)));
    fs::create_directories(out);
    write_file_atomic(out / "report.json", eval::to_json(report).dump(2) + "\n");
    finish(out, "eval-mcq", rt.config(), {items_path, answers});
    return json{{"total", report.total}, {"correct", report.correct}, {"accuracy", report.accuracy}};
  });
}

namespace {

std::vector<eval::JudgeItem> load_description_pairs(const fs::path& path) {
  std::vector<eval::JudgeItem> out;
  for_each_jsonl(path, [&](int line, const json& j) {
    if (!j.contains("item_id") || !j.contains("generated") || !j.contains("reference"))
      throw ManifestError(fmt::format("line {}: needs item_id, generated and reference", line));
    out.push_back({j["item_id"].get<std::string>(), j["generated"].get<std::string>(),
                   j["reference"].get<std::string>()});
  });
  return out;
}

}  // namespace

json stage_eval_desc(Runtime& rt, const fs::path& pairs, const fs::path& out) {
  return guarded("eval-desc", [&] {
    const auto items = load_description_pairs(pairs);
    const auto corpus = eval::judge_corpus(items, rt.client(), rt.config().workers, rt.prompts());
    json report = {{"judge", eval::to_json(corpus)}};
    fs::create_directories(out);
    write_file_atomic(out / "report.json", report.dump(2) + "\n");
    finish(out, "eval-desc", rt.config(), {pairs});
    return json{{"items", corpus.items}, {"mean", corpus.mean}};
  });
}

json stage_eval_mementos(Runtime& rt, const fs::path& pairs, const fs::path& out) {
  return guarded("eval-mementos", [&] {
    const auto items = load_description_pairs(pairs);
    const auto vocab = eval::KeywordVocab::builtin();
    std::vector<eval::MementosScore> scores;
    json per_item = json::array();
    for (const auto& it : items) {
      scores.push_back(eval::mementos_f1(it.generated, it.reference, vocab));
      auto j = eval::to_json(scores.back());
      j["item_id"] = it.item_id;
      per_item.push_back(std::move(j));
    }
    const auto corpus = eval::mementos_corpus(scores);
    json report = {{"mementos", eval::to_json(corpus)}, {"items", std::move(per_item)}, {"vocab", vocab.version}};
    fs::create_directories(out);
    write_file_atomic(out / "report.json", report.dump(2) + "\n");
    finish(out, "eval-mementos", rt.config(), {pairs});
    return eval::to_json(corpus);
  });
}

json run_pipeline(Runtime& rt, const fs::path& run_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(run_dir);
  json summary;
  fs::path corpus;
  if (rt.config().corpus.empty()) {
    summary["synth-corpus"] = stage_synth_corpus(rt, run_dir / "corpus");
    corpus = run_dir / "corpus" / "corpus.jsonl";
  } else {
    corpus = rt.config().corpus;
  }
  summary["sequences"] = stage_sequences(rt, run_dir / "sequences");
  summary["stitch"] = stage_stitch(rt, corpus, run_dir / "sequences" / "sequences.jsonl", run_dir / "stitched");
  const auto stitched = run_dir / "stitched" / "stitched.jsonl";
  summary["caption"] = stage_caption(rt, stitched, run_dir / "captions");
  summary["describe"] = stage_describe(rt, stitched, run_dir / "captions" / "captions.jsonl", run_dir / "describe");
  summary["posecues"] = stage_posecues(rt, stitched, corpus, run_dir / "pose");
  summary["objects"] = stage_objects(rt, stitched, run_dir / "objects");
  summary["qagen"] = stage_qagen(rt, stitched, run_dir / "describe", run_dir / "pose", run_dir / "objects",
                                 run_dir / "qa");
  summary["eval-mcq"] = stage_build_mcq(rt, stitched, run_dir / "mcq");
  const auto stats = rt.client().stats();
  summary["backend"] = {{"wire_calls", stats.wire_calls}, {"cache_hits", stats.cache_hits},
                        {"retries", stats.retries}, {"transport_calls", rt.counter().calls()}};
  summary["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_file_atomic(run_dir / "summary.json", summary.dump(2) + "\n");
  return guarded("pipeline", [&] {
    std::vector<fs::path> inputs;
    if (!rt.config().corpus.empty()) inputs.push_back(corpus);
    finish(run_dir, "pipeline", rt.config(), inputs);
    return summary;
  });
}

}  // namespace adlforge::app
