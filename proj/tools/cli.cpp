#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <mutex>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/base_sink.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "adlforge/app/config.hpp"
#include "adlforge/app/provenance.hpp"
#include "adlforge/app/stages.hpp"
#include "adlforge/app/validate.hpp"
#include "adlforge/curation/codec.hpp"
#include "adlforge/model/error.hpp"

namespace adlforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// One JSON object per log record.
class JsonSink : public spdlog::sinks::base_sink<std::mutex> {
 public:
  explicit JsonSink(std::ostream& os) : os_(os) {}

 protected:
  void sink_it_(const spdlog::details::log_msg& msg) override {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(msg.time.time_since_epoch()).count();
    const auto level = spdlog::level::to_string_view(msg.level);
    json j = {{"ts_ms", ms},
              {"level", std::string(level.data(), level.size())},
              {"msg", std::string(msg.payload.data(), msg.payload.size())}};
    os_ << j.dump() << '\n';
  }
  void flush_() override { os_.flush(); }

 private:
  std::ostream& os_;
};

/// Routes the default logger to `err` for the duration of one invocation.
class LogScope {
 public:
  LogScope(std::ostream& err, bool json_logs, const std::string& level) : previous_(spdlog::default_logger()) {
    spdlog::sink_ptr sink;
    if (json_logs) {
      sink = std::make_shared<JsonSink>(err);
    } else {
      sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
      sink->set_pattern("[%H:%M:%S.%e] [%l] %v");
    }
    auto logger = std::make_shared<spdlog::logger>("adlforge", sink);
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
  }
  ~LogScope() { spdlog::set_default_logger(previous_); }
  LogScope(const LogScope&) = delete;
  LogScope& operator=(const LogScope&) = delete;

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

void load_config_file(app::RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(fmt::format("cannot read config file {}", path.string()));
  for (const auto& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.inputs.size() != 1)
      throw PreconditionError(fmt::format("config {}: expected a single value", item.fullname()));
    cfg.set(item.fullname(), item.inputs.front());
  }
}

struct Flags {
  std::string config;
  std::vector<std::string> sets;
  bool overwrite = false;
  bool json_logs = false;
  std::string log_level = "info";
  // Inputs, by meaning.
  std::string corpus, sequences, stitched, captions, describe, pose, objects, items, answers, pairs, model_id;
  std::vector<std::string> inputs;
  std::vector<std::string> validate_paths;
  bool check_media = false;
};

// Flag -> config key for the overrides shared by every subcommand.
struct Override {
  const char* flag;
  const char* key;
  const char* help;
};
constexpr Override kOverrides[] = {
    {"--seed", "run.seed", "Master seed"},
    {"--workers", "run.workers", "Worker threads"},
    {"--out", "run.out", "Output directory (versioned as <out>-vN when it exists)"},
    {"--cache-dir", "run.cache_dir", "Response cache directory (default <out>.cache)"},
    {"--fixtures", "run.fixtures", "Fixture file consulted by mock backends"},
    {"--prompts-dir", "run.prompts_dir", "Directory of prompt template overrides"},
    {"--target-videos", "curation.target_videos", "Number of stitched videos"},
    {"--margin-frac", "curation.margin_frac", "Crop margin as a fraction of the joint extent"},
    {"--k", "eval.k", "MCQ option count"},
    {"--min-sim", "objects.min_sim", "Minimum cosine similarity for a track link"},
    {"--clip-seconds", "eval.clip_seconds", "Long-video clip length in seconds"},
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curation pipeline and evaluation harness for activities-of-daily-living video instruction data",
               "adlforge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(app::tool_version()));

  Flags f;
  std::map<std::string, std::string> override_values;
  std::vector<CLI::Option*> override_opts;
  app.add_option("--config", f.config, "TOML-style config file")->check(CLI::ExistingFile);
  app.add_option("--set", f.sets, "Config override KEY=VALUE (repeatable)");
  for (const auto& o : kOverrides) override_opts.push_back(app.add_option(o.flag, override_values[o.key], o.help));
  bool mock = false;
  app.add_flag("--mock-backends", mock, "Serve every model call from deterministic mocks; no network");
  app.add_flag("--overwrite", f.overwrite, "Replace the output directory instead of versioning it");
  app.add_flag("--json-logs", f.json_logs, "Machine-readable log lines on stderr");
  app.add_option("--log-level", f.log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  auto* synth = app.add_subcommand("synth-corpus", "Write a procedurally generated skeleton/video corpus");
  auto* crop = app.add_subcommand("crop", "Person-centric crop boxes for every clip of a corpus");
  crop->add_option("--corpus", f.corpus, "corpus.jsonl")->required()->check(CLI::ExistingFile);
  auto* seqs = app.add_subcommand("sequences", "Composite action sequences");
  auto* stitch = app.add_subcommand("stitch", "Assign clips to sequences and render stitched videos");
  stitch->add_option("--corpus", f.corpus, "corpus.jsonl")->required()->check(CLI::ExistingFile);
  stitch->add_option("--sequences", f.sequences, "sequences.jsonl")->required()->check(CLI::ExistingFile);
  auto* caption = app.add_subcommand("caption", "Frame-level captions of stitched videos");
  caption->add_option("--stitched", f.stitched, "stitched.jsonl")->required()->check(CLI::ExistingFile);
  auto* describe = app.add_subcommand("describe", "Dense descriptions and base QA pairs");
  describe->add_option("--stitched", f.stitched, "stitched.jsonl")->required()->check(CLI::ExistingFile);
  describe->add_option("--captions", f.captions, "captions.jsonl")->required()->check(CLI::ExistingFile);
  auto* posecues = app.add_subcommand("posecues", "Pose strings, pose context and pose QA");
  posecues->add_option("--stitched", f.stitched, "stitched.jsonl")->required()->check(CLI::ExistingFile);
  posecues->add_option("--corpus", f.corpus, "corpus.jsonl")->required()->check(CLI::ExistingFile);
  auto* objects = app.add_subcommand("objects", "Detect, filter, localize and track relevant objects");
  objects->add_option("--stitched", f.stitched, "stitched.jsonl")->required()->check(CLI::ExistingFile);
  auto* track = app.add_subcommand("track", "Re-link existing object track sets");
  track->add_option("--objects", f.objects, "objects stage directory")->required()->check(CLI::ExistingDirectory);
  auto* qagen = app.add_subcommand("qagen", "Assemble QA manifests and context-augmented pairs");
  qagen->add_option("--stitched", f.stitched, "stitched.jsonl")->required()->check(CLI::ExistingFile);
  qagen->add_option("--describe", f.describe, "describe stage directory")->required()->check(CLI::ExistingDirectory);
  qagen->add_option("--pose", f.pose, "posecues stage directory")->required()->check(CLI::ExistingDirectory);
  qagen->add_option("--objects", f.objects, "objects stage directory")->required()->check(CLI::ExistingDirectory);
  auto* pkg = app.add_subcommand("package-features", "Validate and package pose feature pairs");
  pkg->add_option("inputs", f.inputs, "feature files (.f32/.json or stem)")->required();
  pkg->add_option("--model-id", f.model_id, "Model id recorded in the sidecar");
  auto* mcq = app.add_subcommand("eval-mcq", "Build MCQ items from --stitched, or score --items with --answers");
  auto* mcq_stitched = mcq->add_option("--stitched", f.stitched, "stitched.jsonl")->check(CLI::ExistingFile);
  auto* mcq_items = mcq->add_option("--items", f.items, "mcq.jsonl")->check(CLI::ExistingFile);
  auto* mcq_answers = mcq->add_option("--answers", f.answers, "answers.jsonl")->check(CLI::ExistingFile);
  mcq_items->needs(mcq_answers);
  mcq_answers->needs(mcq_items);
  mcq_stitched->excludes(mcq_items);
  auto* desc = app.add_subcommand("eval-desc", "Judge-scored description quality");
  desc->add_option("--pairs", f.pairs, "JSON Lines of item_id/generated/reference")->required()->check(CLI::ExistingFile);
  auto* mem = app.add_subcommand("eval-mementos", "Verb/noun keyword F1 of descriptions");
  mem->add_option("--pairs", f.pairs, "JSON Lines of item_id/generated/reference")->required()->check(CLI::ExistingFile);
  auto* validate = app.add_subcommand("validate", "Check manifests and artifact invariants");
  validate->add_option("paths", f.validate_paths, "Files or directories")->required();
  validate->add_flag("--media", f.check_media, "Also decode media headers to check frame counts");
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  pipeline->add_option("--corpus", f.corpus, "corpus.jsonl (default: synthesize one)")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app::tool_version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }
  if (mcq->parsed() && f.stitched.empty() && f.items.empty()) {
    err << "usage error: eval-mcq needs --stitched or --items/--answers\n";
    return 2;
  }

  LogScope logs(err, f.json_logs, f.log_level);

  // Defaults < config file < environment < flags.
  app::RunConfig cfg;
  try {
    if (!f.config.empty()) load_config_file(cfg, f.config);
    cfg.apply_env();
    for (const auto& s : f.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw PreconditionError(fmt::format("--set expects KEY=VALUE, got '{}'", s));
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    std::size_t i = 0;
    for (const auto& o : kOverrides)
      if (override_opts[i++]->count() > 0) cfg.set(o.key, override_values[o.key]);
    if (mock) cfg.mock_backends = true;
    if (pipeline->parsed() && !f.corpus.empty()) cfg.corpus = f.corpus;
    cfg.validate();
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  if (validate->parsed()) {
    curation::OpenCvCodec codec;
    bool ok = true;
    for (const auto& p : f.validate_paths) {
      const auto r = app::validate_path(p, f.check_media ? &codec : nullptr);
      for (const auto& e : r.errors) err << "invalid: " << e << '\n';
      out << fmt::format("{}: {} files checked, {} problems\n", p, r.checked.size(), r.errors.size());
      ok = ok && r.ok();
    }
    return ok ? 0 : 1;
  }

  try {
    app::Runtime rt(cfg);
    const fs::path dir = app::versioned_output(cfg.out, f.overwrite);
    json summary;
    if (synth->parsed())
      summary = app::stage_synth_corpus(rt, dir);
    else if (crop->parsed())
      summary = app::stage_crop(rt, f.corpus, dir);
    else if (seqs->parsed())
      summary = app::stage_sequences(rt, dir);
    else if (stitch->parsed())
      summary = app::stage_stitch(rt, f.corpus, f.sequences, dir);
    else if (caption->parsed())
      summary = app::stage_caption(rt, f.stitched, dir);
    else if (describe->parsed())
      summary = app::stage_describe(rt, f.stitched, f.captions, dir);
    else if (posecues->parsed())
      summary = app::stage_posecues(rt, f.stitched, f.corpus, dir);
    else if (objects->parsed())
      summary = app::stage_objects(rt, f.stitched, dir);
    else if (track->parsed())
      summary = app::stage_track(rt, f.objects, dir);
    else if (qagen->parsed())
      summary = app::stage_qagen(rt, f.stitched, f.describe, f.pose, f.objects, dir);
    else if (pkg->parsed())
      summary = app::stage_package_features(rt, {f.inputs.begin(), f.inputs.end()}, dir, f.model_id);
    else if (mcq->parsed())
      summary = f.items.empty() ? app::stage_build_mcq(rt, f.stitched, dir)
                                : app::stage_score_mcq(rt, f.items, f.answers, dir);
    else if (desc->parsed())
      summary = app::stage_eval_desc(rt, f.pairs, dir);
    else if (mem->parsed())
      summary = app::stage_eval_mementos(rt, f.pairs, dir);
    else if (pipeline->parsed())
      summary = app::run_pipeline(rt, dir);
    summary["output"] = dir.string();
    out << summary.dump(2) << '\n';
    return 0;
  } catch (const app::StageError& e) {
    spdlog::error("stage {} failed: {}", e.stage(), e.what());
    err << "error: stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace adlforge::cli
