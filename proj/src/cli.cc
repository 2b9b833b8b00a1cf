// Copyright 2026 The whisperkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "whisperkit/cli.h"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "binary_io.h"
#include "json.hpp"
#include "whisperkit/acoustics.h"
#include "whisperkit/decode.h"
#include "whisperkit/error.h"
#include "whisperkit/features.h"
#include "whisperkit/log.h"
#include "whisperkit/manifest.h"
#include "whisperkit/metrics.h"
#include "whisperkit/model.h"
#include "whisperkit/report.h"
#include "whisperkit/synth.h"
#include "whisperkit/trainer.h"

namespace whisperkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags shared across subcommands; unset means "not given".
struct Flags {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<std::string> method;
  std::optional<int> beam_width;
};

struct Settings {
  FeatureConfig features;
  ModelConfig model;
  TrainConfig train;
  DecodeMethod method = DecodeMethod::kBeam;
  int beam_width = kDefaultBeamWidth;
  std::uint64_t seed = 0;
};

// defaults < config file < flags
Settings resolve_settings(const Flags& flags) {
  Settings s;
  if (flags.config_path) {
    std::ifstream in(*flags.config_path);
    if (!in) throw InvalidArgument("cannot read config file " + *flags.config_path);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw InvalidArgument("config file " + *flags.config_path + ": " + e.what());
    }
    try {
      if (cfg.contains("features")) cfg.at("features").get_to(s.features);
      if (cfg.contains("model")) cfg.at("model").get_to(s.model);
      if (cfg.contains("train")) cfg.at("train").get_to(s.train);
      if (cfg.contains("seed")) s.seed = cfg.at("seed").get<std::uint64_t>();
      if (cfg.contains("decode")) {
        const auto& d = cfg.at("decode");
        if (d.contains("method")) s.method = decode_method_from_string(d.at("method").get<std::string>());
        s.beam_width = d.value("beam_width", s.beam_width);
      }
    } catch (const json::exception& e) {
      throw InvalidArgument("config file " + *flags.config_path + ": " + e.what());
    }
  }
  if (flags.seed) s.seed = *flags.seed;
  if (flags.epochs) s.train.epochs = *flags.epochs;
  if (flags.batch_size) s.train.batch_size = *flags.batch_size;
  if (flags.lr) s.train.lr = *flags.lr;
  if (flags.method) s.method = decode_method_from_string(*flags.method);
  if (flags.beam_width) s.beam_width = *flags.beam_width;
  // One seed drives everything random in a run.
  s.train.seed = s.seed;
  s.model.seed = s.seed;
  s.features.validate(kStandardSampleRate);
  s.train.validate();
  if (s.beam_width < 1) throw InvalidArgument("beam width must be >= 1");
  return s;
}

json decode_json(const Settings& s) {
  return json{{"method", to_string(s.method)}, {"beam_width", s.beam_width}};
}

std::string safe_file_stem(const std::string& utt_id) {
  std::string out = utt_id;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':' || c == '\0') c = '_';
  }
  return out;
}

std::string read_text(const fs::path& path) {
  const auto bytes = internal::read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  internal::write_file_atomic(path, text);
}

void report_failures(std::ostream& err, const std::vector<std::pair<std::string, std::string>>& failures) {
  if (failures.empty()) return;
  err << failures.size() << " utterance(s) failed:\n";
  for (const auto& [id, why] : failures) err << "  " << id << ": " << why << '\n';
}

// ---------------------------------------------------------------- features

int cmd_features(const Settings& s, const fs::path& manifest_path, const fs::path& out_dir,
                 FeatureKind kind, std::ostream& out, std::ostream& err) {
  const Manifest m = parse_manifest(manifest_path);
  fs::create_directories(out_dir);
  const fs::path index_path = out_dir / "index.jsonl";

  std::map<std::string, json> previous;
  std::string previous_text;
  if (fs::exists(index_path)) {
    previous_text = read_text(index_path);
    std::istringstream lines(previous_text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      json row = json::parse(line, nullptr, false);
      if (row.is_object() && row.contains("utt_id")) previous[row["utt_id"].get<std::string>()] = row;
    }
  }

  const json config{{"features", s.features}, {"kind", to_string(kind)}};
  const std::string config_dump = config.dump();
  std::string index = json{{"meta", run_metadata("features", s.seed, config)}}.dump() + "\n";
  std::size_t written = 0, current = 0;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& rec : m.records) {
    try {
      const auto bytes = internal::read_file_bytes(m.resolve(rec));
      const std::string hash =
          fnv1a_hex(std::string(bytes.begin(), bytes.end()) + '\n' + config_dump);
      const std::string file = safe_file_stem(rec.utt_id) + ".feat";
      json entry;
      const auto it = previous.find(rec.utt_id);
      if (it != previous.end() && it->second.value("hash", "") == hash &&
          it->second.value("file", "") == file && fs::exists(out_dir / file)) {
        entry = it->second;
        ++current;
      } else {
        const AudioBuffer buf = resample(load_wav(m.resolve(rec)), kStandardSampleRate);
        FeatureMatrix feat = stft_power(buf, s.features);
        if (kind != FeatureKind::kPowerSpec) feat = log_mel(feat, s.features);
        if (kind == FeatureKind::kMfcc) feat = mfcc(feat, s.features);
        write_features(out_dir / file, feat);
        entry = json{{"utt_id", rec.utt_id},
                     {"file", file},
                     {"frames", feat.num_frames()},
                     {"dim", feat.dim()},
                     {"hash", hash}};
        ++written;
      }
      index += entry.dump() + "\n";
    } catch (const Error& e) {
      failures.emplace_back(rec.utt_id, e.what());
    }
  }
  if (index != previous_text) write_text(index_path, index);
  out << "features: " << written << " written, " << current << " up to date, " << failures.size()
      << " failed\n";
  report_failures(err, failures);
  return failures.empty() ? kExitOk : kExitDataFailure;
}

// ------------------------------------------------------------------- train

int cmd_train(const Settings& s, const fs::path& manifest_path, const fs::path& ckpt_path,
              std::optional<fs::path> log_path, std::ostream& out, std::ostream& err) {
  const Manifest m = parse_manifest(manifest_path);
  const TrainingData data = prepare_training_data(m, s.features);
  if (!data.missing_transcript.empty()) {
    WK_LOG(kWarning) << data.missing_transcript.size() << " train row(s) without transcript skipped";
  }
  if (data.examples.empty()) {
    err << "train: no usable training utterances in " << manifest_path.string() << '\n';
    return kExitDataFailure;
  }
  const json config{{"features", s.features}, {"model", s.model}, {"train", s.train}};
  std::string log = json{{"meta", run_metadata("train", s.seed, config)},
                         {"vocabulary", data.vocab.symbols()},
                         {"utterances", data.examples.size()},
                         {"missing_transcript", data.missing_transcript.size()},
                         {"unreadable", data.unreadable.size()}}
                        .dump() +
                    "\n";
  const TrainResult result =
      train(data.examples, static_cast<std::size_t>(data.vocab.num_classes()), s.model, s.train,
            [&](const EpochStats& e) {
              log += json(e).dump() + "\n";
              out << "epoch " << e.epoch << " mean_loss " << e.mean_loss << " lr " << e.lr << '\n';
            });
  log += json{{"summary",
               {{"infeasible", result.skipped},
                {"missing_transcript", data.missing_transcript.size()},
                {"unreadable", data.unreadable.size()},
                {"epochs", result.epochs.size()}}}}
             .dump() +
         "\n";
  if (ckpt_path.has_parent_path()) fs::create_directories(ckpt_path.parent_path());
  save_checkpoint(ckpt_path, Checkpoint{result.params, data.vocab, s.seed});
  fs::path lp = log_path.value_or(fs::path(ckpt_path.string() + ".log.jsonl"));
  write_text(lp, log);
  out << "checkpoint written to " << ckpt_path.string() << " (" << data.examples.size()
      << " utterances, " << result.skipped << " infeasible, " << data.missing_transcript.size()
      << " without transcript)\n";
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& id : data.unreadable) failures.emplace_back(id, "unreadable");
  report_failures(err, failures);
  return failures.empty() ? kExitOk : kExitDataFailure;
}

// ------------------------------------------------------------------ decode

int cmd_decode(const Settings& s, const fs::path& ckpt_path, const fs::path& manifest_path,
               const fs::path& out_path, std::ostream& out, std::ostream& err) {
  const auto ckpt_bytes = internal::read_file_bytes(ckpt_path);
  const Checkpoint ckpt = decode_checkpoint(ckpt_bytes);
  const Manifest m = parse_manifest(manifest_path);
  const json config{{"features", s.features},
                    {"decode", decode_json(s)},
                    {"checkpoint_hash", fnv1a_hex(std::string(ckpt_bytes.begin(), ckpt_bytes.end()))}};
  std::string text = json{{"meta", run_metadata("decode", s.seed, config)}}.dump() + "\n";
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& rec : m.records) {
    try {
      const FeatureMatrix feat = model_features(load_wav(m.resolve(rec)), s.features);
      const Hypothesis hyp = decode(forward(ckpt.params, feat), s.method, s.beam_width);
      text += json{{"utt_id", rec.utt_id},
                   {"hyp_text", ckpt.vocab.decode(hyp.tokens)},
                   {"log_score", hyp.log_score}}
                  .dump() +
              "\n";
    } catch (const Error& e) {
      failures.emplace_back(rec.utt_id, e.what());
    }
  }
  write_text(out_path, text);
  out << "decoded " << m.size() - failures.size() << " utterance(s) with " << to_string(s.method)
      << " search to " << out_path.string() << '\n';
  report_failures(err, failures);
  return failures.empty() ? kExitOk : kExitDataFailure;
}

// ------------------------------------------------------------------- score

struct HypothesisFile {
  std::string method;
  std::map<std::string, std::string> texts;
};

HypothesisFile read_hypotheses(const fs::path& path) {
  HypothesisFile h;
  h.method = path.stem().string();
  std::istringstream lines(read_text(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), n);
    }
    if (row.contains("meta")) {
      const auto& meta = row["meta"];
      if (meta.contains("config") && meta["config"].contains("decode")) {
        h.method = meta["config"]["decode"].value("method", h.method);
      }
      continue;
    }
    if (!row.contains("utt_id") || !row.contains("hyp_text")) {
      throw ParseError(path.string() + ": hypothesis row needs utt_id and hyp_text", n);
    }
    h.texts[row["utt_id"].get<std::string>()] = row["hyp_text"].get<std::string>();
  }
  return h;
}

int cmd_score(const Settings& s, const fs::path& manifest_path, const std::vector<std::string>& hyp_paths,
              const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const Manifest m = parse_manifest(manifest_path);
  std::vector<UtteranceScore> scores;
  json sources = json::array();
  for (const auto& hp : hyp_paths) {
    const HypothesisFile hyps = read_hypotheses(hp);
    std::size_t missing = 0;
    for (const auto& rec : m.records) {
      const auto it = hyps.texts.find(rec.utt_id);
      if (it == hyps.texts.end()) {
        ++missing;
        WK_LOG(kWarning) << "no hypothesis for '" << rec.utt_id << "' in " << hp
                         << ", scored as empty";
      }
      scores.push_back(score_utterance(rec, it == hyps.texts.end() ? "" : it->second, hyps.method));
    }
    if (missing > 0) {
      err << "warning: " << missing << " utterance(s) missing from " << hp
          << "; scored as empty hypotheses\n";
    }
    sources.push_back({{"file", fs::path(hp).filename().string()}, {"method", hyps.method},
                       {"missing", missing}});
  }
  const std::vector<AggregateRow> table = aggregate(scores);
  const json meta = run_metadata("score", s.seed, json{{"hypotheses", sources}});
  fs::create_directories(out_dir);
  write_text(out_dir / "score.json", score_report_json(meta, scores, table).dump(2) + "\n");
  std::ostringstream utt_csv, agg_csv;
  write_utterance_csv(utt_csv, meta, scores);
  write_aggregate_csv(agg_csv, meta, table);
  write_text(out_dir / "utterances.csv", utt_csv.str());
  write_text(out_dir / "aggregate.csv", agg_csv.str());
  std::string alignments;
  for (const auto& sc : scores) alignments += format_alignment(sc) + "\n";
  write_text(out_dir / "alignments.txt", alignments);
  print_score_table(out, table);
  return kExitOk;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const Settings& s, const fs::path& manifest_path, const fs::path& out_dir,
                std::ostream& out, std::ostream& err) {
  const Manifest m = parse_manifest(manifest_path);
  const AnalysisConfig cfg;
  std::vector<AcousticMeasures> rows;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& rec : m.records) {
    try {
      AcousticMeasures meas = measure(load_wav(m.resolve(rec)), cfg);
      meas.utt_id = rec.utt_id;
      meas.speaker_id = rec.speaker_id;
      meas.style = rec.style;
      rows.push_back(std::move(meas));
    } catch (const Error& e) {
      failures.emplace_back(rec.utt_id, e.what());
    }
  }
  const ContrastReport report = style_contrast(rows);
  const json config{{"frame_ms", cfg.frame_ms},
                    {"hop_ms", cfg.hop_ms},
                    {"slope_band_hz", {cfg.slope.fmin_hz, cfg.slope.fmax_hz}},
                    {"pitch_range_hz", {cfg.pitch.f_lo_hz, cfg.pitch.f_hi_hz}}};
  const json meta = run_metadata("analyze", s.seed, config);
  std::ostringstream utt_csv, spk_csv;
  write_measures_csv(utt_csv, meta, rows);
  write_contrast_csv(spk_csv, meta, report);
  fs::create_directories(out_dir);
  write_text(out_dir / "utterances.csv", utt_csv.str());
  write_text(out_dir / "speakers.csv", spk_csv.str());
  out << "analyzed " << rows.size() << " utterance(s); " << report.speakers.size()
      << " speaker contrast(s); " << report.excluded_speakers.size()
      << " single-style speaker(s) excluded\n";
  report_failures(err, failures);
  return failures.empty() ? kExitOk : kExitDataFailure;
}

// ---------------------------------------------------------------- manifest

int cmd_summarize(const Settings& s, const fs::path& manifest_path, std::optional<fs::path> out_path,
                  std::ostream& out) {
  const Manifest m = parse_manifest(manifest_path);
  const auto rows = summarize(m);
  std::ostringstream csv;
  csv << metadata_comment(run_metadata("manifest-summarize", s.seed, json::object()));
  csv << "dataset,style,dialect,split,utterances,speakers,duration_h,unknown_duration\n";
  for (const auto& r : rows) {
    char dur[32];
    std::snprintf(dur, sizeof(dur), "%.4f", r.total_duration_h);
    csv << r.dataset << ',' << to_string(r.style) << ',' << r.dialect << ',' << to_string(r.split) << ','
        << r.n_utterances << ',' << r.n_speakers << ',' << dur << ',' << r.unknown_duration << '\n';
  }
  if (out_path) write_text(*out_path, csv.str());
  out << csv.str();
  return kExitOk;
}

int cmd_split(const Settings& s, const fs::path& manifest_path, const std::string& plan,
              const std::vector<std::string>& rule_texts, const fs::path& out_dir, std::ostream& out) {
  const Manifest m = parse_manifest(manifest_path);
  std::vector<SplitRule> rules;
  if (plan == "paper_replication") {
    rules = paper_replication_rules();
  } else {
    for (const auto& r : rule_texts) rules.push_back(parse_split_rule(r));
    if (rules.empty()) throw InvalidArgument("custom split plan needs at least one --rule");
  }
  const SplitPlanResult parts = split_plan(m, rules);
  const std::string ext = manifest_path.extension() == ".tsv" ? ".tsv" : ".jsonl";
  fs::create_directories(out_dir);
  write_manifest(out_dir / ("train" + ext), parts.train);
  write_manifest(out_dir / ("test" + ext), parts.test);
  out << "split " << m.size() << " record(s): " << parts.train.size() << " train, " << parts.test.size()
      << " test (seed " << s.seed << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"whisperkit: whispered-speech ASR experimentation toolkit"};
  app.require_subcommand(1);
  Flags flags;
  std::string manifest, out_path, checkpoint, kind_name = "log_mel", plan = "paper_replication";
  std::optional<std::string> log_path, summary_out;
  std::vector<std::string> hyp_paths, rules;
  std::size_t n_train = 200, n_test = 50;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "Seed for every random choice");
    sub->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
  };
  auto add_manifest = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "Manifest (.jsonl or .tsv)")->required();
  };

  auto* features = app.add_subcommand("features", "Extract feature files and an index");
  add_manifest(features);
  add_common(features);
  features->add_option("--out", out_path, "Output directory")->required();
  features->add_option("--kind", kind_name, "power_spec | log_mel | mfcc")
      ->check(CLI::IsMember({"power_spec", "log_mel", "mfcc"}));

  auto* train_cmd = app.add_subcommand("train", "Train the acoustic model with CTC and AdamW");
  add_manifest(train_cmd);
  add_common(train_cmd);
  train_cmd->add_option("--out", out_path, "Checkpoint path")->required();
  train_cmd->add_option("--epochs", flags.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", flags.batch_size, "Utterances per batch");
  train_cmd->add_option("--lr", flags.lr, "Peak learning rate");
  train_cmd->add_option("--log", log_path, "Training log (default <checkpoint>.log.jsonl)");

  auto* decode_cmd = app.add_subcommand("decode", "Decode a manifest to hypotheses JSONL");
  add_manifest(decode_cmd);
  add_common(decode_cmd);
  decode_cmd->add_option("--checkpoint", checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--out", out_path, "Hypotheses JSONL")->required();
  decode_cmd->add_option("--method", flags.method, "greedy | beam")->check(CLI::IsMember({"greedy", "beam"}));
  decode_cmd->add_option("--beam-width", flags.beam_width, "Prefix beam width");

  auto* score_cmd = app.add_subcommand("score", "Score hypotheses against a reference manifest");
  add_manifest(score_cmd);
  add_common(score_cmd);
  score_cmd->add_option("--hyps", hyp_paths, "Hypotheses JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", out_path, "Report directory")->required();

  auto* analyze_cmd = app.add_subcommand("analyze", "Whisper/normal acoustic analysis");
  add_manifest(analyze_cmd);
  add_common(analyze_cmd);
  analyze_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* summarize_cmd = app.add_subcommand("manifest-summarize", "Counts per dataset/style/dialect/split");
  add_manifest(summarize_cmd);
  add_common(summarize_cmd);
  summarize_cmd->add_option("--out", summary_out, "Also write the summary CSV here");

  auto* split_cmd = app.add_subcommand("manifest-split", "Partition a manifest into train and test");
  add_manifest(split_cmd);
  add_common(split_cmd);
  split_cmd->add_option("--plan", plan, "paper_replication | custom")
      ->check(CLI::IsMember({"paper_replication", "custom"}));
  split_cmd->add_option("--rule", rules, "field=value[,field=value]->train|test (custom plan)");
  split_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* synth_cmd = app.add_subcommand("synth-dataset", "Build the synthetic three-token corpus");
  add_common(synth_cmd);
  synth_cmd->add_option("--out", out_path, "Output directory")->required();
  synth_cmd->add_option("--n-train", n_train, "Training utterances");
  synth_cmd->add_option("--n-test", n_test, "Test utterances");

  std::vector<const char*> argv{"whisperkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  Settings settings;
  try {
    settings = resolve_settings(flags);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*features) {
      FeatureKind kind = kind_name == "power_spec" ? FeatureKind::kPowerSpec
                         : kind_name == "mfcc"     ? FeatureKind::kMfcc
                                                   : FeatureKind::kLogMel;
      return cmd_features(settings, manifest, out_path, kind, out, err);
    }
    if (*train_cmd) {
      std::optional<fs::path> lp;
      if (log_path) lp = *log_path;
      return cmd_train(settings, manifest, out_path, lp, out, err);
    }
    if (*decode_cmd) return cmd_decode(settings, checkpoint, manifest, out_path, out, err);
    if (*score_cmd) return cmd_score(settings, manifest, hyp_paths, out_path, out, err);
    if (*analyze_cmd) return cmd_analyze(settings, manifest, out_path, out, err);
    if (*summarize_cmd) {
      std::optional<fs::path> sp;
      if (summary_out) sp = *summary_out;
      return cmd_summarize(settings, manifest, sp, out);
    }
    if (*split_cmd) return cmd_split(settings, manifest, plan, rules, out_path, out);
    if (*synth_cmd) {
      SynthConfig cfg;
      cfg.n_train = n_train;
      cfg.n_test = n_test;
      cfg.seed = settings.seed;
      const Manifest m = write_synthetic_corpus(out_path, cfg);
      out << "wrote " << m.size() << " synthetic utterance(s) to " << out_path << '\n';
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataFailure;
  }
  return kExitUsage;
}

}  // namespace whisperkit
