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

#ifndef WHISPERKIT_MANIFEST_H_
#define WHISPERKIT_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace whisperkit {

enum class Style { kNormal, kWhisper };
enum class Split { kTrain, kTest };

const char* to_string(Style style);
const char* to_string(Split split);
std::optional<Style> style_from_string(const std::string& name);
std::optional<Split> split_from_string(const std::string& name);

struct UtteranceRecord {
  std::string utt_id;
  std::string audio_path;
  std::string transcript;  // may be empty; consumers decide whether to skip
  std::string speaker_id;
  Style style = Style::kNormal;
  std::string dialect;
  Split split = Split::kTrain;

  bool operator==(const UtteranceRecord&) const = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  std::string provenance;           // source description, e.g. the file stem
  std::filesystem::path base_dir;   // relative audio paths resolve against this

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::filesystem::path resolve(const UtteranceRecord& rec) const;
};

// Reads JSON lines (.jsonl, .json) or TSV (.tsv) by extension. TSV columns
// follow the JSONL field order; a leading header row is accepted. Throws
// ParseError (with the 1-based line) for malformed rows, unknown style or
// split values and duplicate utt_ids; IoError when the file is unreadable.
Manifest parse_manifest(const std::filesystem::path& path);

// Parses in-memory text; `tsv` picks the format.
Manifest parse_manifest_text(const std::string& text, bool tsv, std::string provenance = {});

std::string to_jsonl(const Manifest& m);
std::string to_tsv(const Manifest& m);
// Format by extension, written atomically.
void write_manifest(const std::filesystem::path& path, const Manifest& m);

// Records whose audio file is missing at check time.
std::vector<std::string> missing_audio(const Manifest& m);

struct SummaryRow {
  std::string dataset;
  Style style = Style::kNormal;
  std::string dialect;
  Split split = Split::kTrain;
  std::size_t n_utterances = 0;
  std::size_t n_speakers = 0;
  double total_duration_h = 0.0;     // over rows with a readable header
  std::size_t unknown_duration = 0;  // rows whose header could not be read
};

// One row per (dataset, style, dialect, split), sorted by that key. The
// dataset column is the manifest provenance. Durations come from WAV headers.
std::vector<SummaryRow> summarize(const Manifest& m);

// Routes a record to `destination` when every (field, value) condition
// holds. Fields: utt_id, speaker_id, style, dialect, split.
struct SplitRule {
  std::vector<std::pair<std::string, std::string>> conditions;
  Split destination = Split::kTrain;
};

// Parses "field=value[,field=value...]->train|test"; "→" may replace "->".
// Throws InvalidArgument on bad syntax or an unknown field.
SplitRule parse_split_rule(const std::string& text);

// The corpus usage table: Singaporean (wTIMIT) whisper and normal plus
// Irish (CHAINS) normal are training data; Irish whisper is the test set.
std::vector<SplitRule> paper_replication_rules();

struct SplitPlanResult {
  Manifest train;
  Manifest test;
};

// Partitions the manifest; the first matching rule wins. Records keep their
// fields except `split`, which becomes the destination. Throws
// InvalidArgument naming the first record that matches no rule.
SplitPlanResult split_plan(const Manifest& m, const std::vector<SplitRule>& rules);

}  // namespace whisperkit

#endif  // WHISPERKIT_MANIFEST_H_
