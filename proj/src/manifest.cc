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

#include "whisperkit/manifest.h"

#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "binary_io.h"
#include "json.hpp"
#include "whisperkit/audio.h"
#include "whisperkit/error.h"

namespace whisperkit {
namespace {

using nlohmann::json;

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names = {"utt_id",     "audio_path", "transcript",
                                                 "speaker_id", "style",      "dialect",
                                                 "split"};
  return names;
}

UtteranceRecord record_from_fields(const std::vector<std::string>& f, std::size_t line) {
  UtteranceRecord rec;
  rec.utt_id = f[0];
  rec.audio_path = f[1];
  rec.transcript = f[2];
  rec.speaker_id = f[3];
  const auto style = style_from_string(f[4]);
  if (!style) throw ParseError("unknown style '" + f[4] + "' (expected normal or whisper)", line);
  rec.style = *style;
  rec.dialect = f[5];
  const auto split = split_from_string(f[6]);
  if (!split) throw ParseError("unknown split '" + f[6] + "' (expected train or test)", line);
  rec.split = *split;
  if (rec.utt_id.empty()) throw ParseError("empty utt_id", line);
  if (rec.audio_path.empty()) throw ParseError("empty audio_path", line);
  return rec;
}

std::vector<std::string> fields_from_json(const std::string& text, std::size_t line) {
  json row;
  try {
    row = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line);
  }
  if (!row.is_object()) throw ParseError("row is not a JSON object", line);
  std::vector<std::string> fields;
  for (const auto& name : column_names()) {
    const auto it = row.find(name);
    if (it == row.end() || it->is_null()) {
      // An absent transcript is tolerated so training can skip and count it.
      if (name == "transcript") {
        fields.emplace_back();
        continue;
      }
      throw ParseError("missing field '" + name + "'", line);
    }
    if (!it->is_string()) throw ParseError("field '" + name + "' is not a string", line);
    fields.push_back(it->get<std::string>());
  }
  return fields;
}

std::vector<std::string> fields_from_tsv(const std::string& text, std::size_t line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = text.find('\t', start);
    fields.push_back(text.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (fields.size() != column_names().size()) {
    throw ParseError("expected " + std::to_string(column_names().size()) + " tab-separated columns, got " +
                         std::to_string(fields.size()),
                     line);
  }
  return fields;
}

bool is_tsv_path(const std::filesystem::path& path) { return path.extension() == ".tsv"; }

std::string field_value(const UtteranceRecord& rec, const std::string& field) {
  if (field == "utt_id") return rec.utt_id;
  if (field == "speaker_id") return rec.speaker_id;
  if (field == "style") return to_string(rec.style);
  if (field == "dialect") return rec.dialect;
  if (field == "split") return to_string(rec.split);
  throw InvalidArgument("split rule: unknown field '" + field + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(Style style) { return style == Style::kNormal ? "normal" : "whisper"; }
const char* to_string(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::optional<Style> style_from_string(const std::string& name) {
  if (name == "normal") return Style::kNormal;
  if (name == "whisper") return Style::kWhisper;
  return std::nullopt;
}

std::optional<Split> split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

std::filesystem::path Manifest::resolve(const UtteranceRecord& rec) const {
  const std::filesystem::path p(rec.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Manifest parse_manifest_text(const std::string& text, bool tsv, std::string provenance) {
  Manifest m;
  m.provenance = std::move(provenance);
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string line_text;
  std::size_t line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text.find_first_not_of(" \t") == std::string::npos) continue;
    if (tsv && line == 1 && line_text.rfind("utt_id\t", 0) == 0) continue;
    const auto fields = tsv ? fields_from_tsv(line_text, line) : fields_from_json(line_text, line);
    UtteranceRecord rec = record_from_fields(fields, line);
    if (!seen.insert(rec.utt_id).second) throw ParseError("duplicate utt_id '" + rec.utt_id + "'", line);
    m.records.push_back(std::move(rec));
  }
  return m;
}

Manifest parse_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such manifest: " + path.string());
  const auto bytes = internal::read_file_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  try {
    Manifest m = parse_manifest_text(text, is_tsv_path(path), path.stem().string());
    m.base_dir = path.parent_path();
    return m;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

std::string to_jsonl(const Manifest& m) {
  std::string out;
  for (const auto& r : m.records) {
    // Keys in the documented column order.
    out += "{\"utt_id\":" + json(r.utt_id).dump() + ",\"audio_path\":" + json(r.audio_path).dump() +
           ",\"transcript\":" + json(r.transcript).dump() + ",\"speaker_id\":" +
           json(r.speaker_id).dump() + ",\"style\":" + json(to_string(r.style)).dump() +
           ",\"dialect\":" + json(r.dialect).dump() + ",\"split\":" + json(to_string(r.split)).dump() +
           "}\n";
  }
  return out;
}

std::string to_tsv(const Manifest& m) {
  std::string out;
  for (std::size_t i = 0; i < column_names().size(); ++i) {
    out += (i ? "\t" : "") + column_names()[i];
  }
  out += '\n';
  for (const auto& r : m.records) {
    for (const std::string* f : {&r.utt_id, &r.audio_path, &r.transcript, &r.speaker_id}) {
      if (f->find_first_of("\t\n") != std::string::npos) {
        throw InvalidArgument("to_tsv: field of '" + r.utt_id + "' contains a tab or newline");
      }
    }
    out += r.utt_id + '\t' + r.audio_path + '\t' + r.transcript + '\t' + r.speaker_id + '\t' +
           to_string(r.style) + '\t' + r.dialect + '\t' + to_string(r.split) + '\n';
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  internal::write_file_atomic(path, is_tsv_path(path) ? to_tsv(m) : to_jsonl(m));
}

std::vector<std::string> missing_audio(const Manifest& m) {
  std::vector<std::string> missing;
  for (const auto& r : m.records) {
    if (!std::filesystem::exists(m.resolve(r))) missing.push_back(r.utt_id);
  }
  return missing;
}

std::vector<SummaryRow> summarize(const Manifest& m) {
  using Key = std::tuple<std::string, int, std::string, int>;
  std::map<Key, SummaryRow> rows;
  std::map<Key, std::set<std::string>> speakers;
  for (const auto& r : m.records) {
    const Key key{m.provenance, static_cast<int>(r.style), r.dialect, static_cast<int>(r.split)};
    SummaryRow& row = rows[key];
    row.dataset = m.provenance;
    row.style = r.style;
    row.dialect = r.dialect;
    row.split = r.split;
    ++row.n_utterances;
    speakers[key].insert(r.speaker_id);
    try {
      row.total_duration_h += read_wav_info(m.resolve(r)).duration_s() / 3600.0;
    } catch (const IoError&) {
      ++row.unknown_duration;
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [key, row] : rows) {
    row.n_speakers = speakers[key].size();
    out.push_back(row);
  }
  return out;
}

SplitRule parse_split_rule(const std::string& text) {
  std::string body = text;
  std::size_t arrow = body.find("->");
  std::size_t arrow_len = 2;
  if (arrow == std::string::npos) {
    arrow = body.find("\xE2\x86\x92");  // U+2192
    arrow_len = 3;
  }
  if (arrow == std::string::npos) throw InvalidArgument("split rule '" + text + "': missing '->'");
  SplitRule rule;
  const auto dest = split_from_string(trim(body.substr(arrow + arrow_len)));
  if (!dest) throw InvalidArgument("split rule '" + text + "': destination must be train or test");
  rule.destination = *dest;
  std::stringstream conds(body.substr(0, arrow));
  std::string cond;
  while (std::getline(conds, cond, ',')) {
    const auto eq = cond.find('=');
    if (eq == std::string::npos) throw InvalidArgument("split rule '" + text + "': condition needs '='");
    std::string field = trim(cond.substr(0, eq));
    field_value(UtteranceRecord{}, field);  // validates the field name
    rule.conditions.emplace_back(std::move(field), trim(cond.substr(eq + 1)));
  }
  if (rule.conditions.empty()) throw InvalidArgument("split rule '" + text + "': no conditions");
  return rule;
}

std::vector<SplitRule> paper_replication_rules() {
  return {
      {{{"dialect", "Singaporean"}, {"style", "whisper"}}, Split::kTrain},
      {{{"dialect", "Singaporean"}, {"style", "normal"}}, Split::kTrain},
      {{{"dialect", "Irish"}, {"style", "normal"}}, Split::kTrain},
      {{{"dialect", "Irish"}, {"style", "whisper"}}, Split::kTest},
  };
}

SplitPlanResult split_plan(const Manifest& m, const std::vector<SplitRule>& rules) {
  SplitPlanResult out;
  for (Manifest* part : {&out.train, &out.test}) {
    part->provenance = m.provenance;
    part->base_dir = m.base_dir;
  }
  for (const auto& r : m.records) {
    const SplitRule* match = nullptr;
    for (const auto& rule : rules) {
      bool ok = true;
      for (const auto& [field, value] : rule.conditions) {
        if (field_value(r, field) != value) {
          ok = false;
          break;
        }
      }
      if (ok) {
        match = &rule;
        break;
      }
    }
    if (match == nullptr) {
      throw InvalidArgument("split_plan: record '" + r.utt_id + "' (style " + to_string(r.style) +
                            ", dialect " + r.dialect + ") matches no rule");
    }
    UtteranceRecord routed = r;
    routed.split = match->destination;
    (match->destination == Split::kTrain ? out.train : out.test).records.push_back(std::move(routed));
  }
  return out;
}

}  // namespace whisperkit
