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

#include "whisperkit/report.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>

namespace whisperkit {
namespace {

using nlohmann::json;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json run_metadata(const std::string& command, std::uint64_t seed, const json& config) {
  return json{{"tool", "whisperkit"},
              {"version", kToolkitVersion},
              {"command", command},
              {"seed", seed},
              {"config_hash", fnv1a_hex(config.dump())},
              {"config", config}};
}

std::string metadata_comment(const json& meta) {
  std::string out;
  out += "# tool=" + meta.value("tool", std::string("whisperkit")) + " version=" +
         meta.value("version", std::string(kToolkitVersion)) + "\n";
  out += "# command=" + meta.value("command", std::string()) + " seed=" +
         std::to_string(meta.value("seed", std::uint64_t{0})) + " config_hash=" +
         meta.value("config_hash", std::string()) + "\n";
  if (meta.contains("config")) out += "# config=" + meta.at("config").dump() + "\n";
  return out;
}

json reference_json() {
  json rows = json::array();
  for (const auto& r : kPublishedReference) {
    rows.push_back({{"system", r.system},
                    {"condition", r.condition},
                    {"wer_percent", r.wer_percent},
                    {"cer_percent", r.cer_percent}});
  }
  return json{{"label", kReferenceLabel}, {"rows", rows}};
}

json score_report_json(const json& meta, const std::vector<UtteranceScore>& scores,
                       const std::vector<AggregateRow>& table) {
  json utts = json::array();
  for (const auto& s : scores) {
    const auto& w = s.words.counts;
    const auto& c = s.chars.counts;
    utts.push_back({{"utt_id", s.utt_id},
                    {"method", s.method},
                    {"S", w.substitutions},
                    {"D", w.deletions},
                    {"I", w.insertions},
                    {"N", w.ref_length},
                    {"wer", s.wer_percent()},
                    {"char_S", c.substitutions},
                    {"char_D", c.deletions},
                    {"char_I", c.insertions},
                    {"char_N", c.ref_length}});
  }
  json agg = json::array();
  for (const auto& row : table) {
    agg.push_back({{"style", to_string(row.style)},
                   {"dialect", row.dialect},
                   {"method", row.method},
                   {"utterances", row.utterances},
                   {"rejected", row.rejected},
                   {"words", row.words.ref_length},
                   {"word_errors", row.words.errors()},
                   {"wer_percent", row.wer_percent()},
                   {"chars", row.chars.ref_length},
                   {"char_errors", row.chars.errors()},
                   {"cer_percent", row.cer_percent()}});
  }
  return json{{"meta", meta},
              {"normalization", kNormalizationNote},
              {"per_utterance", utts},
              {"aggregate", agg},
              {"reference", reference_json()}};
}

void write_utterance_csv(std::ostream& out, const json& meta, const std::vector<UtteranceScore>& scores) {
  out << metadata_comment(meta);
  out << "utt_id,method,S,D,I,N,wer,char_S,char_D,char_I,char_N,cer\n";
  for (const auto& s : scores) {
    const auto& w = s.words.counts;
    const auto& c = s.chars.counts;
    const double cer =
        c.ref_length ? 100.0 * static_cast<double>(c.errors()) / static_cast<double>(c.ref_length) : 0.0;
    out << s.utt_id << ',' << s.method << ',' << w.substitutions << ',' << w.deletions << ','
        << w.insertions << ',' << w.ref_length << ',' << fixed(s.wer_percent()) << ','
        << c.substitutions << ',' << c.deletions << ',' << c.insertions << ',' << c.ref_length << ','
        << fixed(cer) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const json& meta, const std::vector<AggregateRow>& table) {
  out << metadata_comment(meta);
  out << "# normalization: " << kNormalizationNote << '\n';
  out << "style,dialect,method,utterances,rejected,words,wer,chars,cer\n";
  for (const auto& row : table) {
    out << to_string(row.style) << ',' << row.dialect << ',' << row.method << ',' << row.utterances
        << ',' << row.rejected << ',' << row.words.ref_length << ',' << fixed(row.wer_percent()) << ','
        << row.chars.ref_length << ',' << fixed(row.cer_percent()) << '\n';
  }
  out << "# " << kReferenceLabel << '\n';
  for (const auto& r : kPublishedReference) {
    out << "# " << r.system << " | " << r.condition << " | WER " << fixed(r.wer_percent) << " | CER "
        << fixed(r.cer_percent) << '\n';
  }
}

void print_score_table(std::ostream& out, const std::vector<AggregateRow>& table) {
  out << std::left << std::setw(9) << "style" << std::setw(14) << "dialect" << std::setw(9) << "method"
      << std::right << std::setw(7) << "utts" << std::setw(9) << "WER%" << std::setw(9) << "CER%" << '\n';
  for (const auto& row : table) {
    out << std::left << std::setw(9) << to_string(row.style) << std::setw(14) << row.dialect
        << std::setw(9) << row.method << std::right << std::setw(7) << row.utterances << std::setw(9)
        << fixed(row.wer_percent()) << std::setw(9) << fixed(row.cer_percent()) << '\n';
  }
  out << '\n' << kReferenceLabel << ":\n";
  for (const auto& r : kPublishedReference) {
    out << "  " << r.system << ", " << r.condition << ": WER " << fixed(r.wer_percent) << "  CER "
        << fixed(r.cer_percent) << '\n';
  }
}

std::string format_alignment(const UtteranceScore& score) {
  std::string ref_line = "REF: ", hyp_line = "HYP: ", eval_line = "EVAL:";
  eval_line += ' ';
  for (const auto& op : score.words.ops) {
    std::string r = op.ref_idx >= 0 ? score.ref_words[static_cast<std::size_t>(op.ref_idx)] : "***";
    std::string h = op.hyp_idx >= 0 ? score.hyp_words[static_cast<std::size_t>(op.hyp_idx)] : "***";
    std::string e;
    switch (op.kind) {
      case EditKind::kMatch: break;
      case EditKind::kSubstitute: e = "S"; break;
      case EditKind::kInsert: e = "I"; break;
      case EditKind::kDelete: e = "D"; break;
    }
    if (op.kind != EditKind::kMatch) {
      // Errors are upper-cased, as sclite does.
      for (auto* s : {&r, &h}) {
        if (*s != "***") std::transform(s->begin(), s->end(), s->begin(), ::toupper);
      }
    }
    const std::size_t width = std::max({r.size(), h.size(), e.size()});
    r.resize(width, ' ');
    h.resize(width, ' ');
    e.resize(width, ' ');
    ref_line += r + ' ';
    hyp_line += h + ' ';
    eval_line += e + ' ';
  }
  const auto& c = score.words.counts;
  std::string out = "id: " + score.utt_id + " (" + score.method + ")\n";
  out += "Scores: (#C #S #D #I) " + std::to_string(c.matches) + ' ' + std::to_string(c.substitutions) +
         ' ' + std::to_string(c.deletions) + ' ' + std::to_string(c.insertions) + '\n';
  for (auto* line : {&ref_line, &hyp_line, &eval_line}) {
    while (!line->empty() && line->back() == ' ') line->pop_back();
    out += *line + '\n';
  }
  return out;
}

void write_measures_csv(std::ostream& out, const json& meta, const std::vector<AcousticMeasures>& rows) {
  out << metadata_comment(meta);
  out << "utt_id,style,mean_dB,slope,periodicity\n";
  for (const auto& r : rows) {
    out << r.utt_id << ',' << to_string(r.style) << ',' << general(r.mean_intensity_db) << ','
        << general(r.slope_db_per_khz) << ',' << general(r.periodicity) << '\n';
  }
}

void write_contrast_csv(std::ostream& out, const json& meta, const ContrastReport& report) {
  out << metadata_comment(meta);
  out << "speaker_id,n_normal,n_whisper,delta_dB,delta_slope,delta_periodicity\n";
  for (const auto& c : report.speakers) {
    out << c.speaker_id << ',' << c.n_normal << ',' << c.n_whisper << ',' << general(c.delta_intensity_db)
        << ',' << general(c.delta_slope) << ',' << general(c.delta_periodicity) << '\n';
  }
  out << "# excluded_single_style_speakers=" << report.excluded_speakers.size();
  for (const auto& s : report.excluded_speakers) out << ' ' << s;
  out << '\n';
}

}  // namespace whisperkit
