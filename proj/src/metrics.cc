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

#include "whisperkit/metrics.h"

#include <algorithm>
#include <map>
#include <tuple>

#include "whisperkit/ctc.h"
#include "whisperkit/error.h"
#include "whisperkit/text.h"

namespace whisperkit {

const char* to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kInsert: return "insert";
    case EditKind::kDelete: return "delete";
  }
  return "?";
}

EditCounts& EditCounts::operator+=(const EditCounts& o) {
  matches += o.matches;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_length += o.ref_length;
  return *this;
}

AlignmentOps edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  AlignmentOps out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        out.ops.push_back({same ? EditKind::kMatch : EditKind::kSubstitute, static_cast<int>(i - 1),
                           static_cast<int>(j - 1)});
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      out.ops.push_back({EditKind::kInsert, -1, static_cast<int>(j - 1)});
      --j;
    } else {
      out.ops.push_back({EditKind::kDelete, static_cast<int>(i - 1), -1});
      --i;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  out.counts.ref_length = n;
  for (const auto& op : out.ops) {
    switch (op.kind) {
      case EditKind::kMatch: ++out.counts.matches; break;
      case EditKind::kSubstitute: ++out.counts.substitutions; break;
      case EditKind::kInsert: ++out.counts.insertions; break;
      case EditKind::kDelete: ++out.counts.deletions; break;
    }
  }
  return out;
}

std::vector<std::string> replay(const AlignmentOps& alignment, const std::vector<std::string>& ref,
                                const std::vector<std::string>& hyp) {
  std::vector<std::string> out;
  for (const auto& op : alignment.ops) {
    switch (op.kind) {
      case EditKind::kMatch: out.push_back(ref.at(static_cast<std::size_t>(op.ref_idx))); break;
      case EditKind::kSubstitute:
      case EditKind::kInsert: out.push_back(hyp.at(static_cast<std::size_t>(op.hyp_idx))); break;
      case EditKind::kDelete: break;
    }
  }
  return out;
}

std::vector<std::string> word_units(std::string_view text) {
  return split_words(normalize_text(text));
}

std::vector<std::string> char_units(std::string_view text) {
  return utf8_code_points(normalize_text(text));
}

double CorpusScore::percent() const {
  if (counts.ref_length == 0) return 0.0;
  return 100.0 * static_cast<double>(counts.errors()) / static_cast<double>(counts.ref_length);
}

CorpusScore wer(const std::vector<std::vector<std::string>>& refs,
                const std::vector<std::vector<std::string>>& hyps) {
  if (refs.size() != hyps.size()) {
    throw InvalidArgument("wer: " + std::to_string(refs.size()) + " references but " +
                          std::to_string(hyps.size()) + " hypotheses");
  }
  CorpusScore score;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].empty()) {
      ++score.rejected;
      continue;
    }
    score.counts += edit_distance(refs[i], hyps[i]).counts;
    ++score.utterances;
  }
  return score;
}

CorpusScore cer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  if (refs.size() != hyps.size()) {
    throw InvalidArgument("cer: " + std::to_string(refs.size()) + " references but " +
                          std::to_string(hyps.size()) + " hypotheses");
  }
  std::vector<std::vector<std::string>> r, h;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    r.push_back(char_units(refs[i]));
    h.push_back(char_units(hyps[i]));
  }
  return wer(r, h);
}

double UtteranceScore::wer_percent() const {
  if (words.counts.ref_length == 0) return 0.0;
  return 100.0 * static_cast<double>(words.counts.errors()) /
         static_cast<double>(words.counts.ref_length);
}

UtteranceScore score_utterance(const UtteranceRecord& rec, std::string_view hyp_text,
                               const std::string& method) {
  UtteranceScore s;
  s.utt_id = rec.utt_id;
  s.style = rec.style;
  s.dialect = rec.dialect;
  s.method = method;
  s.ref_words = word_units(rec.transcript);
  s.hyp_words = word_units(hyp_text);
  s.words = edit_distance(s.ref_words, s.hyp_words);
  s.chars = edit_distance(char_units(rec.transcript), char_units(hyp_text));
  return s;
}

double AggregateRow::wer_percent() const {
  return words.ref_length ? 100.0 * static_cast<double>(words.errors()) / static_cast<double>(words.ref_length)
                          : 0.0;
}

double AggregateRow::cer_percent() const {
  return chars.ref_length ? 100.0 * static_cast<double>(chars.errors()) / static_cast<double>(chars.ref_length)
                          : 0.0;
}

std::vector<AggregateRow> aggregate(const std::vector<UtteranceScore>& results) {
  std::map<std::tuple<int, std::string, std::string>, AggregateRow> rows;
  for (const auto& r : results) {
    AggregateRow& row = rows[{static_cast<int>(r.style), r.dialect, r.method}];
    row.style = r.style;
    row.dialect = r.dialect;
    row.method = r.method;
    if (r.words.counts.ref_length == 0) {
      ++row.rejected;
      continue;
    }
    ++row.utterances;
    row.words += r.words.counts;
    row.chars += r.chars.counts;
  }
  std::vector<AggregateRow> out;
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  return out;
}

}  // namespace whisperkit
