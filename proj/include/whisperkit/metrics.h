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

#ifndef WHISPERKIT_METRICS_H_
#define WHISPERKIT_METRICS_H_

#include <string>
#include <string_view>
#include <vector>

#include "whisperkit/manifest.h"

namespace whisperkit {

enum class EditKind { kMatch, kSubstitute, kInsert, kDelete };

const char* to_string(EditKind kind);

// ref_idx is -1 for insertions, hyp_idx is -1 for deletions.
struct EditOp {
  EditKind kind = EditKind::kMatch;
  int ref_idx = -1;
  int hyp_idx = -1;
  bool operator==(const EditOp&) const = default;
};

struct EditCounts {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  EditCounts& operator+=(const EditCounts& o);
  bool operator==(const EditCounts&) const = default;
};

struct AlignmentOps {
  std::vector<EditOp> ops;
  EditCounts counts;
  std::size_t distance() const { return counts.errors(); }
};

// Minimum unit-cost alignment. Among equally cheap backtraces the diagonal
// (match/substitution) is preferred, then insertion, then deletion.
AlignmentOps edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

// Rebuilds the hypothesis from the reference by applying the ops.
std::vector<std::string> replay(const AlignmentOps& alignment, const std::vector<std::string>& ref,
                                const std::vector<std::string>& hyp);

// Scoring units after normalize_text: words, or characters with single
// spaces counted as characters.
std::vector<std::string> word_units(std::string_view text);
std::vector<std::string> char_units(std::string_view text);

// Pooled corpus error rate: 100 * sum(S + D + I) / sum(N_ref).
struct CorpusScore {
  EditCounts counts;
  std::size_t utterances = 0;
  std::size_t rejected = 0;  // empty references, excluded from the pool
  double percent() const;
};

// Word error rate over paired token lists. Throws InvalidArgument when the
// lists differ in length. Empty references are rejected and counted.
CorpusScore wer(const std::vector<std::vector<std::string>>& refs,
                const std::vector<std::vector<std::string>>& hyps);

// Character error rate over raw texts; both sides are normalized first.
CorpusScore cer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

struct UtteranceScore {
  std::string utt_id;
  Style style = Style::kNormal;
  std::string dialect;
  std::string method;
  AlignmentOps words;
  AlignmentOps chars;
  std::vector<std::string> ref_words;
  std::vector<std::string> hyp_words;
  double wer_percent() const;
};

UtteranceScore score_utterance(const UtteranceRecord& rec, std::string_view hyp_text,
                               const std::string& method);

struct AggregateRow {
  Style style = Style::kNormal;
  std::string dialect;
  std::string method;
  std::size_t utterances = 0;
  std::size_t rejected = 0;
  EditCounts words;
  EditCounts chars;
  double wer_percent() const;
  double cer_percent() const;
};

// One pooled row per (style, dialect, method), sorted by that key.
std::vector<AggregateRow> aggregate(const std::vector<UtteranceScore>& results);

}  // namespace whisperkit

#endif  // WHISPERKIT_METRICS_H_
