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

#ifndef WHISPERKIT_REPORT_H_
#define WHISPERKIT_REPORT_H_

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "whisperkit/acoustics.h"
#include "whisperkit/metrics.h"

namespace whisperkit {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Published WER%/CER% for the whispered-speech benchmark this toolkit is
// modeled on. Shown beside local results for context only; nothing here
// is reproduced or asserted by the toolkit.
struct ReferenceResult {
  const char* system;
  const char* condition;
  double wer_percent;
  double cer_percent;
};

inline constexpr std::array<ReferenceResult, 4> kPublishedReference = {{
    {"Whisper large-v2 baseline (no fine-tuning)", "normal speech", 16.69, 3.81},
    {"Whisper large-v2 baseline (no fine-tuning)", "whispered speech", 18.80, 4.24},
    {"WavLM Base+ fine-tuned", "whispered speech, greedy search", 9.28, 2.60},
    {"WavLM Base+ fine-tuned", "whispered speech, beam search", 9.22, 2.59},
}};

inline constexpr const char* kReferenceLabel = "published reference (not reproduced here)";

inline constexpr const char* kNormalizationNote =
    "lowercase; punctuation removed except apostrophes; whitespace collapsed; "
    "CER counts single spaces as characters; WER/CER pooled over utterances";

// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

// Header block embedded in every output: toolkit version, command, seed,
// the effective config and its hash.
nlohmann::json run_metadata(const std::string& command, std::uint64_t seed,
                            const nlohmann::json& config);

// The same block as "# key=value" comment lines for CSV outputs.
std::string metadata_comment(const nlohmann::json& meta);

nlohmann::json reference_json();

// Full score report: metadata, normalization note, per-utterance rows,
// pooled aggregate table and the reference block.
nlohmann::json score_report_json(const nlohmann::json& meta,
                                 const std::vector<UtteranceScore>& scores,
                                 const std::vector<AggregateRow>& table);

// Per-utterance CSV: utt_id,method,S,D,I,N,wer,char_S,char_D,char_I,char_N,cer.
void write_utterance_csv(std::ostream& out, const nlohmann::json& meta,
                         const std::vector<UtteranceScore>& scores);
// style,dialect,method,utterances,rejected,words,wer,chars,cer, followed by
// the reference rows as comments.
void write_aggregate_csv(std::ostream& out, const nlohmann::json& meta,
                         const std::vector<AggregateRow>& table);

// Human-readable summary table with the reference block underneath.
void print_score_table(std::ostream& out, const std::vector<AggregateRow>& table);

// sclite-style REF/HYP/EVAL lines with columns padded to equal width;
// "***" marks the empty side of an insertion or deletion.
std::string format_alignment(const UtteranceScore& score);

// utt_id,style,mean_dB,slope,periodicity
void write_measures_csv(std::ostream& out, const nlohmann::json& meta,
                        const std::vector<AcousticMeasures>& rows);
// speaker_id,n_normal,n_whisper,delta_dB,delta_slope,delta_periodicity;
// excluded speakers are listed in a trailing comment.
void write_contrast_csv(std::ostream& out, const nlohmann::json& meta, const ContrastReport& report);

}  // namespace whisperkit

#endif  // WHISPERKIT_REPORT_H_
