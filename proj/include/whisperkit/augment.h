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

#ifndef WHISPERKIT_AUGMENT_H_
#define WHISPERKIT_AUGMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "whisperkit/features.h"
#include "json.hpp"

namespace whisperkit {

// What replaces a masked frame.
enum class MaskFill {
  kZeros,
  kUtteranceMean,  // per-dimension mean over the unmasked frames
};

struct MaskInterval {
  std::size_t start = 0;
  std::size_t width = 0;
  bool operator==(const MaskInterval&) const = default;
};

// A set of masked frame indices, stored as possibly overlapping intervals.
struct MaskSpec {
  std::vector<MaskInterval> intervals;
  MaskFill fill = MaskFill::kUtteranceMean;

  // Sorted, overlap-free, zero-width intervals dropped; adjacent intervals
  // are merged.
  std::vector<MaskInterval> normalized() const;
  // Number of distinct masked frames.
  std::size_t masked_frames() const;
  bool operator==(const MaskSpec&) const = default;
};

// Time-masking policy. Frequency masking is off unless n_freq_masks > 0.
struct AugmentConfig {
  int n_time_masks = 2;
  int max_time_width = 10;
  MaskFill fill = MaskFill::kUtteranceMean;
  int n_freq_masks = 0;
  int max_freq_width = 0;
};

// Draws n_masks intervals: width uniform in [0, max_width], then start
// uniform in [0, num_frames - width]. Throws InvalidArgument when
// max_width > num_frames.
MaskSpec sample_time_masks(std::size_t num_frames, int n_masks, int max_width,
                           std::uint64_t seed, MaskFill fill = MaskFill::kUtteranceMean);

// Replaces masked rows by the fill value; every other row is copied
// unchanged. Throws InvalidArgument for intervals outside [0, T).
FeatureMatrix apply_masks(const FeatureMatrix& feat, const MaskSpec& spec);

// Same interval sampling over the feature axis (columns).
MaskSpec sample_freq_masks(std::size_t dim, int n_masks, int max_width, std::uint64_t seed);
// Zeroes (or mean-fills, per column) the masked feature columns.
FeatureMatrix apply_freq_masks(const FeatureMatrix& feat, const MaskSpec& spec);

// Applies the configured time (and optional frequency) masks. max widths are
// clamped to the utterance size so short utterances stay valid.
FeatureMatrix augment(const FeatureMatrix& feat, const AugmentConfig& cfg, std::uint64_t seed);

const char* to_string(MaskFill fill);
MaskFill mask_fill_from_string(const std::string& name);

void to_json(nlohmann::json& j, const MaskSpec& spec);
void from_json(const nlohmann::json& j, MaskSpec& spec);
void to_json(nlohmann::json& j, const AugmentConfig& cfg);
void from_json(const nlohmann::json& j, AugmentConfig& cfg);

}  // namespace whisperkit

#endif  // WHISPERKIT_AUGMENT_H_
