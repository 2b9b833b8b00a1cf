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

#ifndef WHISPERKIT_DECODE_H_
#define WHISPERKIT_DECODE_H_

#include <string>

#include "whisperkit/ctc.h"

namespace whisperkit {

struct Hypothesis {
  TokenSeq tokens;
  // Greedy: log-probability of the best path. Beam: log of the prefix's
  // accumulated label marginal (blank + non-blank ending mass).
  double log_score = 0.0;
};

enum class DecodeMethod { kGreedy, kBeam };

const char* to_string(DecodeMethod method);
// Throws InvalidArgument for anything but "greedy" or "beam".
DecodeMethod decode_method_from_string(const std::string& name);

inline constexpr int kDefaultBeamWidth = 16;

// collapse(row-wise argmax); ties go to the lowest token id, so blank wins
// any tie it is part of.
Hypothesis greedy_decode(const EmissionMatrix& em);

// CTC prefix beam search. Duplicate prefixes merge by log-sum-exp; after
// each frame the beam_width prefixes with the largest total mass survive,
// ties resolved toward the lexicographically smallest prefix. Throws
// InvalidArgument for beam_width < 1.
Hypothesis beam_decode(const EmissionMatrix& em, int beam_width = kDefaultBeamWidth);

Hypothesis decode(const EmissionMatrix& em, DecodeMethod method,
                  int beam_width = kDefaultBeamWidth);

}  // namespace whisperkit

#endif  // WHISPERKIT_DECODE_H_
