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

#ifndef WHISPERKIT_SYNTH_H_
#define WHISPERKIT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "whisperkit/audio.h"
#include "whisperkit/manifest.h"

namespace whisperkit {

// Synthetic corpus over three tokens, each rendered as its own acoustic
// event: 'v' a harmonic burst (voiced proxy), 'w' a noise burst (whisper
// proxy) and 's' a silence gap. Transcripts never repeat a token back to
// back and never start or end with 's', so every event boundary is audible.
struct SynthConfig {
  std::size_t n_train = 200;
  std::size_t n_test = 50;
  int min_tokens = 3;
  int max_tokens = 6;
  double min_event_s = 0.10;
  double max_event_s = 0.18;
  // Noise floor alone before the first and after the last event.
  double edge_pad_s = 0.05;
  int n_speakers = 10;
  std::uint64_t seed = 0;
};

struct SynthUtterance {
  std::string transcript;
  AudioBuffer audio;
};

// One utterance drawn from `seed`; whisper style halves the overall gain.
SynthUtterance synth_utterance(const SynthConfig& cfg, std::uint64_t seed, Style style);

// Writes audio/<utt_id>.wav plus train.jsonl, test.jsonl and all.jsonl under
// `out_dir`; returns the combined manifest.
Manifest write_synthetic_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg);

}  // namespace whisperkit

#endif  // WHISPERKIT_SYNTH_H_
