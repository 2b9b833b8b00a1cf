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

#include "whisperkit/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "whisperkit/error.h"
#include "whisperkit/random.h"

namespace whisperkit {
namespace {

constexpr double kNoiseFloorAmplitude = 0.002;

void append(std::vector<double>& dst, const AudioBuffer& src, double gain) {
  for (double s : src.samples) dst.push_back(gain * s);
}

}  // namespace

SynthUtterance synth_utterance(const SynthConfig& cfg, std::uint64_t seed, Style style) {
  if (cfg.min_tokens < 1 || cfg.max_tokens < cfg.min_tokens) {
    throw InvalidArgument("synth: need 1 <= min_tokens <= max_tokens");
  }
  Rng rng(seed);
  const auto length = static_cast<int>(rng.uniform_int(cfg.min_tokens, cfg.max_tokens));
  std::string tokens;
  for (int i = 0; i < length; ++i) {
    const bool edge = i == 0 || i == length - 1;
    std::string choices;
    for (char c : std::string("vws")) {
      if (!tokens.empty() && tokens.back() == c) continue;
      if (edge && c == 's') continue;
      choices.push_back(c);
    }
    tokens.push_back(choices[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(choices.size()) - 1))]);
  }

  const int rate = kStandardSampleRate;
  const auto pad = static_cast<std::size_t>(std::lround(std::max(0.0, cfg.edge_pad_s) * rate));
  std::vector<double> samples(pad, 0.0);
  for (char c : tokens) {
    const double dur = rng.uniform(cfg.min_event_s, cfg.max_event_s);
    if (c == 'v') {
      signal::HarmonicSeries h;
      h.f0_hz = rng.uniform(110.0, 240.0);
      h.n_partials = 20;
      h.rolloff_db_per_octave = -12.0;
      h.amplitude = 0.6;
      append(samples, synthesize(h, dur, rate), 1.0);
    } else if (c == 'w') {
      append(samples, synthesize(signal::WhiteNoise{0.25, rng.next_u64()}, dur, rate), 1.0);
    } else {
      append(samples, synthesize(signal::Silence{}, dur, rate), 1.0);
    }
  }
  samples.resize(samples.size() + pad, 0.0);
  const double gain = style == Style::kWhisper ? 0.5 : 1.0;
  Rng floor_rng(rng.next_u64());
  for (double& s : samples) s = gain * s + kNoiseFloorAmplitude * floor_rng.uniform(-1.0, 1.0);

  SynthUtterance out;
  out.transcript = tokens;
  out.audio.sample_rate_hz = rate;
  out.audio.samples = std::move(samples);
  return out;
}

Manifest write_synthetic_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg) {
  std::filesystem::create_directories(out_dir / "audio");
  Manifest all, train, test;
  for (Manifest* m : {&all, &train, &test}) {
    m->provenance = "synthetic";
    m->base_dir = out_dir;
  }
  Rng rng(cfg.seed);
  const std::size_t total = cfg.n_train + cfg.n_test;
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_train = i < cfg.n_train;
    const Style style = i % 2 == 0 ? Style::kNormal : Style::kWhisper;
    const SynthUtterance utt = synth_utterance(cfg, rng.next_u64(), style);
    char id[32];
    std::snprintf(id, sizeof(id), "%s%04zu", is_train ? "tr" : "te", is_train ? i : i - cfg.n_train);
    char speaker[16];
    std::snprintf(speaker, sizeof(speaker), "spk%02zu",
                  (i / 2) % static_cast<std::size_t>(std::max(1, cfg.n_speakers)));
    UtteranceRecord rec;
    rec.utt_id = id;
    rec.audio_path = "audio/" + rec.utt_id + ".wav";
    rec.transcript = utt.transcript;
    rec.speaker_id = speaker;
    rec.style = style;
    rec.dialect = "Synthetic";
    rec.split = is_train ? Split::kTrain : Split::kTest;
    write_wav(out_dir / rec.audio_path, utt.audio);
    all.records.push_back(rec);
    (is_train ? train : test).records.push_back(std::move(rec));
  }
  write_manifest(out_dir / "train.jsonl", train);
  write_manifest(out_dir / "test.jsonl", test);
  write_manifest(out_dir / "all.jsonl", all);
  return all;
}

}  // namespace whisperkit
