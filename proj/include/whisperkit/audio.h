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

#ifndef WHISPERKIT_AUDIO_H_
#define WHISPERKIT_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace whisperkit {

// Mono signal with samples in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  bool operator==(const AudioBuffer&) const = default;
};

// Every pipeline resamples to this rate before feature extraction.
inline constexpr int kStandardSampleRate = 16000;

enum class SampleFormat { kPcm16, kFloat32 };

// Header-level facts about a WAV file.
struct WavInfo {
  int sample_rate_hz = 0;
  int channels = 0;
  std::uint64_t num_frames = 0;  // samples per channel
  SampleFormat format = SampleFormat::kPcm16;

  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(num_frames) / sample_rate_hz : 0.0;
  }
};

// Reads only the RIFF headers; the data chunk is not decoded.
// Throws IoError on a missing file or an unsupported/malformed header.
WavInfo read_wav_info(const std::filesystem::path& path);

// Loads a 16-bit PCM or 32-bit float WAV and averages all channels to mono.
// PCM values v map to v / 32768; float samples are clamped to [-1, 1].
// Throws IoError for missing files, malformed headers, or zero-length audio.
AudioBuffer load_wav(const std::filesystem::path& path);

// Writes a mono WAV. PCM16 quantizes with round(x * 32768) clamped to the
// int16 range, so load_wav(write_wav(b)) is within one LSB of b.
void write_wav(const std::filesystem::path& path, const AudioBuffer& buf,
               SampleFormat format = SampleFormat::kPcm16);

// Windowed-sinc resampler (Kaiser window, beta 8, 32 taps per phase,
// anti-alias cutoff at the lower Nyquist). Output length is
// round(size * target / source). Same-rate input is returned unchanged.
AudioBuffer resample(const AudioBuffer& buf, int target_rate_hz);

namespace signal {

struct Sine {
  double freq_hz = 440.0;
  double amplitude = 1.0;
};

// Uniform noise in [-amplitude, amplitude].
struct WhiteNoise {
  double amplitude = 1.0;
  std::uint64_t seed = 0;
};

// Partials k * f0 for k = 1..n_partials with amplitude falling by
// rolloff_db_per_octave per doubling of k; partials at or above Nyquist are
// dropped. Scaled so the peak never exceeds `amplitude`.
struct HarmonicSeries {
  double f0_hz = 200.0;
  int n_partials = 10;
  double rolloff_db_per_octave = -12.0;
  double amplitude = 1.0;
};

struct Silence {};

}  // namespace signal

using SignalKind =
    std::variant<signal::Sine, signal::WhiteNoise, signal::HarmonicSeries, signal::Silence>;

// Deterministic test-signal generator. Throws InvalidArgument for a
// non-positive duration or rate, or a frequency at or above Nyquist.
AudioBuffer synthesize(const SignalKind& kind, double duration_s, int sample_rate_hz);

}  // namespace whisperkit

#endif  // WHISPERKIT_AUDIO_H_
