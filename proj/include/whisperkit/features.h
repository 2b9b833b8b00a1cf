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

#ifndef WHISPERKIT_FEATURES_H_
#define WHISPERKIT_FEATURES_H_

#include <complex>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "whisperkit/audio.h"
#include "whisperkit/matrix.h"

namespace whisperkit {

struct FeatureConfig {
  double frame_len_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 512;
  int n_mels = 80;
  int n_mfcc = 13;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;  // <= 0 means Nyquist
  double log_floor = 1e-10;
  bool pre_emphasis = false;
  double pre_emphasis_coeff = 0.97;

  int frame_samples(int sample_rate_hz) const;
  int hop_samples(int sample_rate_hz) const;
  double effective_fmax(int sample_rate_hz) const;

  // Throws InvalidArgument when hop > frame, fft_size is not a power of two
  // covering the frame, or the mel band is empty or above Nyquist.
  void validate(int sample_rate_hz) const;
};

enum class FeatureKind : std::uint32_t { kPowerSpec = 0, kLogMel = 1, kMfcc = 2 };

const char* to_string(FeatureKind kind);

// T frames by D dims.
struct FeatureMatrix {
  Matrix data;
  double frame_rate_hz = 100.0;
  FeatureKind kind = FeatureKind::kPowerSpec;

  std::size_t num_frames() const { return data.rows(); }
  std::size_t dim() const { return data.cols(); }
  bool operator==(const FeatureMatrix&) const = default;
};

// 1 + floor((n - frame) / hop) for n >= frame, else 0.
std::size_t frame_count(std::size_t num_samples, std::size_t frame_samples,
                        std::size_t hop_samples);

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::span<std::complex<double>> data);

std::vector<double> hann_window(std::size_t length);

// Hann-windowed |DFT|^2 per frame, D = fft_size / 2 + 1. The trailing
// partial frame is dropped. Throws InvalidArgument if the buffer is shorter
// than one frame.
FeatureMatrix stft_power(const AudioBuffer& buf, const FeatureConfig& cfg);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters, n_mels x (fft_size/2 + 1), centres equally spaced on
// the mel scale between fmin and fmax.
Matrix mel_filterbank(const FeatureConfig& cfg, int sample_rate_hz);

// ln(max(H * spec, log_floor)) per frame. `sample_rate_hz` positions the
// filterbank; it defaults to the toolkit standard rate.
FeatureMatrix log_mel(const FeatureMatrix& spec, const FeatureConfig& cfg,
                      int sample_rate_hz = kStandardSampleRate);

// Orthonormal DCT-II over the mel axis, first n_mfcc coefficients kept.
FeatureMatrix mfcc(const FeatureMatrix& logmel, const FeatureConfig& cfg);

// Resample to the standard rate, then stft_power followed by log_mel.
FeatureMatrix extract_log_mel(const AudioBuffer& buf, const FeatureConfig& cfg);

// Per-utterance mean and variance normalization of every dimension.
// Dimensions with (near) zero variance are only mean-shifted.
FeatureMatrix normalize_mean_variance(const FeatureMatrix& feat);

// Mean over frames of geometric / arithmetic mean of the power bins.
// 1 for a perfectly flat spectrum, near 0 for a peaky one.
double mean_spectral_flatness(const FeatureMatrix& power_spec, double floor = 1e-20);

// Binary layout, little-endian: "WKFM", kind (u32), T (u32), D (u32), then
// T*D float32 row-major. The frame rate is not stored; the reader assigns
// `frame_rate_hz`.
std::vector<std::uint8_t> encode_features(const FeatureMatrix& feat);
FeatureMatrix decode_features(std::span<const std::uint8_t> bytes,
                              double frame_rate_hz = 100.0);
void write_features(const std::filesystem::path& path, const FeatureMatrix& feat);
FeatureMatrix read_features(const std::filesystem::path& path, double frame_rate_hz = 100.0);

// One row per frame, comma separated, preceded by a "# kind=... T=... D=..." line.
void write_features_csv(std::ostream& out, const FeatureMatrix& feat);

void to_json(nlohmann::json& j, const FeatureConfig& cfg);
void from_json(const nlohmann::json& j, FeatureConfig& cfg);

}  // namespace whisperkit

#endif  // WHISPERKIT_FEATURES_H_
