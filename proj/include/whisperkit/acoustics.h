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

#ifndef WHISPERKIT_ACOUSTICS_H_
#define WHISPERKIT_ACOUSTICS_H_

#include <string>
#include <vector>

#include "whisperkit/audio.h"
#include "whisperkit/features.h"
#include "whisperkit/manifest.h"

namespace whisperkit {

// Per-frame level 20*log10(max(RMS, 1e-10)), framed like the feature front-end.
// Throws InvalidArgument if the buffer is shorter than one frame.
std::vector<double> intensity_contour(const AudioBuffer& buf, double frame_ms = 25.0,
                                      double hop_ms = 10.0);

struct SlopeConfig {
  FeatureConfig framing;  // frame, hop and fft size
  double fmin_hz = 100.0;
  double fmax_hz = 8000.0;
};

// Least-squares slope, in dB per kHz, of the time-averaged power spectrum
// (averaged in the power domain, then 10*log10) over bins in
// [fmin, fmax]. Throws InvalidArgument if fewer than two bins fall in the
// band or the buffer is shorter than one frame.
double spectral_slope(const AudioBuffer& buf, const SlopeConfig& cfg = {});

struct PitchRange {
  double f_lo_hz = 60.0;
  double f_hi_hz = 400.0;
};

// Peak normalized autocorrelation of the mean-removed signal over lags
// [rate/f_hi, rate/f_lo], clamped to [0, 1]; 0 for a silent buffer.
// Throws InvalidArgument if the buffer has fewer than 2 * rate / f_lo
// samples.
double periodicity(const AudioBuffer& buf, const PitchRange& range = {});

// Fundamental frequency from the first autocorrelation peak reaching 90%
// of the global maximum, refined by parabolic interpolation. Returns 0 for
// a silent buffer. Same length precondition as periodicity().
double estimate_f0(const AudioBuffer& buf, const PitchRange& range = {});

struct AcousticMeasures {
  std::string utt_id;
  std::string speaker_id;
  Style style = Style::kNormal;
  double mean_intensity_db = 0.0;
  double slope_db_per_khz = 0.0;
  double periodicity = 0.0;
};

struct AnalysisConfig {
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  SlopeConfig slope;
  PitchRange pitch;
};

// All three measures for one buffer, after resampling to the standard rate.
AcousticMeasures measure(const AudioBuffer& buf, const AnalysisConfig& cfg = {});

struct SpeakerContrast {
  std::string speaker_id;
  std::size_t n_normal = 0;
  std::size_t n_whisper = 0;
  // whisper mean minus normal mean
  double delta_intensity_db = 0.0;
  double delta_slope = 0.0;
  double delta_periodicity = 0.0;
};

struct ContrastReport {
  std::vector<SpeakerContrast> speakers;         // sorted by speaker_id
  std::vector<std::string> excluded_speakers;    // only one style present
};

ContrastReport style_contrast(const std::vector<AcousticMeasures>& measures);

}  // namespace whisperkit

#endif  // WHISPERKIT_ACOUSTICS_H_
