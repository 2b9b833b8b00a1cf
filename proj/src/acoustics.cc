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

#include "whisperkit/acoustics.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "whisperkit/error.h"

namespace whisperkit {
namespace {

struct Autocorrelation {
  std::size_t min_lag = 0;
  std::vector<double> values;  // values[i] is the lag min_lag + i
};

Autocorrelation normalized_autocorrelation(const AudioBuffer& buf, const PitchRange& range) {
  if (!(range.f_lo_hz > 0.0) || !(range.f_hi_hz > range.f_lo_hz)) {
    throw InvalidArgument("pitch range must satisfy 0 < f_lo < f_hi");
  }
  const double rate = buf.sample_rate_hz;
  const auto max_lag = static_cast<std::size_t>(std::ceil(rate / range.f_lo_hz));
  const auto min_lag = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(rate / range.f_hi_hz)));
  if (buf.samples.size() < 2 * max_lag) {
    throw InvalidArgument("periodicity: need at least " + std::to_string(2 * max_lag) +
                          " samples for f_lo " + std::to_string(range.f_lo_hz) + " Hz");
  }
  const std::size_t n = buf.samples.size();
  double mean = 0.0;
  for (double s : buf.samples) mean += s;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = buf.samples[i] - mean;

  // Prefix sums of x^2 give both window energies in O(1) per lag.
  std::vector<double> energy(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) energy[i + 1] = energy[i] + x[i] * x[i];

  Autocorrelation ac;
  ac.min_lag = min_lag;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
    double cross = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) cross += x[i] * x[i + lag];
    const double e_head = energy[n - lag];
    const double e_tail = energy[n] - energy[lag];
    const double denom = std::sqrt(e_head * e_tail);
    ac.values.push_back(denom > 0.0 ? cross / denom : 0.0);
  }
  return ac;
}

}  // namespace

std::vector<double> intensity_contour(const AudioBuffer& buf, double frame_ms, double hop_ms) {
  FeatureConfig framing;
  framing.frame_len_ms = frame_ms;
  framing.hop_ms = hop_ms;
  const auto frame = static_cast<std::size_t>(framing.frame_samples(buf.sample_rate_hz));
  const auto hop = static_cast<std::size_t>(framing.hop_samples(buf.sample_rate_hz));
  if (frame == 0 || hop == 0) throw InvalidArgument("intensity_contour: frame and hop must be positive");
  if (buf.samples.size() < frame) throw InvalidArgument("intensity_contour: buffer shorter than one frame");
  const std::size_t frames = frame_count(buf.samples.size(), frame, hop);
  std::vector<double> out(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < frame; ++i) {
      const double s = buf.samples[t * hop + i];
      sum += s * s;
    }
    out[t] = 20.0 * std::log10(std::max(std::sqrt(sum / static_cast<double>(frame)), 1e-10));
  }
  return out;
}

double spectral_slope(const AudioBuffer& buf, const SlopeConfig& cfg) {
  const FeatureMatrix spec = stft_power(buf, cfg.framing);
  const std::size_t bins = spec.dim();
  const double bin_hz = static_cast<double>(buf.sample_rate_hz) / cfg.framing.fft_size;
  std::vector<double> freq_khz, level_db;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f < cfg.fmin_hz || f > cfg.fmax_hz) continue;
    double mean_power = 0.0;
    for (std::size_t t = 0; t < spec.num_frames(); ++t) mean_power += spec.data(t, k);
    mean_power /= static_cast<double>(spec.num_frames());
    freq_khz.push_back(f / 1000.0);
    level_db.push_back(10.0 * std::log10(std::max(mean_power, 1e-30)));
  }
  if (freq_khz.size() < 2) throw InvalidArgument("spectral_slope: fewer than two bins in band");
  const double n = static_cast<double>(freq_khz.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < freq_khz.size(); ++i) {
    mx += freq_khz[i];
    my += level_db[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < freq_khz.size(); ++i) {
    sxy += (freq_khz[i] - mx) * (level_db[i] - my);
    sxx += (freq_khz[i] - mx) * (freq_khz[i] - mx);
  }
  return sxy / sxx;
}

double periodicity(const AudioBuffer& buf, const PitchRange& range) {
  const Autocorrelation ac = normalized_autocorrelation(buf, range);
  const double peak = *std::max_element(ac.values.begin(), ac.values.end());
  return std::clamp(peak, 0.0, 1.0);
}

double estimate_f0(const AudioBuffer& buf, const PitchRange& range) {
  const Autocorrelation ac = normalized_autocorrelation(buf, range);
  const auto& r = ac.values;
  const double peak = *std::max_element(r.begin(), r.end());
  if (!(peak > 0.0)) return 0.0;
  // First local maximum that comes close to the global one: avoids locking
  // onto lag multiples, which score almost as high for a clean tone.
  std::size_t best = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool local_max = (i == 0 || r[i] >= r[i - 1]) && (i + 1 == r.size() || r[i] >= r[i + 1]);
    if (local_max && r[i] >= 0.9 * peak) {
      best = i;
      break;
    }
  }
  double offset = 0.0;
  if (best > 0 && best + 1 < r.size()) {
    const double a = r[best - 1], b = r[best], c = r[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = 0.5 * (a - c) / denom;
  }
  const double lag = static_cast<double>(ac.min_lag + best) + offset;
  return buf.sample_rate_hz / lag;
}

AcousticMeasures measure(const AudioBuffer& buf, const AnalysisConfig& cfg) {
  const AudioBuffer standard = resample(buf, kStandardSampleRate);
  AcousticMeasures m;
  const auto contour = intensity_contour(standard, cfg.frame_ms, cfg.hop_ms);
  double sum = 0.0;
  for (double v : contour) sum += v;
  m.mean_intensity_db = sum / static_cast<double>(contour.size());
  m.slope_db_per_khz = spectral_slope(standard, cfg.slope);
  m.periodicity = periodicity(standard, cfg.pitch);
  return m;
}

ContrastReport style_contrast(const std::vector<AcousticMeasures>& measures) {
  struct Sums {
    std::size_t n = 0;
    double intensity = 0.0, slope = 0.0, periodicity = 0.0;
  };
  std::map<std::string, std::pair<Sums, Sums>> by_speaker;  // (normal, whisper)
  for (const auto& m : measures) {
    auto& pair = by_speaker[m.speaker_id];
    Sums& s = m.style == Style::kNormal ? pair.first : pair.second;
    ++s.n;
    s.intensity += m.mean_intensity_db;
    s.slope += m.slope_db_per_khz;
    s.periodicity += m.periodicity;
  }
  ContrastReport report;
  for (const auto& [speaker, pair] : by_speaker) {
    const auto& [normal, whisper] = pair;
    if (normal.n == 0 || whisper.n == 0) {
      report.excluded_speakers.push_back(speaker);
      continue;
    }
    const double nn = static_cast<double>(normal.n), nw = static_cast<double>(whisper.n);
    SpeakerContrast c;
    c.speaker_id = speaker;
    c.n_normal = normal.n;
    c.n_whisper = whisper.n;
    c.delta_intensity_db = whisper.intensity / nw - normal.intensity / nn;
    c.delta_slope = whisper.slope / nw - normal.slope / nn;
    c.delta_periodicity = whisper.periodicity / nw - normal.periodicity / nn;
    report.speakers.push_back(c);
  }
  return report;
}

}  // namespace whisperkit
