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

#include "whisperkit/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "binary_io.h"
#include "whisperkit/error.h"

namespace whisperkit {

int FeatureConfig::frame_samples(int sample_rate_hz) const {
  return static_cast<int>(std::lround(frame_len_ms * sample_rate_hz / 1000.0));
}

int FeatureConfig::hop_samples(int sample_rate_hz) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate_hz / 1000.0));
}

double FeatureConfig::effective_fmax(int sample_rate_hz) const {
  return fmax_hz > 0.0 ? fmax_hz : sample_rate_hz / 2.0;
}

void FeatureConfig::validate(int sample_rate_hz) const {
  if (sample_rate_hz <= 0) throw InvalidArgument("feature config: sample rate must be positive");
  const int frame = frame_samples(sample_rate_hz);
  const int hop = hop_samples(sample_rate_hz);
  if (frame <= 0 || hop <= 0) throw InvalidArgument("feature config: frame and hop must be positive");
  if (hop > frame) throw InvalidArgument("feature config: hop exceeds frame length");
  if (fft_size <= 0 || !std::has_single_bit(static_cast<unsigned>(fft_size))) {
    throw InvalidArgument("feature config: fft_size must be a power of two");
  }
  if (fft_size < frame) throw InvalidArgument("feature config: fft_size smaller than frame");
  if (n_mels <= 0 || n_mfcc <= 0) throw InvalidArgument("feature config: n_mels and n_mfcc must be positive");
  const double fmax = effective_fmax(sample_rate_hz);
  if (fmin_hz < 0.0 || !(fmin_hz < fmax) || fmax > sample_rate_hz / 2.0) {
    throw InvalidArgument("feature config: need 0 <= fmin < fmax <= Nyquist");
  }
  if (!(log_floor > 0.0)) throw InvalidArgument("feature config: log_floor must be positive");
}

const char* to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kPowerSpec: return "power_spec";
    case FeatureKind::kLogMel: return "log_mel";
    case FeatureKind::kMfcc: return "mfcc";
  }
  return "unknown";
}

std::size_t frame_count(std::size_t num_samples, std::size_t frame_samples,
                        std::size_t hop_samples) {
  if (num_samples < frame_samples || hop_samples == 0) return 0;
  return 1 + (num_samples - frame_samples) / hop_samples;
}

void fft(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if (!std::has_single_bit(n)) throw InvalidArgument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // Direct twiddles keep rounding error from accumulating across k.
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const std::complex<double> u = data[start + k];
        const std::complex<double> v = data[start + k + len / 2] * w;
        data[start + k] = u + v;
        data[start + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length <= 1) return w;
  // Periodic form: DFT-even, the usual choice for spectral analysis.
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(length));
  }
  return w;
}

FeatureMatrix stft_power(const AudioBuffer& buf, const FeatureConfig& cfg) {
  const int rate = buf.sample_rate_hz;
  cfg.validate(rate);
  const auto frame = static_cast<std::size_t>(cfg.frame_samples(rate));
  const auto hop = static_cast<std::size_t>(cfg.hop_samples(rate));
  if (buf.samples.size() < frame) {
    throw InvalidArgument("stft_power: buffer shorter than one frame (" +
                          std::to_string(buf.samples.size()) + " < " + std::to_string(frame) + ")");
  }
  const std::size_t frames = frame_count(buf.samples.size(), frame, hop);
  const auto nfft = static_cast<std::size_t>(cfg.fft_size);
  const std::size_t bins = nfft / 2 + 1;
  const std::vector<double> window = hann_window(frame);

  FeatureMatrix out;
  out.kind = FeatureKind::kPowerSpec;
  out.frame_rate_hz = static_cast<double>(rate) / static_cast<double>(hop);
  out.data = Matrix(frames, bins);
  std::vector<std::complex<double>> scratch(nfft);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * hop;
    std::fill(scratch.begin(), scratch.end(), std::complex<double>{});
    for (std::size_t i = 0; i < frame; ++i) {
      double x = buf.samples[offset + i];
      if (cfg.pre_emphasis) {
        const double prev = offset + i > 0 ? buf.samples[offset + i - 1] : x;
        x -= cfg.pre_emphasis_coeff * prev;
      }
      scratch[i] = x * window[i];
    }
    fft(scratch);
    auto row = out.data.row(t);
    for (std::size_t k = 0; k < bins; ++k) row[k] = std::norm(scratch[k]);
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix mel_filterbank(const FeatureConfig& cfg, int sample_rate_hz) {
  cfg.validate(sample_rate_hz);
  const auto bins = static_cast<std::size_t>(cfg.fft_size / 2 + 1);
  const auto n_mels = static_cast<std::size_t>(cfg.n_mels);
  const double mel_lo = hz_to_mel(cfg.fmin_hz);
  const double mel_hi = hz_to_mel(cfg.effective_fmax(sample_rate_hz));
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));
  }
  Matrix h(n_mels, bins);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / cfg.fft_size;
      double w = 0.0;
      if (f > left && f <= centre) {
        w = (f - left) / (centre - left);
      } else if (f > centre && f < right) {
        w = (right - f) / (right - centre);
      }
      h(m, k) = w;
    }
  }
  return h;
}

FeatureMatrix log_mel(const FeatureMatrix& spec, const FeatureConfig& cfg, int sample_rate_hz) {
  if (spec.kind != FeatureKind::kPowerSpec) throw InvalidArgument("log_mel: input must be a power spectrum");
  const auto bins = static_cast<std::size_t>(cfg.fft_size / 2 + 1);
  if (spec.dim() != bins) {
    throw InvalidArgument("log_mel: spectrum has " + std::to_string(spec.dim()) +
                          " bins but fft_size implies " + std::to_string(bins));
  }
  const Matrix h = mel_filterbank(cfg, sample_rate_hz);
  FeatureMatrix out;
  out.kind = FeatureKind::kLogMel;
  out.frame_rate_hz = spec.frame_rate_hz;
  out.data = Matrix(spec.num_frames(), h.rows());
  for (std::size_t t = 0; t < spec.num_frames(); ++t) {
    const auto power = spec.data.row(t);
    for (std::size_t m = 0; m < h.rows(); ++m) {
      const auto weights = h.row(m);
      double energy = 0.0;
      for (std::size_t k = 0; k < bins; ++k) energy += weights[k] * power[k];
      out.data(t, m) = std::log(std::max(energy, cfg.log_floor));
    }
  }
  return out;
}

FeatureMatrix mfcc(const FeatureMatrix& logmel, const FeatureConfig& cfg) {
  if (logmel.kind != FeatureKind::kLogMel) throw InvalidArgument("mfcc: input must be log-mel");
  const std::size_t n_mels = logmel.dim();
  const auto n_out = static_cast<std::size_t>(cfg.n_mfcc);
  if (n_out > n_mels) throw InvalidArgument("mfcc: n_mfcc exceeds the number of mel bands");
  Matrix basis(n_out, n_mels);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n_mels));
    for (std::size_t m = 0; m < n_mels; ++m) {
      basis(k, m) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                     (static_cast<double>(m) + 0.5) / static_cast<double>(n_mels));
    }
  }
  FeatureMatrix out;
  out.kind = FeatureKind::kMfcc;
  out.frame_rate_hz = logmel.frame_rate_hz;
  out.data = Matrix(logmel.num_frames(), n_out);
  for (std::size_t t = 0; t < logmel.num_frames(); ++t) {
    const auto x = logmel.data.row(t);
    for (std::size_t k = 0; k < n_out; ++k) {
      const auto b = basis.row(k);
      double acc = 0.0;
      for (std::size_t m = 0; m < n_mels; ++m) acc += b[m] * x[m];
      out.data(t, k) = acc;
    }
  }
  return out;
}

FeatureMatrix extract_log_mel(const AudioBuffer& buf, const FeatureConfig& cfg) {
  const AudioBuffer standard = resample(buf, kStandardSampleRate);
  return log_mel(stft_power(standard, cfg), cfg, kStandardSampleRate);
}

FeatureMatrix normalize_mean_variance(const FeatureMatrix& feat) {
  FeatureMatrix out = feat;
  const std::size_t frames = feat.num_frames();
  if (frames == 0) return out;
  for (std::size_t d = 0; d < feat.dim(); ++d) {
    double mean = 0.0;
    for (std::size_t t = 0; t < frames; ++t) mean += feat.data(t, d);
    mean /= static_cast<double>(frames);
    double var = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double dev = feat.data(t, d) - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(frames);
    const double inv_std = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t t = 0; t < frames; ++t) out.data(t, d) = (feat.data(t, d) - mean) * inv_std;
  }
  return out;
}

double mean_spectral_flatness(const FeatureMatrix& power_spec, double floor) {
  if (power_spec.num_frames() == 0 || power_spec.dim() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < power_spec.num_frames(); ++t) {
    double log_sum = 0.0, sum = 0.0;
    for (double p : power_spec.data.row(t)) {
      const double v = std::max(p, floor);
      log_sum += std::log(v);
      sum += v;
    }
    const double n = static_cast<double>(power_spec.dim());
    total += std::exp(log_sum / n) / (sum / n);
  }
  return total / static_cast<double>(power_spec.num_frames());
}

std::vector<std::uint8_t> encode_features(const FeatureMatrix& feat) {
  internal::ByteWriter w;
  w.tag("WKFM");
  w.u32(static_cast<std::uint32_t>(feat.kind));
  w.u32(static_cast<std::uint32_t>(feat.num_frames()));
  w.u32(static_cast<std::uint32_t>(feat.dim()));
  for (double v : feat.data.data()) w.f32(static_cast<float>(v));
  return std::move(w.bytes());
}

FeatureMatrix decode_features(std::span<const std::uint8_t> bytes, double frame_rate_hz) {
  internal::ByteReader r(bytes.data(), bytes.size());
  if (r.tag() != "WKFM") throw IoError("feature file: bad magic");
  const std::uint32_t kind = r.u32();
  if (kind > static_cast<std::uint32_t>(FeatureKind::kMfcc)) throw IoError("feature file: unknown kind");
  const std::uint32_t frames = r.u32();
  const std::uint32_t dim = r.u32();
  if (r.remaining() != static_cast<std::size_t>(frames) * dim * 4) {
    throw IoError("feature file: payload size does not match header");
  }
  FeatureMatrix feat;
  feat.kind = static_cast<FeatureKind>(kind);
  feat.frame_rate_hz = frame_rate_hz;
  feat.data = Matrix(frames, dim);
  for (double& v : feat.data.data()) v = r.f32();
  return feat;
}

void write_features(const std::filesystem::path& path, const FeatureMatrix& feat) {
  internal::write_file_atomic(path, encode_features(feat));
}

FeatureMatrix read_features(const std::filesystem::path& path, double frame_rate_hz) {
  const auto bytes = internal::read_file_bytes(path);
  return decode_features(bytes, frame_rate_hz);
}

void write_features_csv(std::ostream& out, const FeatureMatrix& feat) {
  out << "# kind=" << to_string(feat.kind) << " T=" << feat.num_frames() << " D=" << feat.dim()
      << " frame_rate_hz=" << feat.frame_rate_hz << '\n';
  for (std::size_t t = 0; t < feat.num_frames(); ++t) {
    const auto row = feat.data.row(t);
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (d) out << ',';
      out << row[d];
    }
    out << '\n';
  }
}

void to_json(nlohmann::json& j, const FeatureConfig& cfg) {
  j = nlohmann::json{{"frame_len_ms", cfg.frame_len_ms}, {"hop_ms", cfg.hop_ms},
                     {"fft_size", cfg.fft_size},         {"n_mels", cfg.n_mels},
                     {"n_mfcc", cfg.n_mfcc},             {"fmin_hz", cfg.fmin_hz},
                     {"fmax_hz", cfg.fmax_hz},           {"log_floor", cfg.log_floor},
                     {"pre_emphasis", cfg.pre_emphasis}, {"pre_emphasis_coeff", cfg.pre_emphasis_coeff}};
}

void from_json(const nlohmann::json& j, FeatureConfig& cfg) {
  cfg.frame_len_ms = j.value("frame_len_ms", cfg.frame_len_ms);
  cfg.hop_ms = j.value("hop_ms", cfg.hop_ms);
  cfg.fft_size = j.value("fft_size", cfg.fft_size);
  cfg.n_mels = j.value("n_mels", cfg.n_mels);
  cfg.n_mfcc = j.value("n_mfcc", cfg.n_mfcc);
  cfg.fmin_hz = j.value("fmin_hz", cfg.fmin_hz);
  cfg.fmax_hz = j.value("fmax_hz", cfg.fmax_hz);
  cfg.log_floor = j.value("log_floor", cfg.log_floor);
  cfg.pre_emphasis = j.value("pre_emphasis", cfg.pre_emphasis);
  cfg.pre_emphasis_coeff = j.value("pre_emphasis_coeff", cfg.pre_emphasis_coeff);
}

}  // namespace whisperkit
