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

#include "whisperkit/audio.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "binary_io.h"
#include "whisperkit/error.h"
#include "whisperkit/random.h"

namespace whisperkit {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct ParsedHeader {
  WavInfo info;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

// Walks the RIFF chunk list. `bytes` may hold just the file prefix when only
// the header is needed; `file_size` is then the full size on disk.
ParsedHeader parse_header(const std::uint8_t* bytes, std::size_t size,
                          const std::string& name) {
  internal::ByteReader r(bytes, size);
  try {
    if (r.tag() != "RIFF") throw IoError(name + ": not a RIFF file");
    r.u32();
    if (r.tag() != "WAVE") throw IoError(name + ": not a WAVE file");
    ParsedHeader h;
    bool have_fmt = false;
    int bits = 0;
    while (r.remaining() >= 8) {
      const std::string id = r.tag();
      const std::uint32_t len = r.u32();
      if (id == "fmt ") {
        if (len < 16) throw IoError(name + ": fmt chunk too short");
        const std::size_t start = r.position();
        std::uint16_t format = r.u16();
        h.info.channels = r.u16();
        h.info.sample_rate_hz = static_cast<int>(r.u32());
        r.u32();  // byte rate
        r.u16();  // block align
        bits = r.u16();
        if (format == kFormatExtensible) {
          if (len < 40) throw IoError(name + ": extensible fmt chunk too short");
          r.u16();  // cbSize
          r.u16();  // valid bits
          r.u32();  // channel mask
          format = r.u16();  // first two bytes of the subformat GUID
        }
        r.skip(len - (r.position() - start));
        if (format == kFormatPcm && bits == 16) {
          h.info.format = SampleFormat::kPcm16;
        } else if (format == kFormatFloat && bits == 32) {
          h.info.format = SampleFormat::kFloat32;
        } else {
          throw IoError(name + ": unsupported WAV encoding (format " +
                        std::to_string(format) + ", " + std::to_string(bits) + " bits)");
        }
        if (h.info.channels <= 0) throw IoError(name + ": zero channels");
        if (h.info.sample_rate_hz <= 0) throw IoError(name + ": zero sample rate");
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) throw IoError(name + ": data chunk before fmt chunk");
        h.data_offset = r.position();
        h.data_bytes = len;
        const std::size_t frame_bytes =
            static_cast<std::size_t>(h.info.channels) * (bits / 8);
        h.info.num_frames = len / frame_bytes;
        return h;
      } else {
        r.skip(std::min<std::size_t>(len + (len & 1), r.remaining()));
      }
    }
    throw IoError(name + ": no data chunk");
  } catch (const IoError& e) {
    const std::string what = e.what();
    if (what.rfind(name, 0) == 0) throw;
    throw IoError(name + ": malformed WAV header (" + what + ")");
  }
}

double kaiser(double x, double beta) {
  // Zeroth-order modified Bessel function by power series.
  auto bessel_i0 = [](double v) {
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 64; ++k) {
      term *= (v / (2.0 * k)) * (v / (2.0 * k));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  };
  if (std::abs(x) > 1.0) return 0.0;
  return bessel_i0(beta * std::sqrt(1.0 - x * x)) / bessel_i0(beta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

WavInfo read_wav_info(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  // Headers sit well inside the first 64 KiB for any file this toolkit sees.
  std::vector<std::uint8_t> prefix(65536);
  in.read(reinterpret_cast<char*>(prefix.data()), static_cast<std::streamsize>(prefix.size()));
  prefix.resize(static_cast<std::size_t>(in.gcount()));
  return parse_header(prefix.data(), prefix.size(), path.string()).info;
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  const std::vector<std::uint8_t> bytes = internal::read_file_bytes(path);
  const ParsedHeader h = parse_header(bytes.data(), bytes.size(), path.string());
  const std::size_t available = bytes.size() - h.data_offset;
  const int channels = h.info.channels;
  const std::size_t sample_bytes = h.info.format == SampleFormat::kPcm16 ? 2 : 4;
  const std::size_t frames =
      std::min<std::size_t>(h.data_bytes, available) / (sample_bytes * channels);
  if (frames == 0) throw IoError(path.string() + ": zero-length audio");

  AudioBuffer buf;
  buf.sample_rate_hz = h.info.sample_rate_hz;
  buf.samples.resize(frames);
  internal::ByteReader r(bytes.data() + h.data_offset, available);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      if (h.info.format == SampleFormat::kPcm16) {
        acc += r.i16() / 32768.0;
      } else {
        acc += std::clamp(static_cast<double>(r.f32()), -1.0, 1.0);
      }
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buf, SampleFormat format) {
  if (buf.sample_rate_hz <= 0) throw InvalidArgument("write_wav: sample rate must be positive");
  const std::uint16_t bits = format == SampleFormat::kPcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buf.samples.size() * (bits / 8));
  internal::ByteWriter w;
  w.tag("RIFF");
  w.u32(36 + data_bytes);
  w.tag("WAVE");
  w.tag("fmt ");
  w.u32(16);
  w.u16(format == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(buf.sample_rate_hz));
  w.u32(static_cast<std::uint32_t>(buf.sample_rate_hz) * (bits / 8));
  w.u16(bits / 8);
  w.u16(bits);
  w.tag("data");
  w.u32(data_bytes);
  for (double s : buf.samples) {
    if (format == SampleFormat::kPcm16) {
      const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      w.i16(static_cast<std::int16_t>(q));
    } else {
      w.f32(static_cast<float>(s));
    }
  }
  internal::write_file_atomic(path, w.bytes());
}

AudioBuffer resample(const AudioBuffer& buf, int target_rate_hz) {
  if (target_rate_hz <= 0) throw InvalidArgument("resample: target rate must be positive");
  if (buf.sample_rate_hz <= 0) throw InvalidArgument("resample: source rate must be positive");
  if (target_rate_hz == buf.sample_rate_hz) return buf;

  constexpr double kBeta = 8.0;
  constexpr double kHalfTaps = 16.0;  // 32 taps per phase
  const std::int64_t src = buf.sample_rate_hz;
  const std::int64_t dst = target_rate_hz;
  const auto n_in = static_cast<std::int64_t>(buf.samples.size());
  const std::int64_t n_out = (n_in * dst + src / 2) / src;

  // Cutoff relative to the input Nyquist; widening the kernel by 1/cutoff
  // keeps 32 zero crossings of the scaled sinc inside the window.
  const double cutoff = std::min(1.0, static_cast<double>(dst) / static_cast<double>(src));
  const double half_width = kHalfTaps / cutoff;

  AudioBuffer out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(static_cast<std::size_t>(n_out));
  for (std::int64_t n = 0; n < n_out; ++n) {
    const double center = static_cast<double>(n * src) / static_cast<double>(dst);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - half_width));
    const auto hi = static_cast<std::int64_t>(std::floor(center + half_width));
    double acc = 0.0, weight_sum = 0.0;
    for (std::int64_t j = lo; j <= hi; ++j) {
      const double d = static_cast<double>(j) - center;
      const double w = cutoff * sinc(cutoff * d) * kaiser(d / half_width, kBeta);
      weight_sum += w;
      if (j >= 0 && j < n_in) acc += w * buf.samples[static_cast<std::size_t>(j)];
    }
    out.samples[static_cast<std::size_t>(n)] =
        std::clamp(weight_sum != 0.0 ? acc / weight_sum : 0.0, -1.0, 1.0);
  }
  return out;
}

AudioBuffer synthesize(const SignalKind& kind, double duration_s, int sample_rate_hz) {
  if (!(duration_s > 0.0)) throw InvalidArgument("synthesize: duration must be positive");
  if (sample_rate_hz <= 0) throw InvalidArgument("synthesize: sample rate must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  AudioBuffer buf;
  buf.sample_rate_hz = sample_rate_hz;
  buf.samples.assign(n, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;

  if (const auto* s = std::get_if<signal::Sine>(&kind)) {
    if (s->freq_hz >= nyquist || s->freq_hz < 0.0) {
      throw InvalidArgument("synthesize: sine frequency must be below Nyquist");
    }
    for (std::size_t i = 0; i < n; ++i) {
      buf.samples[i] = s->amplitude * std::sin(two_pi * s->freq_hz * static_cast<double>(i) /
                                               sample_rate_hz);
    }
  } else if (const auto* w = std::get_if<signal::WhiteNoise>(&kind)) {
    Rng rng(w->seed);
    for (auto& x : buf.samples) x = w->amplitude * rng.uniform(-1.0, 1.0);
  } else if (const auto* h = std::get_if<signal::HarmonicSeries>(&kind)) {
    if (h->f0_hz >= nyquist || h->f0_hz <= 0.0) {
      throw InvalidArgument("synthesize: fundamental must lie in (0, Nyquist)");
    }
    if (h->n_partials < 1) throw InvalidArgument("synthesize: need at least one partial");
    std::vector<double> freqs, amps;
    for (int k = 1; k <= h->n_partials; ++k) {
      const double f = k * h->f0_hz;
      if (f >= nyquist) break;
      freqs.push_back(f);
      amps.push_back(std::pow(10.0, h->rolloff_db_per_octave * std::log2(k) / 20.0));
    }
    double total = 0.0;
    for (double a : amps) total += a;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate_hz;
      double acc = 0.0;
      for (std::size_t k = 0; k < freqs.size(); ++k) acc += amps[k] * std::sin(two_pi * freqs[k] * t);
      buf.samples[i] = h->amplitude * acc / total;
    }
  }
  return buf;
}

}  // namespace whisperkit
