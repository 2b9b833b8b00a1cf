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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "test_util.h"
#include "whisperkit/acoustics.h"
#include "whisperkit/audio.h"
#include "whisperkit/error.h"

using namespace whisperkit;
using whisperkit::testing::TempDir;

namespace {

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Hand-built RIFF file, independent of write_wav.
std::string pcm16_wav(int rate, int channels, const std::vector<std::int16_t>& interleaved) {
  std::string data;
  for (auto v : interleaved) put_u16(data, static_cast<std::uint16_t>(v));
  std::string s = "RIFF";
  put_u32(s, static_cast<std::uint32_t>(36 + data.size()));
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, 1);
  put_u16(s, static_cast<std::uint16_t>(channels));
  put_u32(s, static_cast<std::uint32_t>(rate));
  put_u32(s, static_cast<std::uint32_t>(rate * channels * 2));
  put_u16(s, static_cast<std::uint16_t>(channels * 2));
  put_u16(s, 16);
  s += "data";
  put_u32(s, static_cast<std::uint32_t>(data.size()));
  return s + data;
}

// Frequency of the largest |DFT| bin by direct summation, restricted to a band.
double dft_peak_hz(const AudioBuffer& buf, double lo_hz, double hi_hz, double step_hz) {
  double best_f = 0.0, best = -1.0;
  const double n = static_cast<double>(buf.size());
  for (double f = lo_hz; f <= hi_hz; f += step_hz) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
      const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * static_cast<double>(i) / n);
      acc += w * buf.samples[i] *
             std::polar(1.0, -2 * std::numbers::pi * f * static_cast<double>(i) / buf.sample_rate_hz);
    }
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

TEST_CASE("load_wav scales 16-bit PCM by 1/32768") {
  TempDir dir;
  whisperkit::testing::spit(dir / "one.wav", pcm16_wav(16000, 1, {32767}));
  const AudioBuffer b = load_wav(dir / "one.wav");
  REQUIRE(b.size() == 1);
  CHECK(b.samples[0] == 32767.0 / 32768.0);
  CHECK(b.sample_rate_hz == 16000);
}

TEST_CASE("load_wav averages channels") {
  TempDir dir;
  std::vector<std::int16_t> stereo;
  for (int i = 0; i < 50; ++i) {
    stereo.push_back(32767);
    stereo.push_back(-32767);
  }
  whisperkit::testing::spit(dir / "st.wav", pcm16_wav(8000, 2, stereo));
  const AudioBuffer b = load_wav(dir / "st.wav");
  CHECK(b.size() == 50);
  for (double s : b.samples) CHECK(s == 0.0);
  const WavInfo info = read_wav_info(dir / "st.wav");
  CHECK(info.channels == 2);
  CHECK(info.num_frames == 50);
}

TEST_CASE("load_wav duration and errors") {
  TempDir dir;
  whisperkit::testing::spit(dir / "sec.wav", pcm16_wav(16000, 1, std::vector<std::int16_t>(16000, 5)));
  CHECK(load_wav(dir / "sec.wav").duration_s() == 1.0);
  CHECK_THROWS_AS(load_wav(dir / "missing.wav"), IoError);
  whisperkit::testing::spit(dir / "junk.wav", "RIFX not a wave file at all, sorry");
  CHECK_THROWS_AS(load_wav(dir / "junk.wav"), IoError);
  whisperkit::testing::spit(dir / "empty.wav", pcm16_wav(16000, 1, {}));
  CHECK_THROWS_AS(load_wav(dir / "empty.wav"), IoError);
  const std::string full = pcm16_wav(16000, 1, std::vector<std::int16_t>(100, 1));
  whisperkit::testing::spit(dir / "trunc.wav", full.substr(0, 30));
  CHECK_THROWS_AS(load_wav(dir / "trunc.wav"), IoError);
}

TEST_CASE("write/load round trip within one LSB") {
  TempDir dir;
  const AudioBuffer noise = synthesize(signal::WhiteNoise{0.9, 4}, 0.25, 16000);
  write_wav(dir / "n.wav", noise);
  const AudioBuffer back = load_wav(dir / "n.wav");
  REQUIRE(back.size() == noise.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    CHECK(std::abs(back.samples[i] - noise.samples[i]) <= 1.0 / 32768.0);
  }
  write_wav(dir / "f.wav", noise, SampleFormat::kFloat32);
  const AudioBuffer fback = load_wav(dir / "f.wav");
  for (std::size_t i = 0; i < noise.size(); ++i) {
    CHECK(std::abs(fback.samples[i] - noise.samples[i]) <= 1e-7);
  }
  CHECK(read_wav_info(dir / "f.wav").format == SampleFormat::kFloat32);
}

TEST_CASE("synthesize") {
  const AudioBuffer sil = synthesize(signal::Silence{}, 1.0, 16000);
  CHECK(sil.size() == 16000);
  for (double s : sil.samples) CHECK(s == 0.0);

  const AudioBuffer sine = synthesize(signal::Sine{200.0, 1.0}, 1.0, 16000);
  CHECK(sine.samples[20] == doctest::Approx(std::sin(2 * std::numbers::pi * 200 * 20 / 16000.0)).epsilon(1e-12));

  CHECK(synthesize(signal::WhiteNoise{0.5, 99}, 0.1, 16000) ==
        synthesize(signal::WhiteNoise{0.5, 99}, 0.1, 16000));
  CHECK(synthesize(signal::WhiteNoise{0.5, 99}, 0.1, 16000) !=
        synthesize(signal::WhiteNoise{0.5, 100}, 0.1, 16000));

  const AudioBuffer h = synthesize(signal::HarmonicSeries{150.0, 20, -12.0, 0.6}, 0.5, 16000);
  for (double s : h.samples) CHECK(std::abs(s) <= 0.6 + 1e-12);

  CHECK_THROWS_AS(synthesize(signal::Sine{8000.0, 1.0}, 1.0, 16000), InvalidArgument);
  CHECK_THROWS_AS(synthesize(signal::Silence{}, 0.0, 16000), InvalidArgument);
  CHECK_THROWS_AS(synthesize(signal::Silence{}, -1.0, 16000), InvalidArgument);
}

TEST_CASE("resample identity and lengths") {
  const AudioBuffer noise = synthesize(signal::WhiteNoise{0.5, 1}, 0.1, 16000);
  CHECK(resample(noise, 16000) == noise);
  AudioBuffer hundred;
  hundred.samples.assign(100, 0.1);
  hundred.sample_rate_hz = 16000;
  const auto down = resample(hundred, 8000);
  CHECK(down.size() >= 49);
  CHECK(down.size() <= 51);
  CHECK(down.sample_rate_hz == 8000);
  CHECK_THROWS_AS(resample(noise, 0), InvalidArgument);
  const auto up = resample(noise, 44100);
  CHECK(std::abs(static_cast<double>(up.size()) - 1600.0 * 44100 / 16000) <= 1.0);
}

TEST_CASE("resample keeps a 440 Hz peak at 440 Hz") {
  const AudioBuffer sine = synthesize(signal::Sine{440.0, 0.8}, 1.0, 44100);
  const AudioBuffer out = resample(sine, 16000);
  CHECK(std::abs(static_cast<double>(out.size()) - 16000.0) <= 1.0);
  // 1 s signals: DFT bins are 1 Hz apart.
  CHECK(std::abs(dft_peak_hz(sine, 400, 480, 1.0) - 440.0) <= 1.0);
  CHECK(std::abs(dft_peak_hz(out, 400, 480, 1.0) - 440.0) <= 1.0);
}

TEST_CASE("resample preserves pitch across 8k, 16k and 44.1k") {
  const int rates[] = {8000, 16000, 44100};
  for (double f : {150.0, 220.0, 330.0}) {
    for (int src : rates) {
      const AudioBuffer sine = synthesize(signal::Sine{f, 0.7}, 0.5, src);
      const double f_src = estimate_f0(sine);
      for (int dst : rates) {
        const double f_dst = estimate_f0(resample(sine, dst));
        CHECK(std::abs(f_dst - f_src) / f_src < 0.01);
      }
    }
  }
}

TEST_CASE("resample removes content above the new Nyquist") {
  const AudioBuffer high = synthesize(signal::Sine{6000.0, 0.8}, 0.5, 16000);
  const AudioBuffer out = resample(high, 8000);
  double energy = 0.0;
  for (double s : out.samples) energy += s * s;
  // Input energy is 0.32 per sample; stopband leakage must be tiny.
  CHECK(energy / static_cast<double>(out.size()) < 1e-4);
}
