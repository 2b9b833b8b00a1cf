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

#include "whisperkit/acoustics.h"
#include "whisperkit/error.h"

using namespace whisperkit;

namespace {

AudioBuffer scaled(AudioBuffer b, double g) {
  for (double& s : b.samples) s *= g;
  return b;
}

const AudioBuffer& harmonic() {
  static const AudioBuffer h = synthesize(signal::HarmonicSeries{200.0, 20, -12.0, 0.8}, 1.0, 16000);
  return h;
}

const AudioBuffer& noise() {
  static const AudioBuffer n = synthesize(signal::WhiteNoise{0.5, 17}, 1.0, 16000);
  return n;
}

AcousticMeasures tagged(AcousticMeasures m, const std::string& id, const std::string& spk, Style style) {
  m.utt_id = id;
  m.speaker_id = spk;
  m.style = style;
  return m;
}

}  // namespace

TEST_CASE("intensity contour") {
  AudioBuffer square;
  for (int i = 0; i < 16000; ++i) square.samples.push_back((i / 40) % 2 == 0 ? 1.0 : -1.0);
  for (double v : intensity_contour(square)) CHECK(std::abs(v) < 1e-12);

  const AudioBuffer sil = synthesize(signal::Silence{}, 0.5, 16000);
  for (double v : intensity_contour(sil)) CHECK(v == doctest::Approx(-200.0));

  const auto base = intensity_contour(noise());
  const auto louder = intensity_contour(scaled(noise(), 2.0));
  REQUIRE(base.size() == louder.size());
  CHECK(base.size() == 98);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(louder[i] - base[i] - 20.0 * std::log10(2.0)) < 1e-9);
  }
  AudioBuffer tiny;
  tiny.samples.assign(100, 0.1);
  CHECK_THROWS_AS(intensity_contour(tiny), InvalidArgument);
}

TEST_CASE("spectral slope") {
  const double flat = spectral_slope(noise());
  CHECK(std::abs(flat) <= 0.5);
  CHECK(spectral_slope(harmonic()) < flat);
  // Above its last partial the harmonic spectrum is rounding noise, which
  // does not scale with gain, so its agreement is looser than the noise one.
  CHECK(std::abs(spectral_slope(scaled(harmonic(), 0.3)) - spectral_slope(harmonic())) < 1e-4);
  CHECK(std::abs(spectral_slope(scaled(noise(), 4.0)) - flat) < 1e-9);
  SlopeConfig narrow;
  narrow.fmin_hz = 1000.0;
  narrow.fmax_hz = 1010.0;
  CHECK_THROWS_AS(spectral_slope(noise(), narrow), InvalidArgument);
}

TEST_CASE("periodicity") {
  CHECK(periodicity(synthesize(signal::Sine{200.0, 1.0}, 1.0, 16000)) > 0.95);
  CHECK(periodicity(noise()) < 0.3);
  CHECK(periodicity(synthesize(signal::Silence{}, 0.1, 16000)) == 0.0);
  const double p = periodicity(harmonic());
  CHECK(std::abs(periodicity(scaled(harmonic(), 0.01)) - p) < 1e-9);
  CHECK(std::abs(periodicity(scaled(harmonic(), 7.0)) - p) < 1e-9);
  AudioBuffer tiny;
  tiny.samples.assign(500, 0.1);
  CHECK_THROWS_AS(periodicity(tiny), InvalidArgument);
}

TEST_CASE("f0 estimate") {
  for (double f : {80.0, 123.4, 200.0, 350.0}) {
    CHECK(std::abs(estimate_f0(synthesize(signal::Sine{f, 0.5}, 0.5, 16000)) - f) / f < 0.005);
  }
  CHECK(std::abs(estimate_f0(harmonic()) - 200.0) < 1.0);
  CHECK(estimate_f0(synthesize(signal::Silence{}, 0.1, 16000)) == 0.0);
}

TEST_CASE("normal and whisper proxies move in the described directions") {
  const AcousticMeasures normal = measure(harmonic());
  const AcousticMeasures whisper = measure(scaled(noise(), 0.5));
  CHECK(whisper.mean_intensity_db < normal.mean_intensity_db);
  CHECK(whisper.slope_db_per_khz > normal.slope_db_per_khz);
  CHECK(whisper.periodicity < normal.periodicity);
}

TEST_CASE("style contrast") {
  const AcousticMeasures h = measure(harmonic());
  const AcousticMeasures n = measure(noise());
  SUBCASE("identical audio under both labels") {
    const auto r = style_contrast({tagged(h, "a", "s1", Style::kNormal), tagged(h, "b", "s1", Style::kWhisper)});
    REQUIRE(r.speakers.size() == 1);
    CHECK(r.speakers[0].delta_intensity_db == 0.0);
    CHECK(r.speakers[0].delta_slope == 0.0);
    CHECK(r.speakers[0].delta_periodicity == 0.0);
  }
  SUBCASE("harmonic normal, noise whisper") {
    const auto r = style_contrast({tagged(h, "a", "s1", Style::kNormal), tagged(n, "b", "s1", Style::kWhisper),
                                   tagged(h, "c", "s2", Style::kNormal)});
    REQUIRE(r.speakers.size() == 1);
    CHECK(r.speakers[0].speaker_id == "s1");
    CHECK(r.speakers[0].delta_periodicity < 0.0);
    CHECK(r.speakers[0].delta_slope > 0.0);
    CHECK(r.excluded_speakers == std::vector<std::string>{"s2"});
  }
  SUBCASE("averages within style") {
    AcousticMeasures a = h, b = h;
    a.mean_intensity_db = -10.0;
    b.mean_intensity_db = -20.0;
    AcousticMeasures w = h;
    w.mean_intensity_db = -30.0;
    const auto r = style_contrast({tagged(a, "1", "s", Style::kNormal), tagged(b, "2", "s", Style::kNormal),
                                   tagged(w, "3", "s", Style::kWhisper)});
    REQUIRE(r.speakers.size() == 1);
    CHECK(r.speakers[0].n_normal == 2);
    CHECK(r.speakers[0].delta_intensity_db == doctest::Approx(-15.0));
  }
  CHECK(style_contrast({}).speakers.empty());
}
