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

#include "whisperkit/augment.h"

#include <algorithm>

#include "whisperkit/error.h"
#include "whisperkit/random.h"

namespace whisperkit {
namespace {

MaskSpec sample_intervals(std::size_t extent, int n_masks, int max_width, std::uint64_t seed,
                          MaskFill fill, const char* what) {
  if (n_masks < 0 || max_width < 0) {
    throw InvalidArgument(std::string(what) + ": mask count and width must be non-negative");
  }
  if (static_cast<std::size_t>(max_width) > extent) {
    throw InvalidArgument(std::string(what) + ": max_width " + std::to_string(max_width) +
                          " exceeds extent " + std::to_string(extent));
  }
  MaskSpec spec;
  spec.fill = fill;
  Rng rng(seed);
  for (int i = 0; i < n_masks; ++i) {
    const auto width = static_cast<std::size_t>(rng.uniform_int(0, max_width));
    const auto start =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(extent - width)));
    spec.intervals.push_back({start, width});
  }
  return spec;
}

// Flags per index; throws when an interval leaves [0, extent).
std::vector<bool> masked_flags(const MaskSpec& spec, std::size_t extent) {
  std::vector<bool> masked(extent, false);
  for (const MaskInterval& iv : spec.intervals) {
    if (iv.width == 0) continue;
    if (iv.start >= extent || iv.width > extent - iv.start) {
      throw InvalidArgument("mask interval [" + std::to_string(iv.start) + ", " +
                            std::to_string(iv.start + iv.width) + ") outside [0, " +
                            std::to_string(extent) + ")");
    }
    std::fill(masked.begin() + static_cast<std::ptrdiff_t>(iv.start),
              masked.begin() + static_cast<std::ptrdiff_t>(iv.start + iv.width), true);
  }
  return masked;
}

}  // namespace

std::vector<MaskInterval> MaskSpec::normalized() const {
  std::vector<MaskInterval> sorted;
  for (const auto& iv : intervals) {
    if (iv.width > 0) sorted.push_back(iv);
  }
  std::sort(sorted.begin(), sorted.end(), [](const MaskInterval& a, const MaskInterval& b) {
    return a.start < b.start || (a.start == b.start && a.width < b.width);
  });
  std::vector<MaskInterval> merged;
  for (const auto& iv : sorted) {
    if (!merged.empty() && iv.start <= merged.back().start + merged.back().width) {
      const std::size_t end = std::max(merged.back().start + merged.back().width, iv.start + iv.width);
      merged.back().width = end - merged.back().start;
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

std::size_t MaskSpec::masked_frames() const {
  std::size_t total = 0;
  for (const auto& iv : normalized()) total += iv.width;
  return total;
}

MaskSpec sample_time_masks(std::size_t num_frames, int n_masks, int max_width,
                           std::uint64_t seed, MaskFill fill) {
  return sample_intervals(num_frames, n_masks, max_width, seed, fill, "sample_time_masks");
}

MaskSpec sample_freq_masks(std::size_t dim, int n_masks, int max_width, std::uint64_t seed) {
  return sample_intervals(dim, n_masks, max_width, seed, MaskFill::kZeros, "sample_freq_masks");
}

FeatureMatrix apply_masks(const FeatureMatrix& feat, const MaskSpec& spec) {
  const std::size_t frames = feat.num_frames();
  const std::vector<bool> masked = masked_flags(spec, frames);
  FeatureMatrix out = feat;
  if (std::none_of(masked.begin(), masked.end(), [](bool b) { return b; })) return out;

  std::vector<double> fill(feat.dim(), 0.0);
  if (spec.fill == MaskFill::kUtteranceMean) {
    std::size_t kept = 0;
    for (std::size_t t = 0; t < frames; ++t) {
      if (masked[t]) continue;
      ++kept;
      const auto row = feat.data.row(t);
      for (std::size_t d = 0; d < row.size(); ++d) fill[d] += row[d];
    }
    // Fully masked utterance: nothing to average, zeros it is.
    if (kept > 0) {
      for (double& v : fill) v /= static_cast<double>(kept);
    }
  }
  for (std::size_t t = 0; t < frames; ++t) {
    if (masked[t]) std::copy(fill.begin(), fill.end(), out.data.row(t).begin());
  }
  return out;
}

FeatureMatrix apply_freq_masks(const FeatureMatrix& feat, const MaskSpec& spec) {
  const std::vector<bool> masked = masked_flags(spec, feat.dim());
  FeatureMatrix out = feat;
  for (std::size_t d = 0; d < feat.dim(); ++d) {
    if (!masked[d]) continue;
    double value = 0.0;
    if (spec.fill == MaskFill::kUtteranceMean && feat.num_frames() > 0) {
      for (std::size_t t = 0; t < feat.num_frames(); ++t) value += feat.data(t, d);
      value /= static_cast<double>(feat.num_frames());
    }
    for (std::size_t t = 0; t < feat.num_frames(); ++t) out.data(t, d) = value;
  }
  return out;
}

FeatureMatrix augment(const FeatureMatrix& feat, const AugmentConfig& cfg, std::uint64_t seed) {
  const int time_width =
      std::min<int>(cfg.max_time_width, static_cast<int>(feat.num_frames()));
  MaskSpec time = sample_time_masks(feat.num_frames(), cfg.n_time_masks, time_width, seed, cfg.fill);
  FeatureMatrix out = apply_masks(feat, time);
  if (cfg.n_freq_masks > 0) {
    const int freq_width = std::min<int>(cfg.max_freq_width, static_cast<int>(feat.dim()));
    MaskSpec freq = sample_freq_masks(feat.dim(), cfg.n_freq_masks, freq_width,
                                      seed ^ 0x9E3779B97F4A7C15ULL);
    freq.fill = cfg.fill;
    out = apply_freq_masks(out, freq);
  }
  return out;
}

const char* to_string(MaskFill fill) {
  return fill == MaskFill::kZeros ? "zeros" : "utterance_mean";
}

MaskFill mask_fill_from_string(const std::string& name) {
  if (name == "zeros") return MaskFill::kZeros;
  if (name == "utterance_mean") return MaskFill::kUtteranceMean;
  throw InvalidArgument("unknown mask fill '" + name + "'");
}

void to_json(nlohmann::json& j, const MaskSpec& spec) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : spec.intervals) intervals.push_back({iv.start, iv.width});
  j = nlohmann::json{{"fill", to_string(spec.fill)}, {"intervals", intervals}};
}

void from_json(const nlohmann::json& j, MaskSpec& spec) {
  spec.fill = mask_fill_from_string(j.at("fill").get<std::string>());
  spec.intervals.clear();
  for (const auto& iv : j.at("intervals")) {
    spec.intervals.push_back({iv.at(0).get<std::size_t>(), iv.at(1).get<std::size_t>()});
  }
}

void to_json(nlohmann::json& j, const AugmentConfig& cfg) {
  j = nlohmann::json{{"n_time_masks", cfg.n_time_masks},
                     {"max_time_width", cfg.max_time_width},
                     {"fill", to_string(cfg.fill)},
                     {"n_freq_masks", cfg.n_freq_masks},
                     {"max_freq_width", cfg.max_freq_width}};
}

void from_json(const nlohmann::json& j, AugmentConfig& cfg) {
  cfg.n_time_masks = j.value("n_time_masks", cfg.n_time_masks);
  cfg.max_time_width = j.value("max_time_width", cfg.max_time_width);
  cfg.fill = mask_fill_from_string(j.value("fill", std::string(to_string(cfg.fill))));
  cfg.n_freq_masks = j.value("n_freq_masks", cfg.n_freq_masks);
  cfg.max_freq_width = j.value("max_freq_width", cfg.max_freq_width);
}

}  // namespace whisperkit
