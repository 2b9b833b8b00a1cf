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

#include "whisperkit/decode.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace whisperkit {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PrefixMass {
  double blank = kNegInf;      // paths ending in blank
  double non_blank = kNegInf;  // paths ending in the prefix's last label
  double total() const { return log_add(blank, non_blank); }
};

}  // namespace

const char* to_string(DecodeMethod method) {
  return method == DecodeMethod::kGreedy ? "greedy" : "beam";
}

DecodeMethod decode_method_from_string(const std::string& name) {
  if (name == "greedy") return DecodeMethod::kGreedy;
  if (name == "beam") return DecodeMethod::kBeam;
  throw InvalidArgument("unknown decode method '" + name + "' (expected greedy or beam)");
}

Hypothesis greedy_decode(const EmissionMatrix& em) {
  std::vector<int> path(em.num_frames());
  double score = 0.0;
  for (std::size_t t = 0; t < em.num_frames(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < em.num_classes(); ++k) {
      if (em(t, k) > em(t, best)) best = k;
    }
    path[t] = static_cast<int>(best);
    score += em(t, best);
  }
  return {collapse(path), score};
}

Hypothesis beam_decode(const EmissionMatrix& em, int beam_width) {
  if (beam_width < 1) throw InvalidArgument("beam_decode: beam_width must be >= 1");
  using Beam = std::vector<std::pair<TokenSeq, PrefixMass>>;
  Beam beam{{TokenSeq{}, PrefixMass{0.0, kNegInf}}};

  for (std::size_t t = 0; t < em.num_frames(); ++t) {
    // Ordered map: deterministic iteration and merge order.
    std::map<TokenSeq, PrefixMass> next;
    const double blank_lp = em(t, kBlankId);
    for (const auto& [prefix, mass] : beam) {
      const double total = mass.total();
      PrefixMass& same = next[prefix];
      same.blank = log_add(same.blank, total + blank_lp);
      const int last = prefix.empty() ? -1 : prefix.back();
      for (std::size_t k = 1; k < em.num_classes(); ++k) {
        const double lp = em(t, k);
        const int id = static_cast<int>(k);
        TokenSeq extended = prefix;
        extended.push_back(id);
        if (id == last) {
          // A repeat only starts a new label after a blank; otherwise it
          // extends the current one.
          PrefixMass& ext = next[extended];
          ext.non_blank = log_add(ext.non_blank, mass.blank + lp);
          PrefixMass& cur = next[prefix];
          cur.non_blank = log_add(cur.non_blank, mass.non_blank + lp);
        } else {
          PrefixMass& ext = next[extended];
          ext.non_blank = log_add(ext.non_blank, total + lp);
        }
      }
    }
    beam.assign(next.begin(), next.end());
    // Stable on the map's lexicographic order, so equal scores keep the
    // smaller prefix first.
    std::stable_sort(beam.begin(), beam.end(), [](const auto& a, const auto& b) {
      return a.second.total() > b.second.total();
    });
    if (beam.size() > static_cast<std::size_t>(beam_width)) {
      beam.resize(static_cast<std::size_t>(beam_width));
    }
  }
  return {beam.front().first, beam.front().second.total()};
}

Hypothesis decode(const EmissionMatrix& em, DecodeMethod method, int beam_width) {
  return method == DecodeMethod::kGreedy ? greedy_decode(em) : beam_decode(em, beam_width);
}

}  // namespace whisperkit
