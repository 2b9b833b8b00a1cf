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

#include "whisperkit/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "whisperkit/text.h"

namespace whisperkit {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::vector<std::string> utf8_code_points(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw InvalidArgument("vocabulary: empty symbol");
    if (!index_.emplace(symbols_[i], static_cast<int>(i) + 1).second) {
      throw InvalidArgument("vocabulary: duplicate symbol '" + symbols_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::from_transcripts(std::span<const std::string> texts) {
  std::set<std::string> seen;
  for (const auto& text : texts) {
    for (auto& cp : utf8_code_points(normalize_text(text))) seen.insert(std::move(cp));
  }
  return Vocabulary(std::vector<std::string>(seen.begin(), seen.end()));
}

const std::string& Vocabulary::symbol(int id) const {
  if (id < 1 || id > size()) throw InvalidArgument("vocabulary: id " + std::to_string(id) + " out of range");
  return symbols_[static_cast<std::size_t>(id - 1)];
}

TokenSeq Vocabulary::encode(std::string_view text) const {
  TokenSeq ids;
  for (const auto& cp : utf8_code_points(normalize_text(text))) {
    const auto it = index_.find(cp);
    if (it == index_.end()) throw InvalidArgument("vocabulary: unknown character '" + cp + "'");
    ids.push_back(it->second);
  }
  return ids;
}

std::string Vocabulary::decode(const TokenSeq& ids) const {
  std::string out;
  for (int id : ids) out += symbol(id);
  return out;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    const auto row = logits.row(t);
    const double norm = log_sum_exp(row);
    auto dst = out.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) dst[k] = row[k] - norm;
  }
  return out;
}

EmissionMatrix EmissionMatrix::from_logprobs(Matrix logprobs) {
  if (logprobs.rows() == 0) throw InvalidArgument("emissions: need at least one frame");
  if (logprobs.cols() < 2) throw InvalidArgument("emissions: need blank plus at least one token");
  for (std::size_t t = 0; t < logprobs.rows(); ++t) {
    const auto row = logprobs.row(t);
    for (double v : row) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw InvalidArgument("emissions: non-finite entry in frame " + std::to_string(t));
      }
    }
    const double total = log_sum_exp(row);
    if (!(std::abs(total) <= 1e-6)) {
      throw InvalidArgument("emissions: frame " + std::to_string(t) +
                            " is not a log-distribution (log-sum-exp " + std::to_string(total) + ")");
    }
  }
  return EmissionMatrix(std::move(logprobs));
}

EmissionMatrix EmissionMatrix::from_logits(const Matrix& logits) {
  return from_logprobs(log_softmax_rows(logits));
}

TokenSeq collapse(std::span<const int> path) {
  TokenSeq out;
  int prev = -1;
  for (int id : path) {
    if (id != prev && id != kBlankId) out.push_back(id);
    prev = id;
  }
  return out;
}

std::size_t min_frames_for(const TokenSeq& target) {
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++repeats;
  }
  return target.size() + repeats;
}

CtcResult ctc_loss(const EmissionMatrix& em, const TokenSeq& target) {
  const std::size_t frames = em.num_frames();
  const int vocab = em.vocab_size();
  for (int id : target) {
    if (id < 1 || id > vocab) {
      throw InvalidArgument("ctc_loss: target id " + std::to_string(id) + " outside [1, " +
                            std::to_string(vocab) + "]");
    }
  }
  const std::size_t required = min_frames_for(target);
  if (frames < required) throw AlignmentInfeasible(frames, required);

  // Blank-interleaved labels: blank, y1, blank, y2, ..., yL, blank.
  const std::size_t states = 2 * target.size() + 1;
  std::vector<int> ext(states, kBlankId);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  const Matrix& lp = em.logprobs();

  // A skip from s-2 to s is allowed onto a label that differs from the
  // previous label.
  auto can_skip = [&](std::size_t s) {
    return s >= 2 && ext[s] != kBlankId && ext[s] != ext[s - 2];
  };

  Matrix alpha(frames, states, kNegInf);
  alpha(0, 0) = lp(0, static_cast<std::size_t>(ext[0]));
  if (states > 1) alpha(0, 1) = lp(0, static_cast<std::size_t>(ext[1]));
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (can_skip(s)) acc = log_add(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) alpha(t, s) = acc + lp(t, static_cast<std::size_t>(ext[s]));
    }
  }

  // beta(t, s): log-probability of frames t+1.. given state s at frame t.
  Matrix beta(frames, states, kNegInf);
  beta(frames - 1, states - 1) = 0.0;
  if (states > 1) beta(frames - 1, states - 2) = 0.0;
  for (std::size_t t = frames - 1; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = beta(t + 1, s) + lp(t + 1, static_cast<std::size_t>(ext[s]));
      if (s + 1 < states) {
        acc = log_add(acc, beta(t + 1, s + 1) + lp(t + 1, static_cast<std::size_t>(ext[s + 1])));
      }
      if (s + 2 < states && can_skip(s + 2)) {
        acc = log_add(acc, beta(t + 1, s + 2) + lp(t + 1, static_cast<std::size_t>(ext[s + 2])));
      }
      beta(t, s) = acc;
    }
  }

  double log_likelihood = alpha(frames - 1, states - 1);
  if (states > 1) log_likelihood = log_add(log_likelihood, alpha(frames - 1, states - 2));

  CtcResult result;
  result.loss = -log_likelihood;
  result.grad = Matrix(frames, em.num_classes());
  std::vector<double> occupancy(em.num_classes());
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kNegInf);
    for (std::size_t s = 0; s < states; ++s) {
      auto& slot = occupancy[static_cast<std::size_t>(ext[s])];
      slot = log_add(slot, alpha(t, s) + beta(t, s));
    }
    auto g = result.grad.row(t);
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = std::exp(lp(t, k)) - std::exp(occupancy[k] - log_likelihood);
    }
  }
  return result;
}

}  // namespace whisperkit
