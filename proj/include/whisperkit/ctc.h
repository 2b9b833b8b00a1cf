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

#ifndef WHISPERKIT_CTC_H_
#define WHISPERKIT_CTC_H_

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "whisperkit/error.h"
#include "whisperkit/matrix.h"

namespace whisperkit {

inline constexpr int kBlankId = 0;

// Label ids, blanks excluded; every id is in [1, V].
using TokenSeq = std::vector<int>;

// Character-level symbol table. Symbol i (0-based) has id i + 1; id 0 is
// the CTC blank and never appears in a transcript.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws InvalidArgument on duplicate or empty symbols.
  explicit Vocabulary(std::vector<std::string> symbols);

  // Sorted distinct characters (UTF-8 code points) of the normalized texts.
  static Vocabulary from_transcripts(std::span<const std::string> texts);

  // Number of non-blank symbols, V.
  int size() const { return static_cast<int>(symbols_.size()); }
  int num_classes() const { return size() + 1; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(int id) const;

  // Normalizes the text, then maps each code point to its id. Throws
  // InvalidArgument naming the first unknown character.
  TokenSeq encode(std::string_view text) const;
  std::string decode(const TokenSeq& ids) const;

  bool operator==(const Vocabulary& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

// Splits UTF-8 text into code points (invalid bytes become single units).
std::vector<std::string> utf8_code_points(std::string_view text);

// T x (V+1) per-frame log-probabilities; column 0 is the blank.
class EmissionMatrix {
 public:
  // Throws InvalidArgument for T = 0, fewer than two columns, non-finite
  // entries, or a row whose log-sum-exp is not 0 within 1e-6.
  static EmissionMatrix from_logprobs(Matrix logprobs);
  // Applies a row-wise log-softmax.
  static EmissionMatrix from_logits(const Matrix& logits);

  std::size_t num_frames() const { return logprobs_.rows(); }
  std::size_t num_classes() const { return logprobs_.cols(); }
  int vocab_size() const { return static_cast<int>(logprobs_.cols()) - 1; }
  const Matrix& logprobs() const { return logprobs_; }
  double operator()(std::size_t t, std::size_t k) const { return logprobs_(t, k); }

 private:
  explicit EmissionMatrix(Matrix m) : logprobs_(std::move(m)) {}
  Matrix logprobs_;
};

// Row-wise log-softmax.
Matrix log_softmax_rows(const Matrix& logits);

// Merge adjacent repeats, then delete blanks.
TokenSeq collapse(std::span<const int> path);

// Minimum frames needed to emit `target`: its length plus one separating
// blank per adjacent equal pair.
std::size_t min_frames_for(const TokenSeq& target);

// The target cannot be aligned to the available frames.
class AlignmentInfeasible : public Error {
 public:
  AlignmentInfeasible(std::size_t frames, std::size_t required)
      : Error("alignment infeasible: " + std::to_string(frames) + " frames, need " +
              std::to_string(required)),
        frames_(frames),
        required_(required) {}
  std::size_t frames() const { return frames_; }
  std::size_t required() const { return required_; }

 private:
  std::size_t frames_;
  std::size_t required_;
};

struct CtcResult {
  double loss = 0.0;
  // d loss / d z at z = logprobs, where the emissions are read as
  // log_softmax(z). Equals softmax(z) - occupancy, so every row sums to 0
  // and it backpropagates straight into pre-softmax logits.
  Matrix grad;
};

// Exact negative log-likelihood of `target` by forward-backward over the
// blank-interleaved label sequence, entirely in the log domain. Throws
// AlignmentInfeasible when T < min_frames_for(target) and InvalidArgument
// for ids outside [1, V].
CtcResult ctc_loss(const EmissionMatrix& em, const TokenSeq& target);

}  // namespace whisperkit

#endif  // WHISPERKIT_CTC_H_
