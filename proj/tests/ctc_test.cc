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
#include <functional>
#include <limits>

#include "whisperkit/ctc.h"
#include "whisperkit/error.h"
#include "whisperkit/random.h"

using namespace whisperkit;

namespace {

Matrix random_logits(Rng& rng, std::size_t t, std::size_t k, double scale = 2.0) {
  Matrix m(t, k);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

// Sum over every path in (V+1)^T whose collapse equals the target.
double brute_force_nll(const Matrix& logprobs, const TokenSeq& target) {
  const std::size_t frames = logprobs.rows();
  const std::size_t k = logprobs.cols();
  std::vector<int> path(frames, 0);
  double total = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double)> walk = [&](std::size_t t, double score) {
    if (t == frames) {
      if (collapse(path) == target) total = log_add(total, score);
      return;
    }
    for (std::size_t c = 0; c < k; ++c) {
      path[t] = static_cast<int>(c);
      walk(t + 1, score + logprobs(t, c));
    }
  };
  walk(0, 0.0);
  return -total;
}

TokenSeq random_target(Rng& rng, int vocab, std::size_t frames) {
  for (;;) {
    TokenSeq y(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(frames))));
    for (int& id : y) id = static_cast<int>(rng.uniform_int(1, vocab));
    if (min_frames_for(y) <= frames) return y;
  }
}

}  // namespace

TEST_CASE("collapse merges repeats then drops blanks") {
  const std::vector<int> path{1, 1, 0, 1, 2, 2, 0, 0, 2};
  CHECK(collapse(path) == TokenSeq{1, 1, 2, 2});
  CHECK(collapse(std::vector<int>{0, 0}).empty());
  CHECK(min_frames_for({1, 1, 2}) == 4);
  CHECK(min_frames_for({}) == 0);
}

TEST_CASE("single frame single token") {
  // Uniform over {blank, a}: the only path is 'a'.
  Matrix lp(1, 2, std::log(0.5));
  const auto r = ctc_loss(EmissionMatrix::from_logprobs(lp), {1});
  CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("two frames, uniform, target 'a'") {
  // Paths a-a, a-blank, blank-a: probability 3/4 out of 4 equally likely paths.
  Matrix lp(2, 2, std::log(0.5));
  const auto r = ctc_loss(EmissionMatrix::from_logprobs(lp), {1});
  CHECK(r.loss == doctest::Approx(-std::log(0.75)).epsilon(1e-12));
}

TEST_CASE("empty target is the all-blank path") {
  Rng rng(3);
  const auto em = EmissionMatrix::from_logits(random_logits(rng, 4, 3));
  double expected = 0.0;
  for (std::size_t t = 0; t < 4; ++t) expected -= em(t, 0);
  CHECK(ctc_loss(em, {}).loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("infeasible alignment throws") {
  Matrix lp(2, 2, std::log(0.5));
  const auto em = EmissionMatrix::from_logprobs(lp);
  CHECK_THROWS_AS(ctc_loss(em, {1, 1}), AlignmentInfeasible);
  try {
    ctc_loss(em, {1, 1});
  } catch (const AlignmentInfeasible& e) {
    CHECK(e.frames() == 2);
    CHECK(e.required() == 3);
  }
  CHECK_THROWS_AS(ctc_loss(em, {2}), InvalidArgument);
}

TEST_CASE("emission validation") {
  CHECK_THROWS_AS(EmissionMatrix::from_logprobs(Matrix(0, 2)), InvalidArgument);
  CHECK_THROWS_AS(EmissionMatrix::from_logprobs(Matrix(1, 1, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(EmissionMatrix::from_logprobs(Matrix(2, 2, 0.0)), InvalidArgument);
  Matrix nan(1, 2, std::log(0.5));
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(EmissionMatrix::from_logprobs(nan), InvalidArgument);
  Matrix with_neg_inf(1, 2, 0.0);
  with_neg_inf(0, 1) = -std::numeric_limits<double>::infinity();
  CHECK_NOTHROW(EmissionMatrix::from_logprobs(with_neg_inf));
}

TEST_CASE("loss matches brute-force path enumeration") {
  Rng rng(20261017);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto frames = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto vocab = static_cast<int>(rng.uniform_int(1, 3));
    const Matrix lp = log_softmax_rows(random_logits(rng, frames, static_cast<std::size_t>(vocab) + 1));
    const TokenSeq y = random_target(rng, vocab, frames);
    const double got = ctc_loss(EmissionMatrix::from_logprobs(lp), y).loss;
    worst = std::max(worst, std::abs(got - brute_force_nll(lp, y)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("gradient rows sum to zero and match finite differences") {
  Rng rng(7);
  const double h = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const auto frames = static_cast<std::size_t>(rng.uniform_int(2, 6));
    const auto vocab = static_cast<int>(rng.uniform_int(1, 3));
    const Matrix z = random_logits(rng, frames, static_cast<std::size_t>(vocab) + 1);
    const TokenSeq y = random_target(rng, vocab, frames);
    const auto r = ctc_loss(EmissionMatrix::from_logits(z), y);
    for (std::size_t t = 0; t < frames; ++t) {
      double row_sum = 0.0;
      for (double g : r.grad.row(t)) row_sum += g;
      CHECK(std::abs(row_sum) < 1e-10);
      for (std::size_t k = 0; k < z.cols(); ++k) {
        Matrix plus = z, minus = z;
        plus(t, k) += h;
        minus(t, k) -= h;
        const double fd = (ctc_loss(EmissionMatrix::from_logits(plus), y).loss -
                           ctc_loss(EmissionMatrix::from_logits(minus), y).loss) /
                          (2 * h);
        CHECK(std::abs(fd - r.grad(t, k)) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("loss is non-negative and probability mass over targets is at most one") {
  Rng rng(11);
  const std::size_t frames = 3;
  const Matrix lp = log_softmax_rows(random_logits(rng, frames, 3));
  const auto em = EmissionMatrix::from_logprobs(lp);
  double mass = 0.0;
  // Every label sequence of length <= 3 over {1, 2}.
  std::vector<TokenSeq> all{{}};
  for (std::size_t len = 1; len <= frames; ++len) {
    std::vector<TokenSeq> next;
    for (const auto& y : all) {
      if (y.size() != len - 1) continue;
      for (int c = 1; c <= 2; ++c) {
        TokenSeq z = y;
        z.push_back(c);
        next.push_back(z);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
  }
  for (const auto& y : all) {
    if (min_frames_for(y) > frames) continue;
    const double loss = ctc_loss(em, y).loss;
    CHECK(loss >= 0.0);
    mass += std::exp(-loss);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vocabulary") {
  const std::vector<std::string> texts{"Hello, World", "héllo"};
  const Vocabulary v = Vocabulary::from_transcripts(texts);
  CHECK(v.encode("hello") == TokenSeq{v.encode("h")[0], v.encode("e")[0], v.encode("l")[0],
                                      v.encode("l")[0], v.encode("o")[0]});
  CHECK(v.decode(v.encode("World hello")) == "world hello");
  CHECK(v.decode(v.encode("héllo")) == "héllo");
  CHECK_THROWS_AS(v.encode("xyz"), InvalidArgument);
  CHECK_THROWS_AS(v.symbol(0), InvalidArgument);
  CHECK(v.symbol(1) == " ");
}
