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

#include "test_util.h"
#include "whisperkit/error.h"
#include "whisperkit/random.h"
#include "whisperkit/trainer.h"

using namespace whisperkit;

namespace {

// Independent scalar Adam, no weight decay.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double theta, double g, double lr, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    return theta - lr * mh / (std::sqrt(vh) + eps);
  }
};

ModelParams one_param(double value) {
  ModelParams p = ModelParams::zeros(1, 0, 1, 1);
  p.w1(0, 0) = value;
  return p;
}

// Two tokens: 'a' is a harmonic burst, 'b' a noise burst, alternating, with
// short noise-floor edges.
std::vector<TrainingExample> two_token_corpus(std::size_t n, std::uint64_t seed, Vocabulary& vocab) {
  Rng rng(seed);
  const std::vector<std::string> alphabet{"ab"};
  vocab = Vocabulary::from_transcripts(alphabet);
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto len = rng.uniform_int(2, 4);
    std::string text;
    char next = rng.uniform_int(0, 1) == 0 ? 'a' : 'b';
    AudioBuffer audio;
    audio.samples.assign(800, 0.0);
    for (int k = 0; k < len; ++k) {
      text.push_back(next);
      const double dur = rng.uniform(0.1, 0.15);
      const AudioBuffer ev =
          next == 'a' ? synthesize(signal::HarmonicSeries{rng.uniform(120.0, 200.0), 15, -12.0, 0.6}, dur, 16000)
                      : synthesize(signal::WhiteNoise{0.25, rng.next_u64()}, dur, 16000);
      audio.samples.insert(audio.samples.end(), ev.samples.begin(), ev.samples.end());
      next = next == 'a' ? 'b' : 'a';
    }
    audio.samples.resize(audio.samples.size() + 800, 0.0);
    for (double& s : audio.samples) s += 0.002 * rng.uniform(-1.0, 1.0);
    out.push_back({"u" + std::to_string(i), model_features(audio, FeatureConfig{}), vocab.encode(text)});
  }
  return out;
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.lr = 3e-3;
  cfg.lr_schedule = LrSchedule::kConstant;
  cfg.augment.n_time_masks = 0;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("zero gradient without decay leaves params, counts the step") {
  ModelParams p = one_param(0.7);
  OptimizerState s = OptimizerState::for_params(p);
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  adamw_step(p, p.zeros_like(), s, cfg, 0.1);
  CHECK(p.w1(0, 0) == 0.7);
  CHECK(s.step_count == 1);
}

TEST_CASE("hand-computed first steps") {
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  ModelParams p = one_param(1.0);
  OptimizerState s = OptimizerState::for_params(p);
  ModelParams g = p.zeros_like();
  g.w1(0, 0) = 1.0;
  adamw_step(p, g, s, cfg, 0.1);
  CHECK(std::abs(p.w1(0, 0) - (1.0 - 0.1 / (1.0 + 1e-8))) < 1e-9);
  CHECK(std::abs(p.w1(0, 0) - 0.9) < 1e-7);

  cfg.weight_decay = 0.01;
  ModelParams q = one_param(1.0);
  OptimizerState s2 = OptimizerState::for_params(q);
  adamw_step(q, q.zeros_like(), s2, cfg, 0.1);
  CHECK(std::abs(q.w1(0, 0) - 0.999) < 1e-9);
}

TEST_CASE("wd=0 matches scalar Adam over 100 steps") {
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  ModelParams p = ModelParams::zeros(2, 0, 2, 1);
  Rng rng(4);
  for (auto t : p.tensors()) {
    for (double& x : t) x = rng.normal();
  }
  std::vector<double> flat;
  for (auto t : p.tensors()) flat.insert(flat.end(), t.begin(), t.end());
  std::vector<ScalarAdam> oracle(flat.size());
  OptimizerState s = OptimizerState::for_params(p);
  double worst = 0.0;
  for (int step = 0; step < 100; ++step) {
    ModelParams g = p.zeros_like();
    std::size_t idx = 0;
    for (auto t : g.tensors()) {
      for (double& x : t) {
        x = rng.normal() + 0.1 * flat[idx];
        flat[idx] = oracle[idx].step(flat[idx], x, 0.01);
        ++idx;
      }
    }
    adamw_step(p, g, s, cfg, 0.01);
    idx = 0;
    for (auto t : p.tensors()) {
      for (double x : t) worst = std::max(worst, std::abs(x - flat[idx++]));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("weight decay adds exactly -lr*wd*theta") {
  Rng rng(6);
  ModelParams p = ModelParams::zeros(2, 0, 2, 1);
  for (auto t : p.tensors()) {
    for (double& x : t) x = rng.normal();
  }
  ModelParams g = p.zeros_like();
  for (auto t : g.tensors()) {
    for (double& x : t) x = rng.normal();
  }
  TrainConfig plain, decayed;
  plain.weight_decay = 0.0;
  decayed.weight_decay = 0.05;
  ModelParams a = p, b = p;
  OptimizerState sa = OptimizerState::for_params(p), sb = OptimizerState::for_params(p);
  adamw_step(a, g, sa, plain, 0.02);
  adamw_step(b, g, sb, decayed, 0.02);
  const auto ta = a.tensors(), tb = b.tensors(), t0 = p.tensors();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < ta[i].size(); ++j) {
      CHECK(std::abs((ta[i][j] - tb[i][j]) - 0.02 * 0.05 * t0[i][j]) < 1e-15);
    }
  }
}

TEST_CASE("non-finite gradient is rejected without touching state") {
  ModelParams p = one_param(1.0);
  OptimizerState s = OptimizerState::for_params(p);
  ModelParams g = p.zeros_like();
  g.w1(0, 0) = std::nan("");
  TrainConfig cfg;
  CHECK_THROWS_AS(adamw_step(p, g, s, cfg), NonFiniteGradient);
  CHECK(p.w1(0, 0) == 1.0);
  CHECK(s.step_count == 0);
}

TEST_CASE("learning-rate schedule") {
  TrainConfig cfg;
  cfg.lr = 1.0;
  CHECK(scheduled_lr(cfg, 0, 100) == doctest::Approx(0.1));
  CHECK(scheduled_lr(cfg, 9, 100) == doctest::Approx(1.0));
  CHECK(scheduled_lr(cfg, 10, 100) == doctest::Approx(1.0));
  CHECK(scheduled_lr(cfg, 55, 100) == doctest::Approx(0.5));
  CHECK(scheduled_lr(cfg, 99, 100) > 0.0);
  for (std::int64_t s = 10; s < 100; ++s) CHECK(scheduled_lr(cfg, s + 1, 100) <= scheduled_lr(cfg, s, 100));
  cfg.lr_schedule = LrSchedule::kConstant;
  CHECK(scheduled_lr(cfg, 50, 100) == 1.0);
}

TEST_CASE("config validation and json") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  TrainConfig bad = cfg;
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.lr = -1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.lr = 0.0;
  CHECK_NOTHROW(bad.validate());
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  const nlohmann::json j = cfg;
  const TrainConfig back = j.get<TrainConfig>();
  CHECK(back.epochs == 25);
  CHECK(back.batch_size == 6);
  CHECK(back.augment.n_time_masks == 2);
}

TEST_CASE("training on a two-token corpus") {
  Vocabulary vocab;
  const auto data = two_token_corpus(36, 3, vocab);
  ModelConfig mcfg;
  mcfg.seed = 11;

  SUBCASE("loss strictly decreases over the first five epochs") {
    const TrainResult r = train(data, 3, mcfg, quick_config());
    REQUIRE(r.epochs.size() == 5);
    for (std::size_t e = 1; e < 5; ++e) CHECK(r.epochs[e].mean_loss < r.epochs[e - 1].mean_loss);
  }
  SUBCASE("identical runs give identical traces") {
    TrainConfig cfg = quick_config();
    cfg.epochs = 2;
    cfg.augment.n_time_masks = 2;
    const TrainResult a = train(data, 3, mcfg, cfg);
    const TrainResult b = train(data, 3, mcfg, cfg);
    CHECK(a.params == b.params);
    for (std::size_t e = 0; e < 2; ++e) CHECK(a.epochs[e].mean_loss == b.epochs[e].mean_loss);
  }
  SUBCASE("zero learning rate leaves the initial parameters") {
    TrainConfig cfg = quick_config();
    cfg.epochs = 1;
    cfg.lr = 0.0;
    const TrainResult r = train(data, 3, mcfg, cfg);
    CHECK(r.params == init_params(data.front().features.dim(), 3, mcfg));
  }
}

TEST_CASE("infeasible utterances are skipped and counted") {
  Vocabulary vocab;
  auto data = two_token_corpus(6, 5, vocab);
  data[2].target = TokenSeq(data[2].features.num_frames() + 1, 1);
  data[4].features.data = Matrix(1, data[4].features.dim(), 0.0);
  data[4].target = {1, 2};
  ModelConfig mcfg;
  TrainConfig cfg = quick_config();
  cfg.epochs = 1;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.seed = seed;
    const TrainResult r = train(data, 3, mcfg, cfg);
    CHECK(r.skipped == 2);
    CHECK(r.epochs[0].skipped == 2);
  }
  CHECK_THROWS_AS(train({}, 3, mcfg, cfg), InvalidArgument);
}
