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

#ifndef WHISPERKIT_TRAINER_H_
#define WHISPERKIT_TRAINER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "whisperkit/augment.h"
#include "whisperkit/ctc.h"
#include "whisperkit/features.h"
#include "whisperkit/manifest.h"
#include "whisperkit/model.h"

namespace whisperkit {

enum class LrSchedule {
  kConstant,
  // Linear ramp from 0 to lr over the warmup steps, then linear decay to 0
  // at the final step.
  kLinearWarmupDecay,
};

struct TrainConfig {
  int epochs = 25;
  int batch_size = 6;
  double lr = 3e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  LrSchedule lr_schedule = LrSchedule::kLinearWarmupDecay;
  int warmup_steps = -1;  // negative: 10% of all steps
  std::uint64_t seed = 0;
  AugmentConfig augment;

  // Throws InvalidArgument unless epochs >= 0, batch_size > 0, lr >= 0 and
  // both betas lie in (0, 1).
  void validate() const;
};

// Adam moments, shaped like the parameters.
struct OptimizerState {
  ModelParams m;
  ModelParams v;
  std::int64_t step_count = 0;

  static OptimizerState for_params(const ModelParams& params);
};

class NonFiniteGradient : public Error {
 public:
  using Error::Error;
};

// One decoupled-weight-decay Adam update at learning rate `lr`:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * theta
// with the decay term using the pre-update theta. Throws NonFiniteGradient
// (leaving params and state untouched) if any gradient entry is NaN/inf.
void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                const TrainConfig& cfg, double lr);
inline void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                       const TrainConfig& cfg) {
  adamw_step(params, grads, state, cfg, cfg.lr);
}

// Learning rate for 0-based `step` out of `total_steps`.
double scheduled_lr(const TrainConfig& cfg, std::int64_t step, std::int64_t total_steps);

struct TrainingExample {
  std::string utt_id;
  FeatureMatrix features;
  TokenSeq target;
};

struct EpochStats {
  int epoch = 0;           // 1-based
  double mean_loss = 0.0;  // mean over trained utterances of the pre-update loss
  std::size_t skipped = 0;
  double lr = 0.0;         // learning rate of the epoch's last step
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochStats> epochs;
  std::size_t skipped = 0;  // infeasible utterances, skipped every epoch
};

using EpochCallback = std::function<void(const EpochStats&)>;

// AdamW over length-bucketed batches with on-the-fly time masking. Batches
// are consecutive runs of the length-sorted utterances, visited in a seeded
// shuffled order each epoch; each utterance's loss is computed on its own
// frames so no padding is ever materialized. The batch gradient is the mean
// over its utterances. Utterances whose target cannot be aligned are
// skipped. Deterministic for a fixed (examples, configs). Throws
// InvalidArgument when `examples` is empty.
TrainResult train(const std::vector<TrainingExample>& examples, std::size_t num_classes,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const EpochCallback& on_epoch = {});

// Log-mel, mean/variance normalized: the model's input representation.
FeatureMatrix model_features(const AudioBuffer& buf, const FeatureConfig& cfg);

struct TrainingData {
  std::vector<TrainingExample> examples;
  Vocabulary vocab;
  std::vector<std::string> missing_transcript;  // skipped rows
  std::vector<std::string> unreadable;          // audio or feature failures
};

// Builds examples from the manifest's train-split records; the vocabulary
// is derived from their transcripts unless one is supplied.
TrainingData prepare_training_data(const Manifest& manifest, const FeatureConfig& feature_cfg,
                                   const Vocabulary* vocab = nullptr);

const char* to_string(LrSchedule schedule);
LrSchedule lr_schedule_from_string(const std::string& name);

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);
void to_json(nlohmann::json& j, const EpochStats& stats);

}  // namespace whisperkit

#endif  // WHISPERKIT_TRAINER_H_
