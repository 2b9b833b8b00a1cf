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

#include "whisperkit/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "whisperkit/log.h"
#include "whisperkit/random.h"
#include "whisperkit/text.h"

namespace whisperkit {
namespace {

// Mixes seed, epoch and utterance position into an independent mask seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw InvalidArgument("train config: epochs must be >= 0");
  if (batch_size <= 0) throw InvalidArgument("train config: batch_size must be positive");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("train config: lr must be >= 0");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("train config: betas must lie in (0, 1)");
  }
  if (!(eps > 0.0)) throw InvalidArgument("train config: eps must be positive");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("train config: weight_decay must be >= 0");
}

OptimizerState OptimizerState::for_params(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
                const TrainConfig& cfg, double lr) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v)) {
    throw InvalidArgument("adamw_step: shape mismatch");
  }
  if (!grads.all_finite()) throw NonFiniteGradient("adamw_step: non-finite gradient, step rejected");

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  auto theta = params.tensors();
  const auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = 0; j < theta[i].size(); ++j) {
      const double gj = g[i][j];
      m[i][j] = cfg.beta1 * m[i][j] + (1.0 - cfg.beta1) * gj;
      v[i][j] = cfg.beta2 * v[i][j] + (1.0 - cfg.beta2) * gj * gj;
      const double m_hat = m[i][j] / correction1;
      const double v_hat = v[i][j] / correction2;
      const double old = theta[i][j];
      theta[i][j] = old - lr * m_hat / (std::sqrt(v_hat) + cfg.eps) - lr * cfg.weight_decay * old;
    }
  }
}

double scheduled_lr(const TrainConfig& cfg, std::int64_t step, std::int64_t total_steps) {
  if (cfg.lr_schedule == LrSchedule::kConstant || total_steps <= 0) return cfg.lr;
  const std::int64_t warmup =
      cfg.warmup_steps >= 0 ? cfg.warmup_steps : std::max<std::int64_t>(1, total_steps / 10);
  if (step < warmup) {
    return cfg.lr * static_cast<double>(step + 1) / static_cast<double>(warmup);
  }
  const std::int64_t decay_steps = total_steps - warmup;
  if (decay_steps <= 0) return cfg.lr;
  const double remaining = static_cast<double>(total_steps - step) / static_cast<double>(decay_steps);
  return cfg.lr * std::clamp(remaining, 0.0, 1.0);
}

TrainResult train(const std::vector<TrainingExample>& examples, std::size_t num_classes,
                  const ModelConfig& model_cfg, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (examples.empty()) throw InvalidArgument("train: empty training set");
  const std::size_t dim = examples.front().features.dim();
  for (const auto& ex : examples) {
    if (ex.features.dim() != dim) {
      throw InvalidArgument("train: utterance '" + ex.utt_id + "' has feature dim " +
                            std::to_string(ex.features.dim()) + ", expected " + std::to_string(dim));
    }
  }

  TrainResult result;
  result.params = init_params(dim, num_classes, model_cfg);

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (ex.features.num_frames() < std::max<std::size_t>(1, min_frames_for(ex.target))) {
      ++result.skipped;
      WK_LOG(kInfo) << "skipping '" << ex.utt_id << "': " << ex.features.num_frames()
                    << " frames cannot align " << ex.target.size() << " labels";
      continue;
    }
    usable.push_back(i);
  }
  if (result.skipped > 0) {
    WK_LOG(kWarning) << result.skipped << " of " << examples.size()
                     << " utterances skipped as infeasible";
  }

  // Length buckets: sort by (frames, utt_id), then cut into batches.
  std::sort(usable.begin(), usable.end(), [&](std::size_t a, std::size_t b) {
    const auto fa = examples[a].features.num_frames(), fb = examples[b].features.num_frames();
    return fa != fb ? fa < fb : examples[a].utt_id < examples[b].utt_id;
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < usable.size(); i += static_cast<std::size_t>(cfg.batch_size)) {
    const std::size_t end = std::min(usable.size(), i + static_cast<std::size_t>(cfg.batch_size));
    batches.emplace_back(usable.begin() + static_cast<std::ptrdiff_t>(i),
                         usable.begin() + static_cast<std::ptrdiff_t>(end));
  }

  OptimizerState state = OptimizerState::for_params(result.params);
  const auto total_steps = static_cast<std::int64_t>(batches.size()) * cfg.epochs;
  std::int64_t step = 0;
  Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(batches.size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    double lr = cfg.lr;
    for (std::size_t b : order) {
      const auto& batch = batches[b];
      ModelParams grad = result.params.zeros_like();
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t idx : batch) {
        const TrainingExample& ex = examples[idx];
        const FeatureMatrix masked =
            augment(ex.features, cfg.augment, mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch), idx));
        const EmissionMatrix em = forward(result.params, masked);
        const CtcResult ctc = ctc_loss(em, ex.target);
        loss_sum += ctc.loss;
        ++loss_count;
        accumulate(grad, backward(result.params, masked, ctc.grad), scale);
      }
      lr = scheduled_lr(cfg, step, total_steps);
      adamw_step(result.params, grad, state, cfg, lr);
      ++step;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    stats.skipped = result.skipped;
    stats.lr = lr;
    WK_LOG(kInfo) << "epoch " << epoch << " mean loss " << stats.mean_loss << " lr " << lr;
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

FeatureMatrix model_features(const AudioBuffer& buf, const FeatureConfig& cfg) {
  return normalize_mean_variance(extract_log_mel(buf, cfg));
}

TrainingData prepare_training_data(const Manifest& manifest, const FeatureConfig& feature_cfg,
                                   const Vocabulary* vocab) {
  TrainingData data;
  std::vector<const UtteranceRecord*> rows;
  for (const auto& rec : manifest.records) {
    if (rec.split != Split::kTrain) continue;
    if (normalize_text(rec.transcript).empty()) {
      data.missing_transcript.push_back(rec.utt_id);
      continue;
    }
    rows.push_back(&rec);
  }
  if (vocab != nullptr) {
    data.vocab = *vocab;
  } else {
    std::vector<std::string> texts;
    for (const auto* rec : rows) texts.push_back(rec->transcript);
    data.vocab = Vocabulary::from_transcripts(texts);
  }
  for (const auto* rec : rows) {
    try {
      TrainingExample ex;
      ex.utt_id = rec->utt_id;
      ex.target = data.vocab.encode(rec->transcript);
      ex.features = model_features(load_wav(manifest.resolve(*rec)), feature_cfg);
      data.examples.push_back(std::move(ex));
    } catch (const Error& e) {
      WK_LOG(kWarning) << "cannot use '" << rec->utt_id << "': " << e.what();
      data.unreadable.push_back(rec->utt_id);
    }
  }
  return data;
}

const char* to_string(LrSchedule schedule) {
  return schedule == LrSchedule::kConstant ? "constant" : "linear_warmup_decay";
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::kConstant;
  if (name == "linear_warmup_decay") return LrSchedule::kLinearWarmupDecay;
  throw InvalidArgument("unknown lr schedule '" + name + "'");
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"epochs", cfg.epochs},
                     {"batch_size", cfg.batch_size},
                     {"lr", cfg.lr},
                     {"beta1", cfg.beta1},
                     {"beta2", cfg.beta2},
                     {"eps", cfg.eps},
                     {"weight_decay", cfg.weight_decay},
                     {"lr_schedule", to_string(cfg.lr_schedule)},
                     {"warmup_steps", cfg.warmup_steps},
                     {"seed", cfg.seed},
                     {"augment", cfg.augment}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.beta1 = j.value("beta1", cfg.beta1);
  cfg.beta2 = j.value("beta2", cfg.beta2);
  cfg.eps = j.value("eps", cfg.eps);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  if (j.contains("lr_schedule")) cfg.lr_schedule = lr_schedule_from_string(j.at("lr_schedule"));
  cfg.warmup_steps = j.value("warmup_steps", cfg.warmup_steps);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("augment")) j.at("augment").get_to(cfg.augment);
}

void to_json(nlohmann::json& j, const EpochStats& stats) {
  j = nlohmann::json{{"epoch", stats.epoch},
                     {"mean_loss", stats.mean_loss},
                     {"skipped", stats.skipped},
                     {"lr", stats.lr}};
}

}  // namespace whisperkit
