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

#ifndef WHISPERKIT_MODEL_H_
#define WHISPERKIT_MODEL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"
#include "whisperkit/ctc.h"
#include "whisperkit/features.h"
#include "whisperkit/matrix.h"

namespace whisperkit {

struct ModelConfig {
  int context_radius = 5;  // frames on each side; 11-frame window by default
  int hidden = 64;
  std::uint64_t seed = 0;
};

// Frame classifier: stack frames t-c..t+c (edges repeated), affine, tanh,
// affine, log-softmax. Also used as the shape of its own gradient.
struct ModelParams {
  std::size_t input_dim = 0;    // D, feature dimension per frame
  std::size_t context = 0;      // c
  std::size_t hidden = 0;       // H
  std::size_t num_classes = 0;  // V + 1
  Matrix w1;                    // H x D(2c+1)
  std::vector<double> b1;       // H
  Matrix w2;                    // (V+1) x H
  std::vector<double> b2;       // V+1

  std::size_t stacked_dim() const { return input_dim * (2 * context + 1); }
  std::size_t parameter_count() const;

  // Zero-filled parameters of the given shape.
  static ModelParams zeros(std::size_t input_dim, std::size_t context, std::size_t hidden,
                           std::size_t num_classes);
  ModelParams zeros_like() const;

  // w1, b1, w2, b2 as flat views, in checkpoint order.
  std::array<std::span<double>, 4> tensors();
  std::array<std::span<const double>, 4> tensors() const;

  bool same_shape(const ModelParams& other) const;
  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
ModelParams init_params(std::size_t input_dim, std::size_t num_classes, const ModelConfig& cfg);

// Stacked context windows, T x D(2c+1).
Matrix stack_context(const FeatureMatrix& feat, std::size_t context);

// Throws InvalidArgument when the feature dimension does not match.
EmissionMatrix forward(const ModelParams& params, const FeatureMatrix& feat);

// Reverse-mode gradient of a loss with respect to every parameter, given
// that loss's gradient with respect to the pre-softmax logits (which is what
// ctc_loss returns). Throws InvalidArgument on shape mismatch.
ModelParams backward(const ModelParams& params, const FeatureMatrix& feat,
                     const Matrix& grad_logits);

// Adds `src` into `dst` scaled by `scale`; shapes must match.
void accumulate(ModelParams& dst, const ModelParams& src, double scale = 1.0);

struct Checkpoint {
  ModelParams params;
  Vocabulary vocab;
  std::uint64_t seed = 0;
};

// Little-endian: "WKCK", version, D, c, H, V (u32 each), seed (u64),
// vocabulary symbols (u32 count, then u32-length-prefixed UTF-8), then w1,
// b1, w2, b2 as row-major float32. Written atomically.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void from_json(const nlohmann::json& j, ModelConfig& cfg);

// Rounds every parameter through float32, matching what a checkpoint stores.
ModelParams round_to_float(const ModelParams& params);

}  // namespace whisperkit

#endif  // WHISPERKIT_MODEL_H_
