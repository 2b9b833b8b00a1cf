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

#include "whisperkit/model.h"

#include <algorithm>
#include <cmath>

#include "binary_io.h"
#include "whisperkit/error.h"
#include "whisperkit/random.h"

namespace whisperkit {
namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

struct Activations {
  Matrix stacked;  // T x D(2c+1)
  Matrix hidden;   // T x H, after tanh
  Matrix logits;   // T x (V+1)
};

void check_input(const ModelParams& params, const FeatureMatrix& feat) {
  if (feat.dim() != params.input_dim) {
    throw InvalidArgument("model expects feature dim " + std::to_string(params.input_dim) +
                          ", got " + std::to_string(feat.dim()));
  }
  if (feat.num_frames() == 0) throw InvalidArgument("model: empty feature matrix");
}

Activations run_forward(const ModelParams& p, const FeatureMatrix& feat) {
  check_input(p, feat);
  Activations a;
  a.stacked = stack_context(feat, p.context);
  const std::size_t frames = feat.num_frames();
  const std::size_t in = p.stacked_dim();
  a.hidden = Matrix(frames, p.hidden);
  a.logits = Matrix(frames, p.num_classes);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* x = a.stacked.row(t).data();
    for (std::size_t h = 0; h < p.hidden; ++h) {
      const double* w = p.w1.row(h).data();
      double acc = p.b1[h];
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
      a.hidden(t, h) = std::tanh(acc);
    }
    const auto hid = a.hidden.row(t);
    for (std::size_t k = 0; k < p.num_classes; ++k) {
      const auto w = p.w2.row(k);
      double acc = p.b2[k];
      for (std::size_t h = 0; h < p.hidden; ++h) acc += w[h] * hid[h];
      a.logits(t, k) = acc;
    }
  }
  return a;
}

}  // namespace

std::size_t ModelParams::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

ModelParams ModelParams::zeros(std::size_t input_dim, std::size_t context, std::size_t hidden,
                               std::size_t num_classes) {
  ModelParams p;
  p.input_dim = input_dim;
  p.context = context;
  p.hidden = hidden;
  p.num_classes = num_classes;
  p.w1 = Matrix(hidden, p.stacked_dim());
  p.b1.assign(hidden, 0.0);
  p.w2 = Matrix(num_classes, hidden);
  p.b2.assign(num_classes, 0.0);
  return p;
}

ModelParams ModelParams::zeros_like() const {
  return zeros(input_dim, context, hidden, num_classes);
}

std::array<std::span<double>, 4> ModelParams::tensors() {
  return {std::span<double>(w1.data()), std::span<double>(b1), std::span<double>(w2.data()),
          std::span<double>(b2)};
}

std::array<std::span<const double>, 4> ModelParams::tensors() const {
  return {std::span<const double>(w1.data()), std::span<const double>(b1),
          std::span<const double>(w2.data()), std::span<const double>(b2)};
}

bool ModelParams::same_shape(const ModelParams& o) const {
  return input_dim == o.input_dim && context == o.context && hidden == o.hidden &&
         num_classes == o.num_classes && w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() &&
         b1.size() == o.b1.size() && w2.rows() == o.w2.rows() && w2.cols() == o.w2.cols() &&
         b2.size() == o.b2.size();
}

bool ModelParams::all_finite() const {
  for (const auto& tensor : tensors()) {
    for (double v : tensor) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelParams init_params(std::size_t input_dim, std::size_t num_classes, const ModelConfig& cfg) {
  if (input_dim == 0 || num_classes < 2 || cfg.hidden <= 0 || cfg.context_radius < 0) {
    throw InvalidArgument("init_params: invalid model dimensions");
  }
  ModelParams p = ModelParams::zeros(input_dim, static_cast<std::size_t>(cfg.context_radius),
                                     static_cast<std::size_t>(cfg.hidden), num_classes);
  Rng rng(cfg.seed);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(p.stacked_dim()));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(p.hidden));
  for (double& v : p.w1.data()) v = rng.uniform(-bound1, bound1);
  for (double& v : p.b1) v = rng.uniform(-bound1, bound1);
  for (double& v : p.w2.data()) v = rng.uniform(-bound2, bound2);
  for (double& v : p.b2) v = rng.uniform(-bound2, bound2);
  return p;
}

Matrix stack_context(const FeatureMatrix& feat, std::size_t context) {
  const std::size_t frames = feat.num_frames();
  const std::size_t dim = feat.dim();
  const std::size_t width = 2 * context + 1;
  Matrix out(frames, dim * width);
  const auto last = static_cast<std::ptrdiff_t>(frames) - 1;
  for (std::size_t t = 0; t < frames; ++t) {
    auto dst = out.row(t);
    for (std::size_t j = 0; j < width; ++j) {
      const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(
          static_cast<std::ptrdiff_t>(t + j) - static_cast<std::ptrdiff_t>(context), 0, last);
      const auto row = feat.data.row(static_cast<std::size_t>(src));
      std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(j * dim));
    }
  }
  return out;
}

EmissionMatrix forward(const ModelParams& params, const FeatureMatrix& feat) {
  return EmissionMatrix::from_logits(run_forward(params, feat).logits);
}

ModelParams backward(const ModelParams& p, const FeatureMatrix& feat, const Matrix& grad_logits) {
  if (grad_logits.rows() != feat.num_frames() || grad_logits.cols() != p.num_classes) {
    throw InvalidArgument("backward: gradient shape does not match emissions");
  }
  const Activations a = run_forward(p, feat);
  ModelParams g = p.zeros_like();
  const std::size_t in = p.stacked_dim();
  std::vector<double> d_hidden(p.hidden);
  for (std::size_t t = 0; t < feat.num_frames(); ++t) {
    const auto gl = grad_logits.row(t);
    const auto hid = a.hidden.row(t);
    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t k = 0; k < p.num_classes; ++k) {
      const double gk = gl[k];
      if (gk == 0.0) continue;
      g.b2[k] += gk;
      auto gw2 = g.w2.row(k);
      const auto w2 = p.w2.row(k);
      for (std::size_t h = 0; h < p.hidden; ++h) {
        gw2[h] += gk * hid[h];
        d_hidden[h] += gk * w2[h];
      }
    }
    const double* x = a.stacked.row(t).data();
    for (std::size_t h = 0; h < p.hidden; ++h) {
      const double d_pre = d_hidden[h] * (1.0 - hid[h] * hid[h]);
      if (d_pre == 0.0) continue;
      g.b1[h] += d_pre;
      double* gw1 = g.w1.row(h).data();
      for (std::size_t i = 0; i < in; ++i) gw1[i] += d_pre * x[i];
    }
  }
  return g;
}

void accumulate(ModelParams& dst, const ModelParams& src, double scale) {
  if (!dst.same_shape(src)) throw InvalidArgument("accumulate: shape mismatch");
  auto d = dst.tensors();
  const auto s = src.tensors();
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d[i].size(); ++j) d[i][j] += scale * s[i][j];
  }
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const ModelParams& p = ckpt.params;
  if (static_cast<std::size_t>(ckpt.vocab.num_classes()) != p.num_classes) {
    throw InvalidArgument("checkpoint: vocabulary size does not match the model output");
  }
  internal::ByteWriter w;
  w.tag("WKCK");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(p.input_dim));
  w.u32(static_cast<std::uint32_t>(p.context));
  w.u32(static_cast<std::uint32_t>(p.hidden));
  w.u32(static_cast<std::uint32_t>(p.num_classes - 1));
  w.u64(ckpt.seed);
  w.u32(static_cast<std::uint32_t>(ckpt.vocab.symbols().size()));
  for (const auto& s : ckpt.vocab.symbols()) w.str(s);
  for (const auto& tensor : p.tensors()) {
    for (double v : tensor) w.f32(static_cast<float>(v));
  }
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  internal::ByteReader r(bytes.data(), bytes.size());
  if (r.tag() != "WKCK") throw IoError("checkpoint: bad magic");
  if (r.u32() != kCheckpointVersion) throw IoError("checkpoint: unsupported version");
  const std::size_t dim = r.u32();
  const std::size_t context = r.u32();
  const std::size_t hidden = r.u32();
  const std::size_t vocab = r.u32();
  if (dim == 0 || hidden == 0 || vocab == 0) throw IoError("checkpoint: zero dimension");
  Checkpoint ckpt;
  ckpt.seed = r.u64();
  const std::uint32_t n_symbols = r.u32();
  if (n_symbols != vocab) throw IoError("checkpoint: vocabulary size mismatch");
  std::vector<std::string> symbols;
  for (std::uint32_t i = 0; i < n_symbols; ++i) symbols.push_back(r.str());
  ckpt.vocab = Vocabulary(std::move(symbols));
  ckpt.params = ModelParams::zeros(dim, context, hidden, vocab + 1);
  if (r.remaining() != ckpt.params.parameter_count() * 4) {
    throw IoError("checkpoint: tensor payload size does not match header");
  }
  for (auto& tensor : ckpt.params.tensors()) {
    for (double& v : tensor) v = r.f32();
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  internal::write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = internal::read_file_bytes(path);
  return decode_checkpoint(bytes);
}

ModelParams round_to_float(const ModelParams& params) {
  ModelParams out = params;
  for (auto& tensor : out.tensors()) {
    for (double& v : tensor) v = static_cast<float>(v);
  }
  return out;
}

void to_json(nlohmann::json& j, const ModelConfig& cfg) {
  j = nlohmann::json{{"context_radius", cfg.context_radius}, {"hidden", cfg.hidden}, {"seed", cfg.seed}};
}

void from_json(const nlohmann::json& j, ModelConfig& cfg) {
  cfg.context_radius = j.value("context_radius", cfg.context_radius);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.seed = j.value("seed", cfg.seed);
}

}  // namespace whisperkit
