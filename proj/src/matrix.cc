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

#include "whisperkit/matrix.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace whisperkit {

double log_sum_exp(std::span<const double> values) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (values.empty()) return kNegInf;
  const double peak = *std::max_element(values.begin(), values.end());
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

double log_add(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace whisperkit
