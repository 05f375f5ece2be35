// Copyright 2026 The growingdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace growingdp {

// Deterministic random source. Every consumer derives its own child source
// from a (purpose, a, b, c) path; identical (seed, path) pairs produce
// bit-identical draws no matter in which order sources are created or used.
// In noiseless mode every Laplace draw returns 0 (the underlying uniform is
// still consumed so draw paths match the noisy mode).
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  static RandomSource Noiseless(uint64_t seed = 0);

  RandomSource Derive(std::string_view purpose, uint64_t a = 0, uint64_t b = 0,
                      uint64_t c = 0) const;

  // Uniform draw in the open interval (0, 1).
  double NextUniform();

  // Laplace(0, scale) via the inverse CDF applied to one uniform draw.
  double NextLaplace(double scale);

  // Integer draw in [0, bound).
  uint64_t NextIndex(uint64_t bound);

  bool noiseless() const { return noiseless_; }
  uint64_t draw_count() const { return draws_; }

 private:
  RandomSource(uint64_t seed, bool noiseless);

  uint64_t seed_;
  uint64_t state_;
  bool noiseless_;
  uint64_t draws_ = 0;
};

// Noise growth function xi_t = coefficient * t^exponent. The privacy
// accounting requires xi nondecreasing and xi_t/t nonincreasing, so the
// exponent must lie in [0, 1] and the coefficient must be positive.
class NoiseFunction {
 public:
  NoiseFunction(double coefficient, double exponent);

  double operator()(int64_t t) const;
  // xi_t * Delta_t = coefficient * t^(exponent-1).
  double XiDelta(int64_t t) const;

  double coefficient() const { return coefficient_; }
  double exponent() const { return exponent_; }

 private:
  double coefficient_;
  double exponent_;
};

// Noise function calibrated for private multiplicative weights on a growing
// database with accuracy target alpha, start size n, universe size N and
// privacy budget (eps, delta). When `exponent` is given it must lie in
// [1/4, 1); otherwise the default exponent 1/2 calibration is used.
NoiseFunction PmwgNoiseFunction(double alpha, int64_t n, int universe,
                                double eps, double delta,
                                std::optional<double> exponent = std::nullopt);

}  // namespace growingdp
