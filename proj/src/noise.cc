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

#include "growingdp/noise.h"

#include <cmath>
#include <stdexcept>

namespace growingdp {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t HashString(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

RandomSource::RandomSource(uint64_t seed) : RandomSource(seed, false) {}

RandomSource::RandomSource(uint64_t seed, bool noiseless)
    : seed_(seed), state_(seed), noiseless_(noiseless) {}

RandomSource RandomSource::Noiseless(uint64_t seed) {
  return RandomSource(seed, true);
}

RandomSource RandomSource::Derive(std::string_view purpose, uint64_t a,
                                  uint64_t b, uint64_t c) const {
  uint64_t s = Mix(seed_ ^ HashString(purpose));
  s = Mix(s + kGolden + a);
  s = Mix(s + kGolden + b);
  s = Mix(s + kGolden + c);
  return RandomSource(s, noiseless_);
}

double RandomSource::NextUniform() {
  ++draws_;
  const uint64_t x = Mix(state_ += kGolden);
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::NextLaplace(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("laplace: scale must be positive");
  const double u = NextUniform() - 0.5;
  if (noiseless_) return 0.0;
  const double magnitude = -scale * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

uint64_t RandomSource::NextIndex(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("index: empty range");
  ++draws_;
  const uint64_t x = Mix(state_ += kGolden);
  // Rejection-free multiply-shift; bias is negligible for bound << 2^64.
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(x) * bound) >> 64);
}

NoiseFunction::NoiseFunction(double coefficient, double exponent)
    : coefficient_(coefficient), exponent_(exponent) {
  if (!(coefficient > 0.0) || !std::isfinite(coefficient))
    throw std::invalid_argument("noise function: coefficient must be positive");
  if (!(exponent >= 0.0 && exponent <= 1.0))
    throw std::invalid_argument("noise function: exponent must be in [0,1]");
}

double NoiseFunction::operator()(int64_t t) const {
  if (t <= 0) throw std::invalid_argument("noise function: t must be positive");
  return coefficient_ * std::pow(static_cast<double>(t), exponent_);
}

double NoiseFunction::XiDelta(int64_t t) const {
  if (t <= 0) throw std::invalid_argument("noise function: t must be positive");
  return coefficient_ * std::pow(static_cast<double>(t), exponent_ - 1.0);
}

NoiseFunction PmwgNoiseFunction(double alpha, int64_t n, int universe,
                                double eps, double delta,
                                std::optional<double> exponent) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("noise calibration: alpha must be in (0,1]");
  if (!(eps > 0.0))
    throw std::invalid_argument("noise calibration: eps must be positive");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("noise calibration: delta must be in [0,1)");
  if (n < 1 || universe < 1)
    throw std::invalid_argument("noise calibration: n and N must be >= 1");
  const double log_nn =
      std::log(static_cast<double>(universe) * static_cast<double>(n));
  if (!(log_nn > 0.0))
    throw std::invalid_argument("noise calibration: requires N*n >= 2");
  const double nd = static_cast<double>(n);
  if (!exponent.has_value()) {
    const double p = 0.5;
    if (delta == 0.0) {
      const double c = alpha * alpha * std::sqrt(nd) * eps / (162.0 * log_nn);
      return NoiseFunction(c, p);
    }
    const double c = alpha * std::sqrt(nd) * eps /
                     (48.0 * std::sqrt(log_nn) * std::sqrt(std::log(1.0 / delta)));
    return NoiseFunction(c, p);
  }
  const double p = *exponent;
  if (!(p >= 0.25 && p < 1.0))
    throw std::invalid_argument("noise calibration: exponent must be in [1/4,1)");
  const double n_pow = std::pow(nd, 1.0 - p);
  if (delta == 0.0) {
    const double c =
        alpha * alpha * (1.0 - p) * (1.0 - p) * n_pow * eps / (126.0 * log_nn);
    return NoiseFunction(c, p);
  }
  const double c = alpha * (1.0 - p) * n_pow * eps /
                   (24.0 * std::sqrt(log_nn) * std::sqrt(std::log(1.0 / delta)));
  return NoiseFunction(c, p);
}

}  // namespace growingdp
