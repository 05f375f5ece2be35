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

#include "growingdp/pmwg.h"

#include <cmath>
#include <stdexcept>

#include "growingdp/accountant.h"

namespace growingdp {

Histogram UniformUpdate(const Histogram& y, int64_t t_prev, int64_t t_now) {
  if (t_prev < 1 || t_now < t_prev)
    throw std::invalid_argument("uniform update: need 1 <= t_prev <= t_now");
  if (t_now == t_prev)
    return Histogram(y.weights(), t_now, /*exact=*/false);
  const double keep = static_cast<double>(t_prev) / static_cast<double>(t_now);
  const double fill = (1.0 - keep) / static_cast<double>(y.universe());
  std::vector<double> weights(y.weights());
  for (double& w : weights) w = keep * w + fill;
  return Histogram(std::move(weights), t_now, /*exact=*/false);
}

Histogram MwUpdate(const Histogram& y, const std::vector<double>& direction,
                   double rate) {
  if (static_cast<int>(direction.size()) != y.universe())
    throw std::invalid_argument("mw update: direction dimension mismatch");
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("mw update: rate must be nonnegative");
  std::vector<double> weights(y.weights());
  double sum = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double r = direction[i];
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("mw update: direction outside [0,1]");
    weights[i] *= std::exp(-rate * r);
    if (weights[i] < kWeightFloor) weights[i] = kWeightFloor;
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
  return Histogram(std::move(weights), y.size(), /*exact=*/false);
}

double HardBudgetCap(double alpha, int universe, int64_t n, int64_t t) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("budget cap: alpha must be in (0,1]");
  if (n < 1 || t < n)
    throw std::invalid_argument("budget cap: need 1 <= n <= t");
  double acc = std::log(static_cast<double>(universe));
  for (int64_t tau = n + 1; tau <= t; ++tau)
    acc += PmwgBudgetIncrement(tau, universe);
  return 36.0 / (alpha * alpha) * acc;
}

double TheoremQueryBudgetIncrement(const PmwgConfig& config, int64_t tau,
                                   double kappa) {
  if (!(kappa >= 1.0))
    throw std::invalid_argument("query budget: kappa must be >= 1");
  if (tau < config.start_size)
    throw std::invalid_argument("query budget: time before start");
  const double alpha = config.alpha;
  const double eps = config.eps;
  const double nd = static_cast<double>(config.start_size);
  const double log_nn = std::log(static_cast<double>(config.universe) * nd);
  const double td = static_cast<double>(tau);
  double exponent = 0.0;
  if (config.delta == 0.0 && !config.noise_exponent.has_value()) {
    exponent =
        alpha * alpha * alpha * eps * std::sqrt(nd * td) / (8262.0 * log_nn);
  } else if (config.delta == 0.0) {
    const double p = *config.noise_exponent;
    exponent = alpha * alpha * alpha * (1.0 - p) * (1.0 - p) * eps *
               std::pow(nd, 1.0 - p) * std::pow(td, p) / (6048.0 * log_nn);
  } else {
    const double p = config.noise_exponent.value_or(0.5);
    exponent = alpha * alpha * (1.0 - p) * eps * std::pow(nd, 1.0 - p) *
               std::pow(td, p) /
               (1152.0 * std::sqrt(log_nn) *
                std::sqrt(std::log(1.0 / config.delta)));
  }
  return kappa * std::exp(exponent);
}

double TheoremQueryBudget(const PmwgConfig& config, int64_t t, double kappa) {
  if (t < config.start_size)
    throw std::invalid_argument("query budget: t before start");
  double total = 0.0;
  for (int64_t tau = config.start_size; tau <= t; ++tau)
    total += TheoremQueryBudgetIncrement(config, tau, kappa);
  return total;
}

namespace {

NoiseFunction MakeXi(const PmwgConfig& config) {
  return PmwgNoiseFunction(config.alpha, config.start_size, config.universe,
                           config.eps, config.delta, config.noise_exponent);
}

}  // namespace

Pmwg::Pmwg(const PmwgConfig& config, RandomSource rng)
    : config_(config),
      xi_(MakeXi(config)),
      nsg_(SparseMode::kNumericSparse,
           SparseConfig{2.0 * config.alpha / 3.0, MakeXi(config)},
           config.start_size, rng.Derive("pmwg-nsg")),
      y_(Histogram::Uniform(config.universe, config.start_size)),
      t_last_(config.start_size) {}

double Pmwg::hard_budget_cap() const {
  return 36.0 / (config_.alpha * config_.alpha) *
         (std::log(static_cast<double>(config_.universe)) + budget_b_sum_);
}

PmwgOutcome Pmwg::Answer(const QueryEvent& event, const Histogram& x_t) {
  if (exhausted_) return {true, 0.0, false, 0.0};
  if (event.t < config_.start_size)
    throw std::invalid_argument("pmwg: query before start");
  if (event.t < t_last_) throw std::invalid_argument("pmwg: time regression");
  if (x_t.universe() != config_.universe)
    throw std::invalid_argument("pmwg: histogram universe mismatch");
  if (x_t.size() != event.t)
    throw std::invalid_argument("pmwg: histogram size does not match event time");

  if (event.t > t_last_) {
    y_ = UniformUpdate(y_, t_last_, event.t);
    for (int64_t tau = t_last_ + 1; tau <= event.t; ++tau)
      budget_b_sum_ += PmwgBudgetIncrement(tau, config_.universe);
    t_last_ = event.t;
  }

  const double truth = Eval(event.query, x_t);
  const double f_y = Eval(event.query, y_);
  const SparseAnswer gap_pos = nsg_.Step(event.t, truth - f_y);
  const SparseAnswer gap_neg = nsg_.Step(event.t, f_y - truth);

  if (gap_pos.kind == SparseAnswer::Kind::kBelow &&
      gap_neg.kind == SparseAnswer::Kind::kBelow) {
    return {false, f_y, false, f_y};
  }

  ++hard_counts_[event.t];
  ++hard_total_;
  if (static_cast<double>(hard_total_) > hard_budget_cap()) {
    exhausted_ = true;
    return {true, 0.0, true, f_y};
  }

  double released = 0.0;
  if (gap_pos.kind == SparseAnswer::Kind::kNumeric) {
    released = f_y + gap_pos.value;
  } else {
    released = f_y - gap_neg.value;
  }

  std::vector<double> direction(event.query.weights);
  if (released >= f_y) {
    for (double& r : direction) r = 1.0 - r;
  }
  y_ = MwUpdate(y_, direction, config_.alpha / 6.0);
  return {false, released, true, f_y};
}

}  // namespace growingdp
