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

#include "growingdp/sparse.h"

#include <cmath>
#include <set>
#include <stdexcept>

namespace growingdp {

SparseVector::SparseVector(SparseMode mode, SparseConfig config,
                           int64_t start_time, RandomSource rng)
    : mode_(mode),
      config_(config),
      start_time_(start_time),
      rng_(rng),
      current_t_(start_time),
      run_start_(start_time) {
  if (start_time_ < 1)
    throw std::invalid_argument("sparse: start time must be >= 1");
  ledger_.Record("threshold/start", config_.xi.XiDelta(start_time_));
}

void SparseVector::EnsureThreshold(int64_t t) {
  if (run_has_threshold_ && run_threshold_time_ == t) return;
  const double scale = 2.0 / config_.xi(t);
  noisy_threshold_ =
      config_.threshold +
      rng_.Derive("sv-threshold", static_cast<uint64_t>(run_index_),
                  static_cast<uint64_t>(t))
          .NextLaplace(scale);
  run_has_threshold_ = true;
  run_threshold_time_ = t;
  ++threshold_resamples_;
  resample_log_.emplace_back(run_index_, t);
}

SparseAnswer SparseVector::Step(int64_t t, double value) {
  if (t < start_time_)
    throw std::invalid_argument("sparse: query before start time");
  if (t < current_t_)
    throw std::invalid_argument("sparse: time regression");
  if (halted_ && mode_ != SparseMode::kNumericSparse)
    throw std::logic_error("sparse: stepping a halted instance");
  current_t_ = t;
  ++query_index_;
  ++query_counts_[t];

  if (mode_ == SparseMode::kNumericSparse && !run_live_) {
    ++run_index_;
    run_start_ = t;
    run_has_threshold_ = false;
    run_live_ = true;
  }
  EnsureThreshold(t);

  const double nu = rng_.Derive("sv-noise", static_cast<uint64_t>(t),
                                static_cast<uint64_t>(query_index_))
                        .NextLaplace(4.0 / config_.xi(t));
  if (value + nu < noisy_threshold_) {
    return {SparseAnswer::Kind::kBelow, 0.0};
  }

  ++hard_counts_[t];
  switch (mode_) {
    case SparseMode::kAboveThreshold:
      halted_ = true;
      return {SparseAnswer::Kind::kAbove, 0.0};
    case SparseMode::kNumericAboveThreshold: {
      halted_ = true;
      const double a = value + rng_.Derive("sv-numeric", static_cast<uint64_t>(t),
                                           static_cast<uint64_t>(query_index_))
                                   .NextLaplace(8.0 / config_.xi(t));
      ledger_.Record("threshold/release", config_.xi.XiDelta(t) / 8.0);
      return {SparseAnswer::Kind::kNumeric, a};
    }
    case SparseMode::kNumericSparse: {
      const double a = value + rng_.Derive("sv-numeric", static_cast<uint64_t>(t),
                                           static_cast<uint64_t>(query_index_))
                                   .NextLaplace(8.0 / config_.xi(t));
      ledger_.Record("threshold/hard", 1.125 * config_.xi.XiDelta(t));
      run_live_ = false;
      return {SparseAnswer::Kind::kNumeric, a};
    }
  }
  throw std::logic_error("sparse: unknown mode");
}

double SparseVector::PrivacyReport() const { return ledger_.SumEpsilon(); }

namespace {

double TailTerm(const NoiseFunction& xi, double alpha, int64_t t) {
  return std::exp(-alpha * xi(t) / 8.0);
}

}  // namespace

double SparseAccuracyBeta(const NoiseFunction& xi, double alpha, int64_t n,
                          const std::map<int64_t, int64_t>& query_counts,
                          const std::map<int64_t, int64_t>& hard_counts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("beta: alpha must be positive");
  if (n < 1) throw std::invalid_argument("beta: n must be >= 1");
  std::set<int64_t> times;
  for (const auto& [t, c] : query_counts) times.insert(t);
  for (const auto& [t, c] : hard_counts) times.insert(t);
  double beta = TailTerm(xi, alpha, n);
  for (int64_t t : times) {
    if (t < n) throw std::invalid_argument("beta: time before start");
    int64_t l = 0;
    int64_t h = 0;
    if (auto it = query_counts.find(t); it != query_counts.end()) l = it->second;
    if (auto it = hard_counts.find(t); it != hard_counts.end()) h = it->second;
    if (l < 0 || h < 0) throw std::invalid_argument("beta: negative count");
    beta += static_cast<double>(l + 2 * h) * TailTerm(xi, alpha, t);
  }
  return beta;
}

double SparseAccuracyBetaBudget(const NoiseFunction& xi, double alpha,
                                int64_t n,
                                const std::map<int64_t, int64_t>& budget_counts) {
  if (!(alpha > 0.0)) throw std::invalid_argument("beta: alpha must be positive");
  if (n < 1) throw std::invalid_argument("beta: n must be >= 1");
  double beta = TailTerm(xi, alpha, n);
  for (const auto& [t, k] : budget_counts) {
    if (t < n) throw std::invalid_argument("beta: time before start");
    if (k < 0) throw std::invalid_argument("beta: negative count");
    beta += 3.0 * static_cast<double>(k) * TailTerm(xi, alpha, t);
  }
  return beta;
}

}  // namespace growingdp
