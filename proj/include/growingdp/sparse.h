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
#include <map>
#include <vector>

#include "growingdp/accountant.h"
#include "growingdp/noise.h"

namespace growingdp {

enum class SparseMode {
  kAboveThreshold,         // halts on the first above-threshold query
  kNumericAboveThreshold,  // additionally releases a noisy answer on halt
  kNumericSparse,          // restarts after every halt, runs indefinitely
};

struct SparseConfig {
  double threshold = 0.0;
  NoiseFunction xi;
};

struct SparseAnswer {
  enum class Kind { kBelow, kAbove, kNumeric };
  Kind kind = Kind::kBelow;
  // Noisy value; only populated for kNumeric.
  double value = 0.0;
};

// Above-threshold test over an adaptive sequence of query values against a
// growing database. Queries arrive as (t, value) with nondecreasing t; the
// per-query noise is Lap(4/xi_t), the threshold noise Lap(2/xi_t) is resampled
// whenever the live run sees its first query at a new time, and the numeric
// release noise is Lap(8/xi_t). The test is inclusive: value + noise >= noisy
// threshold counts as above.
class SparseVector {
 public:
  SparseVector(SparseMode mode, SparseConfig config, int64_t start_time,
               RandomSource rng);

  SparseAnswer Step(int64_t t, double value);

  bool halted() const { return halted_; }
  SparseMode mode() const { return mode_; }
  int64_t start_time() const { return start_time_; }

  // Cumulative privacy loss of everything released so far.
  double PrivacyReport() const;

  // Number of above-threshold (hard) events per time step.
  const std::map<int64_t, int64_t>& hard_counts() const { return hard_counts_; }
  // Number of queries handled per time step.
  const std::map<int64_t, int64_t>& query_counts() const { return query_counts_; }

  int64_t threshold_resamples() const { return threshold_resamples_; }
  // (run index, time) pairs at which the threshold was resampled.
  const std::vector<std::pair<int64_t, int64_t>>& resample_log() const {
    return resample_log_;
  }

  const PrivacyLedger& ledger() const { return ledger_; }

 private:
  void EnsureThreshold(int64_t t);

  SparseMode mode_;
  SparseConfig config_;
  int64_t start_time_;
  RandomSource rng_;

  int64_t current_t_;
  int64_t query_index_ = 0;  // global query counter, used in derivation paths
  bool halted_ = false;

  int64_t run_index_ = 1;
  bool run_live_ = true;
  int64_t run_start_;
  bool run_has_threshold_ = false;
  int64_t run_threshold_time_ = -1;
  double noisy_threshold_ = 0.0;

  std::map<int64_t, int64_t> hard_counts_;
  std::map<int64_t, int64_t> query_counts_;
  int64_t threshold_resamples_ = 0;
  std::vector<std::pair<int64_t, int64_t>> resample_log_;
  PrivacyLedger ledger_;
};

// Failure-probability bound for accuracy alpha at start time n over a finite
// horizon with l_t queries and h_t above-threshold answers per step:
// beta = exp(-alpha xi_n / 8) + sum_t (l_t + 2 h_t) exp(-alpha xi_t / 8).
double SparseAccuracyBeta(const NoiseFunction& xi, double alpha, int64_t n,
                          const std::map<int64_t, int64_t>& query_counts,
                          const std::map<int64_t, int64_t>& hard_counts);

// Budget-only variant with k_t queries per step:
// beta = exp(-alpha xi_n / 8) + 3 sum_t k_t exp(-alpha xi_t / 8).
double SparseAccuracyBetaBudget(const NoiseFunction& xi, double alpha,
                                int64_t n,
                                const std::map<int64_t, int64_t>& budget_counts);

}  // namespace growingdp
