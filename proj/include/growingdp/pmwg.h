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
#include <optional>

#include "growingdp/core.h"
#include "growingdp/noise.h"
#include "growingdp/sparse.h"

namespace growingdp {

struct PmwgConfig {
  double alpha = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  int64_t start_size = 0;
  int universe = 0;
  std::optional<double> noise_exponent;
};

// Public histogram refresh when the database grows from size t_prev to t_now
// with no intervening multiplicative update:
// y' = (t_prev/t_now) y + ((t_now - t_prev)/t_now) * uniform.
Histogram UniformUpdate(const Histogram& y, int64_t t_prev, int64_t t_now);

// One multiplicative-weights step: y_i' proportional to exp(-rate * r_i) y_i.
// Entries are floored at kWeightFloor before renormalizing.
Histogram MwUpdate(const Histogram& y, const std::vector<double>& direction,
                   double rate);

// Hard-query budget cap at time t for a run started at size n:
// B_t = (36/alpha^2) (ln N + sum_{tau=n+1}^t b_tau).
double HardBudgetCap(double alpha, int universe, int64_t n, int64_t t);

// Cumulative query budget sum_{tau=n}^{t} kappa * exp(E(tau)) promised by the
// accuracy theorems for the configured noise calibration.
double TheoremQueryBudget(const PmwgConfig& config, int64_t t, double kappa);
// Single term kappa * exp(E(tau)) of the cumulative budget.
double TheoremQueryBudgetIncrement(const PmwgConfig& config, int64_t tau,
                                   double kappa);

struct PmwgOutcome {
  // True when the hard-query budget is exhausted; no answer is released and
  // the instance stops answering.
  bool exhausted = false;
  double released = 0.0;
  bool hard = false;
  // f(y) against the public histogram before any update from this query.
  double public_answer = 0.0;
};

// Private multiplicative weights over a growing database. Each query is
// tested for hardness by a shared numeric-sparse instance at threshold
// 2 alpha / 3 via the signed gap pair (f - f(y), f(y) - f); easy queries are
// answered from the public histogram, hard ones from the released noisy gap
// followed by a multiplicative update at rate alpha / 6.
class Pmwg {
 public:
  Pmwg(const PmwgConfig& config, RandomSource rng);

  PmwgOutcome Answer(const QueryEvent& event, const Histogram& x_t);

  const Histogram& public_histogram() const { return y_; }
  const PmwgConfig& config() const { return config_; }
  const NoiseFunction& xi() const { return xi_; }
  double threshold() const { return 2.0 * config_.alpha / 3.0; }

  bool exhausted() const { return exhausted_; }
  int64_t hard_total() const { return hard_total_; }
  const std::map<int64_t, int64_t>& hard_counts() const { return hard_counts_; }
  // B_t at the most recent query time.
  double hard_budget_cap() const;

  double PrivacyReport() const { return nsg_.PrivacyReport(); }
  const PrivacyLedger& ledger() const { return nsg_.ledger(); }
  const SparseVector& nsg() const { return nsg_; }

 private:
  PmwgConfig config_;
  NoiseFunction xi_;
  SparseVector nsg_;
  Histogram y_;
  int64_t t_last_;
  double budget_b_sum_ = 0.0;
  std::map<int64_t, int64_t> hard_counts_;
  int64_t hard_total_ = 0;
  bool exhausted_ = false;
};

}  // namespace growingdp
