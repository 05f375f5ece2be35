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
#include <string>
#include <vector>

#include "growingdp/noise.h"

namespace growingdp {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct LedgerEvent {
  std::string label;
  double epsilon = 0.0;
};

// Append-only log of pure-DP privacy events for one algorithm instance.
class PrivacyLedger {
 public:
  void Record(std::string label, double epsilon);
  const std::vector<LedgerEvent>& events() const { return events_; }
  double SumEpsilon() const { return sum_epsilon_; }
  double SumEpsilonSquared() const { return sum_epsilon_squared_; }

 private:
  std::vector<LedgerEvent> events_;
  double sum_epsilon_ = 0.0;
  double sum_epsilon_squared_ = 0.0;
};

// Basic composition: epsilons add, delta stays 0.
PrivacyBudget BasicCompose(const PrivacyLedger& ledger);

// Advanced (CDP-style) composition of pure-DP events at a target delta:
// eps = 1/2 sum eps_i^2 + sqrt(2 (sum eps_i^2) ln(1/delta)).
PrivacyBudget CdpCompose(const PrivacyLedger& ledger, double delta);

// Simplified bound 2 sqrt((sum eps_i^2) ln(1/delta)), valid when
// delta <= e^-1 and sum eps_i^2 <= 1; dominates CdpCompose in that regime.
double CdpSimplifiedBound(const PrivacyLedger& ledger, double delta);

// eps-DP implies (1/2 eps^2)-zCDP.
double ZcdpOfPure(double eps);
// zCDP parameters add under composition.
double ZcdpCompose(const std::vector<double>& rhos);
// rho-zCDP implies (rho + 2 sqrt(rho ln(1/delta)), delta)-DP.
PrivacyBudget DpOfZcdp(double rho, double delta);

// Above-threshold on a growing database starting at time n0: eps = xi_n0/n0.
double AtgLoss(const NoiseFunction& xi, int64_t n0);

// Numeric above-threshold: threshold part at start time t0 plus one eighth of
// xi*Delta at the halt time.
double NatgLoss(const NoiseFunction& xi, int64_t t0, int64_t t_halt);

// Numeric sparse on a growing database started at n0 with hard-query counts
// h_t: eps = xi_n0 Delta_n0 + (9/8) sum_t h_t xi_t Delta_t.
double NsgLedger(const NoiseFunction& xi, int64_t n0,
                 const std::map<int64_t, int64_t>& hard_counts);

// Per-step relative-entropy budget increment available to the multiplicative
// weights analysis at time t >= 2:
// b_t = ln(N)/t + ln(t-1)/t + ln(t/(t-1)).
double PmwgBudgetIncrement(int64_t t, int universe);

// Finite-horizon privacy bound for private multiplicative weights run from
// size n through `horizon` with noise xi and accuracy alpha:
// eps = (1 + (81/(2 alpha^2)) ln N) xi_n Delta_n
//       + (81/(2 alpha^2)) sum_{t=n+1}^{horizon} b_t xi_t Delta_t.
double PmwgEpsBound(const NoiseFunction& xi, double alpha, int universe,
                    int64_t n, int64_t horizon);

// Horizon-free closed form 162 c (ln N + ln n) / (alpha^2 sqrt(n)), valid for
// xi_t = c sqrt(t) and n >= 21.
double PmwgEpsClosedBound(const NoiseFunction& xi, double alpha, int universe,
                          int64_t n);

}  // namespace growingdp
