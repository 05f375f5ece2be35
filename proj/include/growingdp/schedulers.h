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
#include <functional>
#include <string>
#include <vector>

#include "growingdp/accountant.h"
#include "growingdp/blackbox.h"
#include "growingdp/core.h"
#include "growingdp/noise.h"

namespace growingdp {

// Geometric epoch schedule: the static mechanism is rerun on the database
// snapshot at t_i = ceil((1+gamma)^i n) with budget share eps_i and failure
// share beta_i; answers between reruns are served from the last snapshot.
class EpochSchedule {
 public:
  EpochSchedule(double eps, double delta, double beta, int64_t start_size,
                BlackBoxContract contract);

  double gamma() const { return gamma_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double beta() const { return beta_; }
  int64_t start_size() const { return start_size_; }
  const BlackBoxContract& contract() const { return contract_; }

  double EpsilonAt(int64_t i) const;
  double BetaAt(int64_t i) const;
  double AlphaAt(int64_t i) const;
  int64_t EpochStart(int64_t i) const;

 private:
  double eps_;
  double delta_;
  double beta_;
  int64_t start_size_;
  BlackBoxContract contract_;
  double gamma_;
};

EpochSchedule ScheduleFixed(double eps, double delta, double beta,
                            int64_t start_size, const BlackBoxContract& contract);

// Per-time-step schedule: the mechanism is rerun at every t >= n with
// eps_t = (sqrt(c)/(3 sqrt(ln(1/delta)))) eps / t^{1/2+c} and
// beta_t = beta / (2 t^2). Requires delta > 0.
class ImproverSchedule {
 public:
  ImproverSchedule(double eps, double delta, double beta, int64_t start_size,
                   double c, BlackBoxContract contract);

  double c() const { return c_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double beta() const { return beta_; }
  int64_t start_size() const { return start_size_; }
  const BlackBoxContract& contract() const { return contract_; }

  double EpsilonAt(int64_t t) const;
  double BetaAt(int64_t t) const;
  // Accuracy target handed to the mechanism at time t:
  // g (1/(eps_t t))^p ln^{p_size}(t) ln^{p_beta}(1/beta_t).
  double MechanismAlphaAt(int64_t t) const;
  // Reported accuracy envelope:
  // g ln^{p_beta}(1/beta) (sqrt(ln(1/delta))/(sqrt(c) eps t^{1/2-2c}))^p.
  double AlphaEnvelopeAt(int64_t t) const;

 private:
  double eps_;
  double delta_;
  double beta_;
  int64_t start_size_;
  double c_;
  BlackBoxContract contract_;
};

ImproverSchedule ScheduleImprover(double eps, double delta, double beta,
                                  int64_t start_size, double c,
                                  const BlackBoxContract& contract);

struct AnswerRow {
  int64_t t = 0;
  int64_t j = 0;
  std::string query_id;
  double truth = 0.0;
  double released = 0.0;
  double abs_error = 0.0;
  int64_t epoch = 0;
  double eps_spent_cum = 0.0;
  double alpha_promised = 0.0;
};

struct RunLog {
  std::vector<AnswerRow> rows;
  PrivacyLedger ledger;
  int64_t mechanism_runs = 0;
};

// Runs the epoch schedule against a stream up to `horizon`, answering the
// given query events (sorted by time). `mechanism_for_epoch` lets the query
// class evolve across epochs.
RunLog RunFixed(const EpochSchedule& schedule,
                const std::function<const StaticMechanism&(int64_t epoch)>&
                    mechanism_for_epoch,
                const DatabaseStream& stream,
                const std::vector<QueryEvent>& events, int64_t horizon,
                RandomSource rng);

RunLog RunImprover(const ImproverSchedule& schedule,
                   const StaticMechanism& mechanism,
                   const DatabaseStream& stream,
                   const std::vector<QueryEvent>& events, int64_t horizon,
                   RandomSource rng);

struct ErmgRow {
  int64_t t = 0;
  double loss = 0.0;
  double best_loss = 0.0;
  double excess = 0.0;
  double eps_spent_cum = 0.0;
};

// Private ERM on a growing database: grid ERM rerun under the improver
// schedule; per-step excess empirical risk against the exact grid minimizer.
std::vector<ErmgRow> RunErmg(const ErmProblem& problem,
                             const DatabaseStream& stream, double eps,
                             double delta, double beta, int64_t start_size,
                             double c, int64_t horizon, RandomSource rng,
                             PrivacyLedger* ledger_out = nullptr);

}  // namespace growingdp
