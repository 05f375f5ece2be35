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

#include "growingdp/schedulers.h"

#include <cmath>
#include <stdexcept>

namespace growingdp {

namespace {

void CheckCommon(double eps, double delta, double beta, int64_t start_size,
                 const BlackBoxContract& contract) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("schedule: eps must be in (0,1]");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("schedule: delta must be in [0,1)");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("schedule: beta must be in (0,1)");
  if (start_size < 1)
    throw std::invalid_argument("schedule: start size must be >= 1");
  if (!(contract.p > 0.0) || !(contract.g > 0.0))
    throw std::invalid_argument("schedule: contract needs p > 0 and g > 0");
}

int64_t CeilWithSlack(double v) {
  // pow() can land a hair above an exact integer; treat values within a
  // relative 1e-9 of an integer as that integer before taking the ceiling.
  return static_cast<int64_t>(std::ceil(v - 1e-9 * std::max(1.0, v)));
}

}  // namespace

EpochSchedule::EpochSchedule(double eps, double delta, double beta,
                             int64_t start_size, BlackBoxContract contract)
    : eps_(eps),
      delta_(delta),
      beta_(beta),
      start_size_(start_size),
      contract_(contract) {
  CheckCommon(eps, delta, beta, start_size, contract);
  const double p = contract_.p;
  const double g = contract_.g;
  const double base = std::log(1.0 / beta_) / (eps_ * static_cast<double>(start_size_));
  if (delta_ == 0.0) {
    gamma_ = std::pow(g, 1.0 / (2.0 * p + 1.0)) *
             std::pow(base, p / (2.0 * p + 1.0));
  } else {
    gamma_ = std::pow(g, 1.0 / (1.5 * p + 1.0)) *
             std::pow(base, p / (1.5 * p + 1.0));
  }
  if (!(gamma_ > 0.0 && gamma_ < 1.0))
    throw std::invalid_argument(
        "schedule: growth rate lands outside (0,1); start size too small for "
        "this contract");
}

EpochSchedule ScheduleFixed(double eps, double delta, double beta,
                            int64_t start_size,
                            const BlackBoxContract& contract) {
  return EpochSchedule(eps, delta, beta, start_size, contract);
}

double EpochSchedule::EpsilonAt(int64_t i) const {
  if (i < 0) throw std::invalid_argument("schedule: epoch index negative");
  const double id = static_cast<double>(i);
  if (delta_ == 0.0) {
    return gamma_ * gamma_ * (id + 1.0) / std::pow(1.0 + gamma_, id + 2.0) *
           eps_;
  }
  return std::pow(gamma_, 1.5) * (id + 1.0) /
         std::pow(1.0 + gamma_, id + 1.5) * eps_ /
         (3.0 * std::sqrt(std::log(1.0 / delta_)));
}

double EpochSchedule::BetaAt(int64_t i) const {
  if (i < 0) throw std::invalid_argument("schedule: epoch index negative");
  return std::pow(beta_ / (1.0 + beta_), static_cast<double>(i) + 1.0);
}

double EpochSchedule::AlphaAt(int64_t i) const {
  const double size = std::pow(1.0 + gamma_, static_cast<double>(i)) *
                      static_cast<double>(start_size_);
  return contract_.g *
         std::pow(std::log(1.0 / BetaAt(i)) / (EpsilonAt(i) * size),
                  contract_.p);
}

int64_t EpochSchedule::EpochStart(int64_t i) const {
  if (i < 0) throw std::invalid_argument("schedule: epoch index negative");
  return CeilWithSlack(std::pow(1.0 + gamma_, static_cast<double>(i)) *
                       static_cast<double>(start_size_));
}

ImproverSchedule::ImproverSchedule(double eps, double delta, double beta,
                                   int64_t start_size, double c,
                                   BlackBoxContract contract)
    : eps_(eps),
      delta_(delta),
      beta_(beta),
      start_size_(start_size),
      c_(c),
      contract_(contract) {
  CheckCommon(eps, delta, beta, start_size, contract);
  if (!(delta > 0.0))
    throw std::invalid_argument("improver: requires delta > 0");
  if (!(c > 0.0)) throw std::invalid_argument("improver: requires c > 0");
}

ImproverSchedule ScheduleImprover(double eps, double delta, double beta,
                                  int64_t start_size, double c,
                                  const BlackBoxContract& contract) {
  return ImproverSchedule(eps, delta, beta, start_size, c, contract);
}

double ImproverSchedule::EpsilonAt(int64_t t) const {
  if (t < 1) throw std::invalid_argument("improver: t must be >= 1");
  return std::sqrt(c_) / (3.0 * std::sqrt(std::log(1.0 / delta_))) * eps_ /
         std::pow(static_cast<double>(t), 0.5 + c_);
}

double ImproverSchedule::BetaAt(int64_t t) const {
  if (t < 1) throw std::invalid_argument("improver: t must be >= 1");
  return beta_ / (2.0 * static_cast<double>(t) * static_cast<double>(t));
}

double ImproverSchedule::MechanismAlphaAt(int64_t t) const {
  if (t < 1) throw std::invalid_argument("improver: t must be >= 1");
  const double td = static_cast<double>(t);
  double alpha = contract_.g *
                 std::pow(1.0 / (EpsilonAt(t) * td), contract_.p) *
                 std::pow(std::log(1.0 / BetaAt(t)), contract_.p_beta.value_or(0.0));
  if (contract_.p_size.has_value())
    alpha *= std::pow(std::log(td), *contract_.p_size);
  return alpha;
}

double ImproverSchedule::AlphaEnvelopeAt(int64_t t) const {
  if (t < 1) throw std::invalid_argument("improver: t must be >= 1");
  const double td = static_cast<double>(t);
  return contract_.g *
         std::pow(std::log(1.0 / beta_), contract_.p_beta.value_or(0.0)) *
         std::pow(std::sqrt(std::log(1.0 / delta_)) /
                      (std::sqrt(c_) * eps_ * std::pow(td, 0.5 - 2.0 * c_)),
                  contract_.p);
}

namespace {

void CheckRunInputs(const DatabaseStream& stream,
                    const std::vector<QueryEvent>& events, int64_t start_size,
                    int64_t horizon) {
  if (stream.start_size() != start_size)
    throw std::invalid_argument("run: stream start size does not match schedule");
  if (horizon < start_size || horizon > stream.final_time())
    throw std::invalid_argument("run: horizon outside stream range");
  int64_t prev = 0;
  for (const QueryEvent& e : events) {
    if (e.t < start_size || e.t > horizon)
      throw std::invalid_argument("run: query event outside [n, horizon]");
    if (e.t < prev) throw std::invalid_argument("run: events not time sorted");
    prev = e.t;
  }
}

}  // namespace

RunLog RunFixed(const EpochSchedule& schedule,
                const std::function<const StaticMechanism&(int64_t epoch)>&
                    mechanism_for_epoch,
                const DatabaseStream& stream,
                const std::vector<QueryEvent>& events, int64_t horizon,
                RandomSource rng) {
  CheckRunInputs(stream, events, schedule.start_size(), horizon);
  RunLog log;
  size_t next_event = 0;
  int64_t epoch_index = -1;  // index of the epoch currently serving answers
  Answerer answerer;
  int64_t i = 0;  // next schedule index to consider
  for (int64_t t = schedule.start_size(); t <= horizon; ++t) {
    while (i >= 0 && schedule.EpochStart(i) == t) {
      if (epoch_index >= 0 && schedule.EpochStart(epoch_index) == t) {
        // Merged epoch: same start time as the one already run at t; its
        // budget share is spent without a second mechanism call.
        log.ledger.Record("epoch " + std::to_string(i) + " (merged)",
                          schedule.EpsilonAt(i));
      } else {
        const StaticMechanism& mech = mechanism_for_epoch(i);
        answerer = mech.run(stream.HistogramAt(t), schedule.EpsilonAt(i),
                            schedule.AlphaAt(i), schedule.BetaAt(i),
                            rng.Derive("epoch", static_cast<uint64_t>(i)));
        log.ledger.Record("epoch " + std::to_string(i), schedule.EpsilonAt(i));
        ++log.mechanism_runs;
        epoch_index = i;
      }
      ++i;
    }
    while (next_event < events.size() && events[next_event].t == t) {
      const QueryEvent& e = events[next_event];
      if (!answerer) throw std::logic_error("run: no epoch answerer yet");
      const double truth = Eval(e.query, stream.HistogramAt(t));
      const double released = answerer(e.query);
      log.rows.push_back({e.t, e.j, e.query.id, truth, released,
                          std::abs(released - truth), epoch_index,
                          log.ledger.SumEpsilon(),
                          schedule.AlphaAt(epoch_index)});
      ++next_event;
    }
  }
  return log;
}

RunLog RunImprover(const ImproverSchedule& schedule,
                   const StaticMechanism& mechanism,
                   const DatabaseStream& stream,
                   const std::vector<QueryEvent>& events, int64_t horizon,
                   RandomSource rng) {
  CheckRunInputs(stream, events, schedule.start_size(), horizon);
  RunLog log;
  size_t next_event = 0;
  for (int64_t t = schedule.start_size(); t <= horizon; ++t) {
    const Histogram x = stream.HistogramAt(t);
    Answerer answerer =
        mechanism.run(x, schedule.EpsilonAt(t), schedule.MechanismAlphaAt(t),
                      schedule.BetaAt(t),
                      rng.Derive("improver", static_cast<uint64_t>(t)));
    log.ledger.Record("t=" + std::to_string(t), schedule.EpsilonAt(t));
    ++log.mechanism_runs;
    while (next_event < events.size() && events[next_event].t == t) {
      const QueryEvent& e = events[next_event];
      const double truth = Eval(e.query, x);
      const double released = answerer(e.query);
      log.rows.push_back({e.t, e.j, e.query.id, truth, released,
                          std::abs(released - truth), t,
                          log.ledger.SumEpsilon(),
                          schedule.AlphaEnvelopeAt(t)});
      ++next_event;
    }
  }
  return log;
}

std::vector<ErmgRow> RunErmg(const ErmProblem& problem,
                             const DatabaseStream& stream, double eps,
                             double delta, double beta, int64_t start_size,
                             double c, int64_t horizon, RandomSource rng,
                             PrivacyLedger* ledger_out) {
  if (problem.grid.empty()) throw std::invalid_argument("ermg: empty grid");
  BlackBoxContract contract{1.0, 1.0, 1.0, std::nullopt};
  ImproverSchedule schedule(eps, delta, beta, start_size, c, contract);
  CheckRunInputs(stream, {}, start_size, horizon);
  std::vector<ErmgRow> rows;
  PrivacyLedger ledger;
  for (int64_t t = start_size; t <= horizon; ++t) {
    const Histogram x = stream.HistogramAt(t);
    const double eps_t = schedule.EpsilonAt(t);
    const size_t chosen =
        GridErm(x, problem, eps_t, rng.Derive("ermg", static_cast<uint64_t>(t)));
    ledger.Record("t=" + std::to_string(t), eps_t);
    double best = EmpiricalLoss(problem, 0, x);
    for (size_t idx = 1; idx < problem.grid.size(); ++idx)
      best = std::min(best, EmpiricalLoss(problem, idx, x));
    const double loss = EmpiricalLoss(problem, chosen, x);
    rows.push_back({t, loss, best, loss - best, ledger.SumEpsilon()});
  }
  if (ledger_out != nullptr) *ledger_out = ledger;
  return rows;
}

}  // namespace growingdp
