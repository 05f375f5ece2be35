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

#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "growingdp/schedulers.h"

namespace growingdp {
namespace {

const BlackBoxContract kUnitContract{1.0, 1.0, 1.0, std::nullopt};

EpochSchedule ReferenceSchedule() {
  // ln(1/beta)/(eps n) = 1e-3 with p = 1 makes gamma exactly 0.1.
  return EpochSchedule(1.0, 0.0, std::exp(-1.0), 1000, kUnitContract);
}

TEST_SUITE("schedulers") {

TEST_CASE("pure-DP epoch schedule frozen values") {
  const EpochSchedule s = ReferenceSchedule();
  CHECK(s.gamma() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.EpsilonAt(0) == doctest::Approx(0.01 / 1.21).epsilon(1e-12));
  CHECK(s.EpsilonAt(0) == doctest::Approx(8.264463e-3).epsilon(1e-6));
  CHECK(s.BetaAt(0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
  CHECK(s.BetaAt(0) == doctest::Approx(0.2689414214).epsilon(1e-9));
  CHECK(s.EpochStart(0) == 1000);
  CHECK(s.EpochStart(1) == 1100);
  CHECK(s.EpochStart(2) == 1210);
  CHECK(s.EpochStart(3) == 1331);
  // alpha_0 = g * ln(1/beta_0) / (eps_0 * n)
  const double expected_alpha =
      std::log(1.0 + std::exp(1.0)) / (s.EpsilonAt(0) * 1000.0);
  CHECK(s.AlphaAt(0) == doctest::Approx(expected_alpha).epsilon(1e-12));
}

TEST_CASE("epoch budget series sum exactly to the totals") {
  const EpochSchedule s = ReferenceSchedule();
  double eps_sum = 0.0;
  double beta_sum = 0.0;
  for (int64_t i = 0; i < 5000; ++i) {
    CHECK(s.EpsilonAt(i) > 0.0);
    eps_sum += s.EpsilonAt(i);
    beta_sum += s.BetaAt(i);
  }
  CHECK(eps_sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(beta_sum == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("approximate-DP epoch schedule composes within eps") {
  const double delta = std::exp(-2.0);
  const EpochSchedule s(0.8, delta, 0.05, 2000, kUnitContract);
  CHECK(s.gamma() > 0.0);
  CHECK(s.gamma() < 1.0);
  double sum_sq = 0.0;
  for (int64_t i = 0; i < 4000; ++i) sum_sq += s.EpsilonAt(i) * s.EpsilonAt(i);
  CHECK(2.0 * std::sqrt(sum_sq * std::log(1.0 / delta)) <= 0.8 + 1e-9);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(EpochSchedule(1.0, 0.0, std::exp(-1.0), 1, kUnitContract),
                  std::invalid_argument);
  CHECK_THROWS_AS(EpochSchedule(0.0, 0.0, 0.1, 1000, kUnitContract),
                  std::invalid_argument);
  CHECK_THROWS_AS(EpochSchedule(2.0, 0.0, 0.1, 1000, kUnitContract),
                  std::invalid_argument);
  CHECK_THROWS_AS(EpochSchedule(1.0, 0.0, 0.0, 1000, kUnitContract),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      EpochSchedule(1.0, 0.0, 0.1, 1000, BlackBoxContract{0.0, 1.0, {}, {}}),
      std::invalid_argument);
}

TEST_CASE("improver schedule frozen values") {
  const double delta = std::exp(-1.0);
  const ImproverSchedule s(1.0, delta, 0.1, 10, 0.5, kUnitContract);
  // eps_t = (sqrt(c)/(3 sqrt(ln(1/delta)))) eps / t^(1/2+c)
  CHECK(s.EpsilonAt(100) ==
        doctest::Approx(std::sqrt(0.5) / 3.0 / 100.0).epsilon(1e-12));
  CHECK(s.EpsilonAt(100) == doctest::Approx(2.3570226e-3).epsilon(1e-6));
  CHECK(s.BetaAt(10) == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK_THROWS_AS(ImproverSchedule(1.0, 0.0, 0.1, 10, 0.5, kUnitContract),
                  std::invalid_argument);
  CHECK_THROWS_AS(ImproverSchedule(1.0, delta, 0.1, 10, 0.0, kUnitContract),
                  std::invalid_argument);
}

TEST_CASE("improver mechanism target and reported envelope") {
  const double delta = std::exp(-1.0);
  const BlackBoxContract contract{0.5, 2.0, 1.0, 0.25};
  const ImproverSchedule s(0.5, delta, 0.1, 50, 0.1, contract);
  const int64_t t = 200;
  const double eps_t = s.EpsilonAt(t);
  const double beta_t = s.BetaAt(t);
  const double expected_target =
      2.0 * std::pow(1.0 / (eps_t * t), 0.5) * std::log(1.0 / beta_t) *
      std::pow(std::log(static_cast<double>(t)), 0.25);
  CHECK(s.MechanismAlphaAt(t) ==
        doctest::Approx(expected_target).epsilon(1e-12));
  const double expected_envelope =
      2.0 * std::log(1.0 / 0.1) *
      std::pow(std::sqrt(std::log(1.0 / delta)) /
                   (std::sqrt(0.1) * 0.5 * std::pow(t, 0.5 - 2.0 * 0.1)),
               0.5);
  CHECK(s.AlphaEnvelopeAt(t) ==
        doctest::Approx(expected_envelope).epsilon(1e-12));
}

TEST_CASE("improver budget composes within eps under cdp") {
  const double delta = std::exp(-1.0);
  const ImproverSchedule s(0.5, delta, 0.1, 100, 0.1, kUnitContract);
  double sum_sq = 0.0;
  for (int64_t t = 100; t <= 20000; ++t)
    sum_sq += s.EpsilonAt(t) * s.EpsilonAt(t);
  CHECK(2.0 * std::sqrt(sum_sq * std::log(1.0 / delta)) <= 0.5 + 1e-9);
}

DatabaseStream ConstantStream(int64_t n, int64_t horizon) {
  std::vector<int64_t> initial{n / 2, n - n / 2};
  std::vector<int> arrivals;
  for (int64_t t = n + 1; t <= horizon; ++t)
    arrivals.push_back(static_cast<int>(t % 2));
  return DatabaseStream(2, initial, arrivals);
}

std::vector<QueryEvent> OnePerStep(const LinearQuery& f, int64_t n,
                                   int64_t horizon) {
  std::vector<QueryEvent> events;
  for (int64_t t = n; t <= horizon; ++t) events.push_back({t, 1, f});
  return events;
}

TEST_CASE("fixed-epoch run reruns at epoch starts and spends merged budget") {
  const EpochSchedule s = ReferenceSchedule();
  const StaticMechanism mech = LaplaceRelease({{{1.0, 0.0}, "a"}});
  const DatabaseStream stream = ConstantStream(1000, 1500);
  const std::vector<QueryEvent> events =
      OnePerStep({{1.0, 0.0}, "a"}, 1000, 1500);
  const RunLog log = RunFixed(
      s, [&mech](int64_t) -> const StaticMechanism& { return mech; }, stream,
      events, 1500, RandomSource::Noiseless(2));
  REQUIRE(log.rows.size() == events.size());
  // Epochs 0..4 start at 1000, 1100, 1210, 1331, 1465; all within 1500.
  CHECK(log.mechanism_runs == 5);
  double expected_eps = 0.0;
  for (int64_t i = 0; i <= 4; ++i) expected_eps += s.EpsilonAt(i);
  CHECK(log.ledger.SumEpsilon() == doctest::Approx(expected_eps).epsilon(1e-12));

  // Noiseless answers come from the epoch snapshot, so the error is exactly
  // the drift between snapshot and current histogram.
  for (const AnswerRow& r : log.rows) {
    CHECK(r.abs_error <= 0.5);
    CHECK(r.alpha_promised == doctest::Approx(s.AlphaAt(r.epoch)).epsilon(1e-12));
    CHECK(r.eps_spent_cum > 0.0);
  }
  CHECK(log.rows.front().epoch == 0);
  CHECK(log.rows.back().epoch == 4);
}

TEST_CASE("fixed-epoch run validates inputs") {
  const EpochSchedule s = ReferenceSchedule();
  const StaticMechanism mech = LaplaceRelease({{{1.0, 0.0}, "a"}});
  const DatabaseStream stream = ConstantStream(1000, 1200);
  auto pick = [&mech](int64_t) -> const StaticMechanism& { return mech; };
  const std::vector<QueryEvent> none;
  const std::vector<QueryEvent> early{{999, 1, {{1.0, 0.0}, "a"}}};
  const std::vector<QueryEvent> unsorted{{1100, 1, {{1.0, 0.0}, "a"}},
                                         {1050, 1, {{1.0, 0.0}, "a"}}};
  CHECK_THROWS_AS(RunFixed(s, pick, stream, none, 1500, RandomSource(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunFixed(s, pick, stream, early, 1200, RandomSource(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(RunFixed(s, pick, stream, unsorted, 1200, RandomSource(1)),
                  std::invalid_argument);
}

TEST_CASE("improver run reruns every step") {
  const double delta = std::exp(-1.0);
  const StaticMechanism mech = LaplaceRelease({{{1.0, 0.0}, "a"}});
  const ImproverSchedule s =
      ScheduleImprover(0.5, delta, 0.1, 100, 0.1, mech.contract);
  const DatabaseStream stream = ConstantStream(100, 130);
  const std::vector<QueryEvent> events =
      OnePerStep({{1.0, 0.0}, "a"}, 100, 130);
  const RunLog log =
      RunImprover(s, mech, stream, events, 130, RandomSource::Noiseless(3));
  CHECK(log.mechanism_runs == 31);
  CHECK(log.rows.size() == 31);
  double expected_eps = 0.0;
  for (int64_t t = 100; t <= 130; ++t) expected_eps += s.EpsilonAt(t);
  CHECK(log.ledger.SumEpsilon() == doctest::Approx(expected_eps).epsilon(1e-12));
  for (const AnswerRow& r : log.rows) {
    CHECK(r.epoch == r.t);
    // Noiseless mechanism run on the current snapshot answers exactly.
    CHECK(r.abs_error == 0.0);
    CHECK(r.alpha_promised ==
          doctest::Approx(s.AlphaEnvelopeAt(r.t)).epsilon(1e-12));
  }
}

TEST_CASE("grid erm run tracks the empirical minimizer") {
  ErmProblem problem;
  problem.dimension = 1;
  for (int i = 0; i <= 20; ++i)
    problem.grid.push_back({static_cast<double>(i) / 20.0});
  problem.loss = [](const std::vector<double>& theta, int type) {
    const double target = type == 0 ? 0.25 : 0.75;
    const double d = theta[0] - target;
    return std::min(1.0, d * d);
  };
  const DatabaseStream stream = ConstantStream(100, 120);
  PrivacyLedger ledger;
  const std::vector<ErmgRow> rows =
      RunErmg(problem, stream, 1.0, std::exp(-1.0), 0.1, 100, 0.1, 120,
              RandomSource(4), &ledger);
  REQUIRE(rows.size() == 21);
  for (const ErmgRow& r : rows) {
    CHECK(r.excess >= 0.0);
    CHECK(r.loss >= r.best_loss);
    CHECK(r.excess == doctest::Approx(r.loss - r.best_loss).epsilon(1e-12));
  }
  CHECK(ledger.SumEpsilon() > 0.0);
  CHECK(rows.back().eps_spent_cum ==
        doctest::Approx(ledger.SumEpsilon()).epsilon(1e-12));
}

}  // TEST_SUITE

}  // namespace
}  // namespace growingdp
