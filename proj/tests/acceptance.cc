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

// End-to-end release gate. Each criterion prints one PASS/FAIL line; the
// binary exits nonzero when any criterion fails. Tolerances are pinned here
// on purpose: loosening them is a library regression, not a test chore.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "growingdp/accountant.h"
#include "growingdp/blackbox.h"
#include "growingdp/harness.h"
#include "growingdp/pmwg.h"
#include "growingdp/schedulers.h"
#include "growingdp/sparse.h"

namespace growingdp {
namespace {

int g_failures = 0;

void Report(int index, const std::string& name, bool passed,
            const std::string& detail) {
  std::printf("%s  criterion %02d  %s  (%s)\n", passed ? "PASS" : "FAIL",
              index, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failures;
}

void RunCriterion(int index, const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [passed, detail] = body();
    Report(index, name, passed, detail);
  } catch (const std::exception& e) {
    Report(index, name, false, std::string("exception: ") + e.what());
  }
}

bool Near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool FilesEqual(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: privacy accounting closed forms and composition identities.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion1() {
  const NoiseFunction xi(1.0, 0.5);
  bool ok = Near(AtgLoss(xi, 4), 0.5, 1e-12);
  ok = ok && Near(NatgLoss(xi, 100, 400), 0.10625, 1e-12);
  ok = ok && Near(NsgLedger(xi, 100, {{100, 2}}), 0.325, 1e-12);

  // A live noisy numeric-sparse run must report exactly its closed form.
  SparseVector sv(SparseMode::kNumericSparse, SparseConfig{0.3, xi}, 4,
                  RandomSource(3).Derive("sv"));
  RandomSource values(17);
  int64_t t = 4;
  for (int step = 0; step < 120; ++step) {
    (void)sv.Step(t, values.NextUniform());
    if (step % 2 == 1) ++t;
  }
  ok = ok && Near(sv.PrivacyReport(), NsgLedger(xi, 4, sv.hard_counts()), 1e-9);

  PrivacyLedger ledger;
  ledger.Record("a", 0.1);
  ledger.Record("b", 0.1);
  const double delta = std::exp(-1.0);
  ok = ok && Near(CdpCompose(ledger, delta).epsilon, 0.21, 1e-12);
  ok = ok && Near(CdpSimplifiedBound(ledger, delta), 2.0 * std::sqrt(0.02), 1e-12);
  const double rho = ZcdpCompose({ZcdpOfPure(0.1), ZcdpOfPure(0.1),
                                  ZcdpOfPure(0.1), ZcdpOfPure(0.1)});
  ok = ok && Near(DpOfZcdp(rho, delta).epsilon, 0.02 + 2.0 * std::sqrt(0.02),
                  1e-12);

  // The calibrated noise saturates its closed-form horizon-free bound.
  const NoiseFunction cal = PmwgNoiseFunction(0.5, 100, 16, 1.0, 0.0);
  ok = ok && Near(PmwgEpsClosedBound(cal, 0.5, 16, 100), 1.0, 1e-9);
  ok = ok &&
       PmwgEpsBound(cal, 0.5, 16, 100, 10000) <=
           PmwgEpsClosedBound(cal, 0.5, 16, 100) + 1e-12;
  return {ok, "closed forms, live ledger, composition identities"};
}

// ---------------------------------------------------------------------------
// Criterion 2: epoch schedule budget series stay within and reach the totals.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion2() {
  const BlackBoxContract contract{1.0, 1.0, 1.0, std::nullopt};
  const EpochSchedule s(1.0, 0.0, std::exp(-1.0), 1000, contract);
  long double eps_sum = 0.0L;
  long double beta_sum = 0.0L;
  bool within = true;
  for (int64_t i = 0; i < 10000; ++i) {
    eps_sum += static_cast<long double>(s.EpsilonAt(i));
    beta_sum += static_cast<long double>(s.BetaAt(i));
    if (eps_sum > 1.0L) within = false;
  }
  bool ok = within;
  ok = ok && static_cast<double>(eps_sum) >= 1.0 - 1e-6;
  ok = ok && std::abs(static_cast<double>(beta_sum) - std::exp(-1.0)) <= 1e-12;

  const double delta2 = std::exp(-2.0);
  const EpochSchedule s2(0.8, delta2, 0.05, 2000, contract);
  long double sq = 0.0L;
  long double beta2 = 0.0L;
  for (int64_t i = 0; i < 20000; ++i) {
    const long double e = static_cast<long double>(s2.EpsilonAt(i));
    sq += e * e;
    beta2 += static_cast<long double>(s2.BetaAt(i));
  }
  ok = ok && 2.0 * std::sqrt(static_cast<double>(sq) * std::log(1.0 / delta2)) <=
                 0.8 + 1e-9;
  ok = ok && std::abs(static_cast<double>(beta2) - 0.05) <= 1e-12;
  return {ok, "sum(eps)=" + Fmt(static_cast<double>(eps_sum)) +
                  ", sum(beta)=" + Fmt(static_cast<double>(beta_sum))};
}

// ---------------------------------------------------------------------------
// Criterion 3: per-step schedule composes within its budget over 1e5 steps.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion3() {
  const double eps = 0.5;
  const double delta = std::exp(-1.0);
  const ImproverSchedule s(eps, delta, 0.1, 100, 0.1,
                           BlackBoxContract{1.0, 1.0, 1.0, std::nullopt});
  PrivacyLedger ledger;
  for (int64_t t = 100; t <= 100000; ++t)
    ledger.Record("step", s.EpsilonAt(t));
  const double cdp = CdpCompose(ledger, delta).epsilon;
  const double simplified = CdpSimplifiedBound(ledger, delta);
  const bool ok = cdp <= eps && simplified <= eps;
  return {ok, "cdp=" + Fmt(cdp) + ", simplified=" + Fmt(simplified) +
                  " vs eps=" + Fmt(eps)};
}

// ---------------------------------------------------------------------------
// Criterion 4: relative-entropy increase budget, 1e4 random instances.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion4() {
  const int64_t violations = CountEntropyIncreaseViolations(10000, 5, 20, 2026, 1e-9);
  return {violations == 0, "violations=" + std::to_string(violations)};
}

// ---------------------------------------------------------------------------
// Criterion 5: drift bound, exhaustive over small universes and horizons.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion5() {
  const int64_t violations = CountDriftBoundViolations(4, 12, 1e-9);
  const bool tight = DriftTightCaseExact();
  return {violations == 0 && tight,
          "violations=" + std::to_string(violations) +
              (tight ? ", tight case exact" : ", tight case missed")};
}

ExperimentConfig C6Config() {
  ExperimentConfig config;
  config.algorithm = "pmwg";
  config.alpha = 0.4;
  config.eps = 1.0;
  config.n = 50;
  config.universe = 32;
  config.horizon = 200;
  config.trials = 1;
  config.seed = 2026;
  config.noiseless = true;
  config.stream.kind = "iid";
  config.stream.weights.resize(32);
  config.stream.weights2.resize(32);
  for (int i = 0; i < 32; ++i) {
    config.stream.weights[static_cast<size_t>(i)] = 1.0 / (1.0 + i);
    config.stream.weights2[static_cast<size_t>(i)] = 1.0 / (32.0 - i);
  }
  config.stream.shift_time = 125;
  config.workload.kind = "adaptive-distinguisher";
  config.workload.per_step = 0;
  config.workload.total = 10000;
  config.out = "acceptance_out/c6";
  return config;
}

PmwgTrialResult ReplayC6Trial(const ExperimentConfig& config) {
  const RandomSource master = RandomSource::Noiseless(config.seed);
  const RandomSource trial_rng = master.Derive("trial", 0);
  const DatabaseStream stream =
      GenerateStream(config.stream, config.n, config.universe, config.horizon,
                     trial_rng.Derive("stream-gen"));
  return RunPmwgTrial(config, stream, trial_rng);
}

// ---------------------------------------------------------------------------
// Criterion 6: noiseless adaptive stress run answers 1e4 queries within alpha
// with no bottom and hard counts within the cap.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion6() {
  const ExperimentConfig config = C6Config();
  const ExperimentSummary summary = RunExperiment(config);
  bool ok = summary.queries == 10000;
  ok = ok && summary.exhausted_trials == 0;
  ok = ok && summary.failure_fraction_at_alpha == 0.0;
  ok = ok && summary.max_abs_error <= config.alpha + 1e-12;

  const PmwgTrialResult trial = ReplayC6Trial(config);
  ok = ok && static_cast<int64_t>(trial.records.size()) == 10000;
  for (const PmwgQueryRecord& r : trial.records) {
    if (r.exhausted || static_cast<double>(r.hard_cum) > r.budget_cap) {
      ok = false;
      break;
    }
  }
  return {ok, "max_err=" + Fmt(summary.max_abs_error) +
                  ", hard=" + std::to_string(summary.hard_total) +
                  ", bottom=" + std::to_string(summary.exhausted_trials)};
}

ExperimentConfig C7Config() {
  ExperimentConfig config;
  config.algorithm = "pmwg";
  config.alpha = 0.5;
  config.eps = 1.0;
  config.n = 200;
  config.universe = 8;
  config.horizon = 300;
  config.trials = 200;
  config.seed = 7;
  config.stream.kind = "iid";
  // The per-query budget kappa * exp(E(t)) admits a single query at this
  // scale, so the whole workload is one counting query right at the start.
  config.workload.kind = "counting";
  config.workload.per_step = 0;
  config.workload.total = 1;
  config.out = "acceptance_out/c7";
  return config;
}

// ---------------------------------------------------------------------------
// Criterion 7: with a workload inside the theorem query budget, the noisy
// failure fraction stays under the budget-form accuracy bound (clamped to
// one) plus three binomial sigma.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion7() {
  const ExperimentConfig config = C7Config();
  const ExperimentSummary summary = RunExperiment(config);
  const NoiseFunction xi = PmwgNoiseFunction(
      config.alpha, config.n, config.universe, config.eps, config.delta);
  const std::map<int64_t, int64_t> counts =
      WorkloadCounts(config.workload, config.n, config.horizon);
  std::map<int64_t, int64_t> budget_counts;
  for (const auto& [t, l] : counts)
    if (l > 0) budget_counts[t] = 2 * l;  // each answered query feeds a pair
  const double beta = SparseAccuracyBetaBudget(xi, config.alpha / 3.0,
                                               config.n, budget_counts);
  const double bound = std::min(1.0, beta);
  const double sigma =
      std::sqrt(bound * (1.0 - bound) / static_cast<double>(config.trials));
  bool ok = summary.budget_violations == 0;
  ok = ok && summary.failure_fraction_at_alpha <= bound + 3.0 * sigma + 1e-12;
  return {ok, "fraction=" + Fmt(summary.failure_fraction_at_alpha) +
                  " vs beta=" + Fmt(beta) + " (clamped " + Fmt(bound) +
                  "), budget violations=" +
                  std::to_string(summary.budget_violations)};
}

int LaplaceAuditOutcome(double scale, int64_t count, RandomSource rng) {
  const double released = static_cast<double>(count) + rng.NextLaplace(scale);
  int64_t bin = std::llround(released);
  if (bin < 0) bin = 0;
  if (bin > 19) bin = 19;
  return static_cast<int>(bin);
}

// Above-threshold micro-instance: two records, no growth, three repeats of
// the fraction-of-type-2 query; the outcome is the halt position (0 = never).
int AtgAuditOutcome(const std::vector<int64_t>& start_counts, RandomSource rng) {
  const Histogram x = Histogram::FromCounts(start_counts);
  const NoiseFunction xi(std::sqrt(2.0) / 2.0, 0.5);
  SparseVector sv(SparseMode::kAboveThreshold, SparseConfig{0.25, xi}, 2,
                  std::move(rng));
  const LinearQuery f{{0.0, 1.0}, "frac2"};
  for (int query = 1; query <= 3; ++query) {
    if (sv.Step(2, Eval(f, x)).kind == SparseAnswer::Kind::kAbove)
      return query;
  }
  return 0;
}

void WriteAuditCsv(const std::string& path,
                   const std::vector<std::pair<std::string, DpAuditReport>>& rows) {
  std::ofstream out(path, std::ios::binary);
  out << "audit,eps,samples,max_adjusted_ratio,flagged\n";
  for (const auto& [name, report] : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%lld,%.12g,%d\n", name.c_str(),
                  report.eps, static_cast<long long>(report.samples),
                  report.max_adjusted_ratio, report.flagged ? 1 : 0);
    out << buf;
  }
}

std::vector<std::pair<std::string, DpAuditReport>> RunAudits() {
  std::vector<std::pair<std::string, DpAuditReport>> results;
  const double eps = 0.5;
  auto honest_a = [eps](RandomSource rng) {
    return LaplaceAuditOutcome(1.0 / eps, 10, std::move(rng));
  };
  auto honest_b = [eps](RandomSource rng) {
    return LaplaceAuditOutcome(1.0 / eps, 11, std::move(rng));
  };
  results.emplace_back("laplace-honest",
                       DpAudit(honest_a, honest_b, 20, 1000000, eps,
                               RandomSource(101)));
  auto atg_a = [](RandomSource rng) { return AtgAuditOutcome({2, 0}, std::move(rng)); };
  auto atg_b = [](RandomSource rng) { return AtgAuditOutcome({1, 1}, std::move(rng)); };
  results.emplace_back("above-threshold",
                       DpAudit(atg_a, atg_b, 4, 1000000, 0.5, RandomSource(102)));
  auto broken_a = [eps](RandomSource rng) {
    return LaplaceAuditOutcome(0.5 / eps, 10, std::move(rng));
  };
  auto broken_b = [eps](RandomSource rng) {
    return LaplaceAuditOutcome(0.5 / eps, 11, std::move(rng));
  };
  results.emplace_back("laplace-broken",
                       DpAudit(broken_a, broken_b, 20, 1000000, eps,
                               RandomSource(103)));
  return results;
}

// ---------------------------------------------------------------------------
// Criterion 8: the statistical audit accepts honest mechanisms (including the
// growing-database above-threshold) and flags a noise-halved variant.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion8() {
  const auto audits = RunAudits();
  WriteAuditCsv("acceptance_out/c8.csv", audits);
  const bool ok = !audits[0].second.flagged && !audits[1].second.flagged &&
                  audits[2].second.flagged;
  return {ok, "honest=" + Fmt(audits[0].second.max_adjusted_ratio) +
                  ", atg=" + Fmt(audits[1].second.max_adjusted_ratio) +
                  ", broken flagged=" +
                  std::to_string(audits[2].second.flagged ? 1 : 0)};
}

// ---------------------------------------------------------------------------
// Criterion 9: the public histogram is reproducible from the transcript.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion9() {
  const ExperimentConfig config = C6Config();
  const PmwgTrialResult trial = ReplayC6Trial(config);
  const double gap =
      ReplayPublicHistogram(trial, config.alpha, config.universe, config.n);
  return {gap <= 1e-9, "replay gap=" + Fmt(gap)};
}

ExperimentConfig C10Config() {
  ExperimentConfig config;
  config.algorithm = "ermg";
  config.alpha = 0.0;
  config.eps = 1.0;
  config.delta = std::exp(-1.0);
  config.beta = 0.1;
  config.n = 100;
  config.universe = 2;
  config.horizon = 400;
  config.trials = 50;
  config.seed = 4;
  config.improver_c = 0.1;
  config.erm.grid_points = 101;
  config.stream.kind = "iid";
  // All arrivals carry the type-0 label so the empirical loss minimum sits at
  // the grid edge; the excess-risk trend is strongest for a one-sided surface.
  config.stream.weights = {1.0, 0.0};
  config.out = "acceptance_out/c10";
  return config;
}

// Pulls the `excess` column for rows at time t_pick out of an ermg CSV.
std::vector<double> ExcessesAt(const std::string& csv_path, int64_t t_pick) {
  std::ifstream in(csv_path);
  std::vector<double> values;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    long long trial = 0, t = 0;
    double loss = 0.0, best = 0.0, excess = 0.0, eps = 0.0;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lf,%lf,%lf,%lf", &trial, &t,
                    &loss, &best, &excess, &eps) == 6 &&
        t == t_pick)
      values.push_back(excess);
  }
  std::sort(values.begin(), values.end());
  return values;
}

// ---------------------------------------------------------------------------
// Criterion 10: private ERM excess risk improves as the database grows.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion10() {
  const ExperimentConfig config = C10Config();
  (void)RunExperiment(config);
  const std::vector<double> at100 = ExcessesAt("acceptance_out/c10.csv", 100);
  const std::vector<double> at400 = ExcessesAt("acceptance_out/c10.csv", 400);
  if (static_cast<int64_t>(at100.size()) != config.trials ||
      static_cast<int64_t>(at400.size()) != config.trials)
    return {false, "missing rows in c10.csv"};
  const double early = at100[at100.size() / 2];
  const double late = at400[at400.size() / 2];
  return {late < early,
          "median excess t=100: " + Fmt(early) + ", t=400: " + Fmt(late)};
}

struct C11Result {
  int64_t good = 0;
  std::string csv;
};

C11Result RunC11() {
  const std::vector<LinearQuery> queries{{{1.0, 0.0, 0.0, 0.0}, "f0"},
                                         {{1.0, 1.0, 0.0, 0.0}, "f01"},
                                         {{0.0, 0.0, 1.0, 1.0}, "f23"}};
  const StaticMechanism mech = SmallDb(queries);
  const RandomSource master(20260814);
  C11Result result;
  std::ostringstream csv;
  csv << "trial,worst_error\n";
  for (int64_t trial = 0; trial < 200; ++trial) {
    RandomSource src = master.Derive("trial", static_cast<uint64_t>(trial));
    std::vector<int64_t> counts(4, 0);
    for (int r = 0; r < 60; ++r) ++counts[src.NextIndex(4)];
    const Histogram x = Histogram::FromCounts(counts);
    const Answerer answer = mech.run(x, 5.0, 0.4, 0.1, src.Derive("mech"));
    double worst = 0.0;
    for (const LinearQuery& f : queries)
      worst = std::max(worst, std::abs(answer(f) - Eval(f, x)));
    if (worst <= 0.4) ++result.good;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%lld,%.12g\n",
                  static_cast<long long>(trial), worst);
    csv << buf;
  }
  result.csv = csv.str();
  return result;
}

// ---------------------------------------------------------------------------
// Criterion 11: the synthetic-database mechanism meets its accuracy target in
// at least 80% of trials.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion11() {
  const C11Result result = RunC11();
  std::ofstream out("acceptance_out/c11.csv", std::ios::binary);
  out << result.csv;
  return {result.good >= 160,
          std::to_string(result.good) + "/200 trials within 0.4"};
}

// ---------------------------------------------------------------------------
// Criterion 12: the experiment pipeline is bit-reproducible end to end.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> Criterion12() {
  ExperimentConfig c6 = C6Config();
  c6.out = "acceptance_out/c6_rerun";
  c6.threads = 2;
  (void)RunExperiment(c6);
  ExperimentConfig c7 = C7Config();
  c7.out = "acceptance_out/c7_rerun";
  c7.threads = 4;
  (void)RunExperiment(c7);
  ExperimentConfig c10 = C10Config();
  c10.out = "acceptance_out/c10_rerun";
  c10.threads = 3;
  (void)RunExperiment(c10);
  WriteAuditCsv("acceptance_out/c8_rerun.csv", RunAudits());
  std::ofstream c11out("acceptance_out/c11_rerun.csv", std::ios::binary);
  c11out << RunC11().csv;
  c11out.close();

  bool ok = true;
  for (const std::string& name : {"c6", "c7", "c10"}) {
    ok = ok && FilesEqual("acceptance_out/" + name + ".csv",
                          "acceptance_out/" + name + "_rerun.csv");
    ok = ok && FilesEqual("acceptance_out/" + name + "_summary.json",
                          "acceptance_out/" + name + "_rerun_summary.json");
  }
  ok = ok && FilesEqual("acceptance_out/c8.csv", "acceptance_out/c8_rerun.csv");
  ok = ok && FilesEqual("acceptance_out/c11.csv", "acceptance_out/c11_rerun.csv");
  return {ok, ok ? "all outputs byte-identical across reruns and thread counts"
                 : "rerun outputs differ"};
}

}  // namespace
}  // namespace growingdp

int main() {
  std::filesystem::create_directories("acceptance_out");
  using growingdp::RunCriterion;
  RunCriterion(1, "privacy accounting closed forms", growingdp::Criterion1);
  RunCriterion(2, "epoch schedule budget series", growingdp::Criterion2);
  RunCriterion(3, "per-step schedule composition", growingdp::Criterion3);
  RunCriterion(4, "entropy increase budget", growingdp::Criterion4);
  RunCriterion(5, "histogram drift bound", growingdp::Criterion5);
  RunCriterion(6, "noiseless adaptive stress run", growingdp::Criterion6);
  RunCriterion(7, "noisy failure fraction bound", growingdp::Criterion7);
  RunCriterion(8, "statistical privacy audit", growingdp::Criterion8);
  RunCriterion(9, "transcript replay", growingdp::Criterion9);
  RunCriterion(10, "erm excess risk improves with data", growingdp::Criterion10);
  RunCriterion(11, "synthetic database accuracy", growingdp::Criterion11);
  RunCriterion(12, "bit-reproducible pipeline", growingdp::Criterion12);
  if (growingdp::g_failures == 0) {
    std::printf("ALL 12 CRITERIA PASSED\n");
    return 0;
  }
  std::printf("%d CRITERIA FAILED\n", growingdp::g_failures);
  return 1;
}
