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
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "growingdp/accountant.h"
#include "growingdp/harness.h"
#include "growingdp/sparse.h"
#include "json.hpp"

namespace {

using growingdp::ExperimentConfig;
using nlohmann::ordered_json;

struct RunOverrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trials;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool noiseless = false;
};

void AddRunOptions(CLI::App* cmd, RunOverrides* overrides) {
  cmd->add_option("--config", overrides->config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", overrides->seed, "override the config seed");
  cmd->add_option("--trials", overrides->trials, "override the trial count");
  cmd->add_option("--threads", overrides->threads,
                  "override the worker thread count");
  cmd->add_option("--out", overrides->out, "override the output path prefix");
  cmd->add_flag("--noiseless", overrides->noiseless,
                "zero all privacy noise (debugging only)");
}

int RunAlgorithm(const std::string& algorithm, const RunOverrides& overrides) {
  ExperimentConfig config = growingdp::LoadExperimentConfig(overrides.config_path);
  if (config.algorithm != algorithm)
    throw std::invalid_argument("config: algorithm '" + config.algorithm +
                                "' does not match subcommand '" + algorithm +
                                "'");
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.trials) config.trials = *overrides.trials;
  if (overrides.threads) config.threads = *overrides.threads;
  if (overrides.out) config.out = *overrides.out;
  if (overrides.noiseless) config.noiseless = true;
  const growingdp::ExperimentSummary summary = growingdp::RunExperiment(config);
  std::cout << growingdp::SummaryToJson(summary);
  return 0;
}

int RunCompose(const std::vector<double>& eps_values, double delta) {
  growingdp::PrivacyLedger ledger;
  for (size_t i = 0; i < eps_values.size(); ++i)
    ledger.Record("event" + std::to_string(i), eps_values[i]);
  ordered_json out;
  out["events"] = eps_values.size();
  out["basic_eps"] = growingdp::BasicCompose(ledger).epsilon;
  out["sum_eps_squared"] = ledger.SumEpsilonSquared();
  std::vector<double> rhos;
  rhos.reserve(eps_values.size());
  for (double e : eps_values) rhos.push_back(growingdp::ZcdpOfPure(e));
  const double rho = growingdp::ZcdpCompose(rhos);
  out["zcdp_rho"] = rho;
  if (delta > 0.0) {
    out["delta"] = delta;
    out["cdp_eps"] = growingdp::CdpCompose(ledger, delta).epsilon;
    if (delta <= std::exp(-1.0) && ledger.SumEpsilonSquared() <= 1.0)
      out["cdp_simplified_eps"] = growingdp::CdpSimplifiedBound(ledger, delta);
    out["zcdp_eps"] = growingdp::DpOfZcdp(rho, delta).epsilon;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// Counting-query release on two fixed neighboring databases (counts 10 and
// 11 of 20 records): value + Lap(1/eps), binned by rounding.
int LaplaceAuditOutcome(double scale, int64_t count, int bins,
                        growingdp::RandomSource rng) {
  const double released =
      static_cast<double>(count) + rng.NextLaplace(scale);
  int64_t bin = std::llround(released);
  if (bin < 0) bin = 0;
  if (bin >= bins) bin = bins - 1;
  return static_cast<int>(bin);
}

// Above-threshold micro-instance: two records, no growth, three repeats of
// the fraction-of-type-2 query; the outcome is the halt position (0 = never
// halted). The two inputs differ in one starting record.
int AtgAuditOutcome(const std::vector<int64_t>& start_counts,
                    growingdp::RandomSource rng) {
  const growingdp::Histogram x = growingdp::Histogram::FromCounts(start_counts);
  const growingdp::NoiseFunction xi(std::sqrt(2.0) / 2.0, 0.5);
  growingdp::SparseVector sv(growingdp::SparseMode::kAboveThreshold,
                             growingdp::SparseConfig{0.25, xi}, 2,
                             std::move(rng));
  const growingdp::LinearQuery f{{0.0, 1.0}, "frac2"};
  for (int query = 1; query <= 3; ++query) {
    const growingdp::SparseAnswer ans = sv.Step(2, growingdp::Eval(f, x));
    if (ans.kind == growingdp::SparseAnswer::Kind::kAbove) return query;
  }
  return 0;
}

int RunDpAudit(const std::string& pair, double eps, int64_t samples, int bins,
               uint64_t seed, bool fail_on_flag) {
  std::function<int(growingdp::RandomSource)> mech_a;
  std::function<int(growingdp::RandomSource)> mech_b;
  double audited_eps = eps;
  if (pair == "laplace-honest" || pair == "laplace-broken") {
    const double scale = pair == "laplace-honest" ? 1.0 / eps : 0.5 / eps;
    mech_a = [scale, bins](growingdp::RandomSource rng) {
      return LaplaceAuditOutcome(scale, 10, bins, std::move(rng));
    };
    mech_b = [scale, bins](growingdp::RandomSource rng) {
      return LaplaceAuditOutcome(scale, 11, bins, std::move(rng));
    };
  } else if (pair == "atg") {
    audited_eps = 0.5;
    bins = 4;
    mech_a = [](growingdp::RandomSource rng) {
      return AtgAuditOutcome({2, 0}, std::move(rng));
    };
    mech_b = [](growingdp::RandomSource rng) {
      return AtgAuditOutcome({1, 1}, std::move(rng));
    };
  } else {
    throw std::invalid_argument("dp-audit: unknown pair " + pair);
  }
  const growingdp::DpAuditReport report =
      growingdp::DpAudit(mech_a, mech_b, bins, samples, audited_eps,
                         growingdp::RandomSource(seed));
  ordered_json out;
  out["pair"] = pair;
  out["eps"] = report.eps;
  out["samples"] = report.samples;
  out["max_adjusted_ratio"] = report.max_adjusted_ratio;
  out["flagged"] = report.flagged;
  ordered_json rows = ordered_json::array();
  for (const growingdp::DpAuditBin& b : report.bins) {
    ordered_json row;
    row["bin"] = b.bin;
    row["count_a"] = b.count_a;
    row["count_b"] = b.count_b;
    row["ratio"] = std::isfinite(b.ratio) ? b.ratio : -1.0;
    row["flagged"] = b.flagged;
    rows.push_back(row);
  }
  out["bins"] = rows;
  std::cout << out.dump(2) << "\n";
  return fail_on_flag && report.flagged ? 3 : 0;
}

int RunValidate(uint64_t seed) {
  const std::vector<growingdp::ValidationResult> results =
      growingdp::RunValidationSuite(seed);
  bool all_ok = true;
  for (const growingdp::ValidationResult& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  ("
              << r.detail << ")\n";
    if (!r.passed) all_ok = false;
  }
  return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growingdp: differentially private analysis of growing databases"};
  app.require_subcommand(1);

  RunOverrides pmwg_opts, sparse_opts, sched_opts, improver_opts, ermg_opts;
  AddRunOptions(app.add_subcommand("run-pmwg",
                                   "private multiplicative weights experiment"),
                &pmwg_opts);
  AddRunOptions(app.add_subcommand("run-sparse",
                                   "above-threshold family experiment"),
                &sparse_opts);
  AddRunOptions(app.add_subcommand("run-scheduler",
                                   "fixed-epoch black-box scheduler experiment"),
                &sched_opts);
  AddRunOptions(app.add_subcommand("run-improver",
                                   "time-adaptive black-box scheduler experiment"),
                &improver_opts);
  AddRunOptions(app.add_subcommand("run-ermg",
                                   "private ERM on a growing database"),
                &ermg_opts);

  std::vector<double> compose_eps;
  double compose_delta = 0.0;
  CLI::App* compose = app.add_subcommand("compose", "compose pure-DP events");
  compose->add_option("--eps", compose_eps, "per-event epsilon (repeatable)")
      ->required();
  compose->add_option("--delta", compose_delta, "target delta for CDP/zCDP");

  std::string audit_pair = "laplace-honest";
  double audit_eps = 0.5;
  int64_t audit_samples = 200000;
  int audit_bins = 22;
  uint64_t audit_seed = 1;
  bool audit_fail_on_flag = false;
  CLI::App* audit = app.add_subcommand("dp-audit",
                                       "frequency-ratio privacy audit");
  audit->add_option("--pair", audit_pair,
                    "laplace-honest | laplace-broken | atg");
  audit->add_option("--eps", audit_eps, "audited epsilon (laplace pairs)");
  audit->add_option("--samples", audit_samples, "samples per mechanism");
  audit->add_option("--bins", audit_bins, "outcome bins (laplace pairs)");
  audit->add_option("--seed", audit_seed, "audit seed");
  audit->add_flag("--fail-on-flag", audit_fail_on_flag,
                  "exit 3 when the audit flags a violation");

  uint64_t validate_seed = 1;
  CLI::App* validate = app.add_subcommand("validate",
                                          "run the invariant validation suite");
  validate->add_option("--seed", validate_seed, "validation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run-pmwg")) return RunAlgorithm("pmwg", pmwg_opts);
    if (app.got_subcommand("run-sparse"))
      return RunAlgorithm("sparse", sparse_opts);
    if (app.got_subcommand("run-scheduler"))
      return RunAlgorithm("scheduler", sched_opts);
    if (app.got_subcommand("run-improver"))
      return RunAlgorithm("improver", improver_opts);
    if (app.got_subcommand("run-ermg")) return RunAlgorithm("ermg", ermg_opts);
    if (app.got_subcommand("compose"))
      return RunCompose(compose_eps, compose_delta);
    if (app.got_subcommand("dp-audit"))
      return RunDpAudit(audit_pair, audit_eps, audit_samples, audit_bins,
                        audit_seed, audit_fail_on_flag);
    if (app.got_subcommand("validate")) return RunValidate(validate_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
