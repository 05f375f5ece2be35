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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "growingdp/blackbox.h"
#include "growingdp/core.h"
#include "growingdp/noise.h"
#include "growingdp/pmwg.h"
#include "growingdp/sparse.h"

namespace growingdp {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct StreamSpec {
  std::string kind = "iid";  // "iid" or "file"
  std::vector<double> weights;   // arrival distribution; empty means uniform
  std::vector<double> weights2;  // post-shift distribution (optional)
  int64_t shift_time = -1;       // first time drawing from weights2
  std::string path;              // stream file for kind == "file"
};

struct WorkloadSpec {
  // "random-linear", "counting", "adaptive-distinguisher", "fixed-list",
  // "random-class".
  std::string kind = "random-linear";
  int64_t per_step = 1;
  int64_t total = 0;  // when > 0, spread this many queries evenly over steps
  std::vector<LinearQuery> queries;  // fixed-list class
  int64_t class_size = 0;            // random-class size k
};

struct SparseSpec {
  std::string mode = "nsg";  // "atg", "natg", "nsg"
  double threshold = 0.0;
  std::optional<double> xi_c;  // explicit noise function; otherwise calibrated
  std::optional<double> xi_p;
  std::vector<std::pair<int64_t, double>> values;  // explicit query values
};

struct ErmSpec {
  int grid_points = 101;
};

struct ExperimentConfig {
  std::string algorithm;  // pmwg | sparse | scheduler | improver | ermg
  double alpha = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  int64_t n = 0;
  int universe = 0;
  std::optional<double> noise_exponent;
  uint64_t seed = 1;
  int64_t trials = 1;
  int64_t horizon = 0;
  bool noiseless = false;
  double kappa = 1.0;
  int threads = 1;
  std::string out;
  StreamSpec stream;
  WorkloadSpec workload;
  SparseSpec sparse;
  ErmSpec erm;
  std::string mechanism = "laplace";  // scheduler/improver static mechanism
  std::optional<BlackBoxContract> contract_override;
  double improver_c = 0.1;
};

ExperimentConfig ParseExperimentConfig(const std::string& json_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// ---------------------------------------------------------------------------
// Stream and workload generation
// ---------------------------------------------------------------------------

// Draws a start database of n records and horizon-n arrivals i.i.d. from the
// spec's distribution (switching to weights2 from shift_time on).
DatabaseStream GenerateStream(const StreamSpec& spec, int64_t n, int universe,
                              int64_t horizon, RandomSource rng);

// Greedy distinguishing query: weight 1 exactly where the private histogram
// exceeds the public one. Its gap is half the L1 distance between x and y.
LinearQuery AdaptiveDistinguisher(const Histogram& x, const Histogram& y);

// Number of workload queries at each time step in [n, horizon].
std::map<int64_t, int64_t> WorkloadCounts(const WorkloadSpec& spec, int64_t n,
                                          int64_t horizon);

// Materializes the j-th query at time t. `public_hist` is required for the
// adaptive-distinguisher workload; `global_index` counts queries so far.
LinearQuery MakeWorkloadQuery(const WorkloadSpec& spec, int universe, int64_t t,
                              int64_t j, int64_t global_index,
                              const Histogram* x_t, const Histogram* public_hist,
                              const RandomSource& workload_rng);

// ---------------------------------------------------------------------------
// Statistical privacy audit
// ---------------------------------------------------------------------------

struct DpAuditBin {
  int bin = 0;
  int64_t count_a = 0;
  int64_t count_b = 0;
  double ratio = 0.0;     // max-direction probability ratio
  double sigma = 0.0;     // delta-method standard error of the ratio
  bool flagged = false;
};

struct DpAuditReport {
  double eps = 0.0;
  int64_t samples = 0;
  double max_adjusted_ratio = 0.0;  // max over bins of ratio - 3 sigma
  bool flagged = false;
  std::vector<DpAuditBin> bins;
};

// Runs both mechanisms `samples` times on neighboring inputs and compares
// per-bin outcome frequencies against e^eps with a 5% multiplicative margin
// and a 3 sigma binomial slack. The mechanism callables map a derived random
// source to a discrete outcome in [0, bins).
DpAuditReport DpAudit(const std::function<int(RandomSource)>& mechanism_a,
                      const std::function<int(RandomSource)>& mechanism_b,
                      int bins, int64_t samples, double eps, RandomSource rng);

// ---------------------------------------------------------------------------
// Trial runners
// ---------------------------------------------------------------------------

struct PmwgQueryRecord {
  int64_t t = 0;
  int64_t j = 0;
  LinearQuery query;
  double truth = 0.0;
  double released = 0.0;
  double public_before = 0.0;
  bool hard = false;
  bool exhausted = false;
  int64_t hard_cum = 0;
  double budget_cap = 0.0;
  double eps_ledger = 0.0;
};

struct PmwgTrialResult {
  std::vector<PmwgQueryRecord> records;
  // Public histogram after each record (for transcript replay checks).
  std::vector<Histogram> public_after;
  int64_t hard_total = 0;
  double eps_report = 0.0;
  bool exhausted = false;
  int64_t budget_violations = 0;
};

PmwgTrialResult RunPmwgTrial(const ExperimentConfig& config,
                             const DatabaseStream& stream,
                             RandomSource trial_rng);

// Rebuilds the public histogram sequence from the released transcript and the
// query times alone (no private data); returns the max L-infinity gap against
// the recorded snapshots.
double ReplayPublicHistogram(const PmwgTrialResult& trial, double alpha,
                             int universe, int64_t start_size);

// ---------------------------------------------------------------------------
// Invariant suites (shared by the validate subcommand and the tests)
// ---------------------------------------------------------------------------

// Exhaustively checks |f(x_tau) - f(x_t)| <= (tau-t)/tau over every reachable
// count pair with universe <= universe_max, tau <= t_max and every {0,1}
// query; returns the number of violations beyond `tol`.
int64_t CountDriftBoundViolations(int universe_max, int64_t t_max, double tol);

// True iff the worst-case drift instance (two records, one new arrival)
// attains (tau-t)/tau = 1/3 exactly.
bool DriftTightCaseExact();

// Random search for violations of the per-arrival relative-entropy budget
// RE(x',y') - RE(x,y) <= ln(N)/(t+1) + ln(t)/(t+1) + ln((t+1)/t).
int64_t CountEntropyIncreaseViolations(int64_t instances, int universe_max,
                                       int64_t t_max, uint64_t seed,
                                       double tol);

struct ValidationResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<ValidationResult> RunValidationSuite(uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

struct ExperimentSummary {
  std::string algorithm;
  int64_t trials = 0;
  int64_t queries = 0;
  double max_abs_error = 0.0;
  double failure_fraction_at_alpha = 0.0;
  int64_t hard_total = 0;
  double eps_ledger_max = 0.0;
  int64_t budget_violations = 0;
  int64_t exhausted_trials = 0;
};

// Runs all trials (optionally across threads; outputs are byte-identical for
// any thread count), writes <out>.csv and <out>_summary.json when `out` is
// set, and returns the summary.
ExperimentSummary RunExperiment(const ExperimentConfig& config);

std::string SummaryToJson(const ExperimentSummary& summary);

}  // namespace growingdp
