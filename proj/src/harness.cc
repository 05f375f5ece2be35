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

#include "growingdp/harness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "growingdp/accountant.h"
#include "growingdp/pmwg.h"
#include "growingdp/schedulers.h"

namespace growingdp {

namespace {

int SampleType(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const size_t idx = static_cast<size_t>(it - cumulative.begin());
  return static_cast<int>(std::min(idx, cumulative.size() - 1));
}

std::vector<double> CumulativeWeights(const std::vector<double>& weights,
                                      int universe) {
  std::vector<double> w = weights;
  if (w.empty()) w.assign(static_cast<size_t>(universe), 1.0);
  if (static_cast<int>(w.size()) != universe)
    throw std::invalid_argument("stream: weight vector size mismatch");
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw std::invalid_argument("stream: negative weight");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("stream: zero weight vector");
  std::vector<double> cumulative(w.size());
  double acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    acc += w[i] / total;
    cumulative[i] = acc;
  }
  cumulative.back() = 1.0;
  return cumulative;
}

}  // namespace

DatabaseStream GenerateStream(const StreamSpec& spec, int64_t n, int universe,
                              int64_t horizon, RandomSource rng) {
  if (spec.kind == "file") {
    DatabaseStream stream = LoadStream(spec.path);
    if (stream.universe() != universe || stream.start_size() != n)
      throw std::invalid_argument("stream file: n/N do not match config");
    if (stream.final_time() < horizon)
      throw std::invalid_argument("stream file: shorter than horizon");
    return stream;
  }
  if (spec.kind != "iid")
    throw std::invalid_argument("stream: unknown kind " + spec.kind);
  if (horizon < n) throw std::invalid_argument("stream: horizon before n");
  const std::vector<double> cum1 = CumulativeWeights(spec.weights, universe);
  const std::vector<double> cum2 = spec.weights2.empty()
                                       ? cum1
                                       : CumulativeWeights(spec.weights2, universe);
  RandomSource src = rng.Derive("stream");
  std::vector<int64_t> initial(static_cast<size_t>(universe), 0);
  for (int64_t i = 0; i < n; ++i)
    ++initial[static_cast<size_t>(SampleType(cum1, src.NextUniform()))];
  std::vector<int> arrivals;
  arrivals.reserve(static_cast<size_t>(horizon - n));
  for (int64_t size = n + 1; size <= horizon; ++size) {
    const bool shifted = spec.shift_time > 0 && size >= spec.shift_time;
    arrivals.push_back(SampleType(shifted ? cum2 : cum1, src.NextUniform()));
  }
  return DatabaseStream(universe, std::move(initial), std::move(arrivals));
}

LinearQuery AdaptiveDistinguisher(const Histogram& x, const Histogram& y) {
  if (x.universe() != y.universe())
    throw std::invalid_argument("distinguisher: dimension mismatch");
  LinearQuery f;
  f.weights.resize(static_cast<size_t>(x.universe()));
  for (int i = 0; i < x.universe(); ++i)
    f.weights[static_cast<size_t>(i)] = x.weight(i) > y.weight(i) ? 1.0 : 0.0;
  f.id = "adaptive";
  return f;
}

std::map<int64_t, int64_t> WorkloadCounts(const WorkloadSpec& spec, int64_t n,
                                          int64_t horizon) {
  if (horizon < n) throw std::invalid_argument("workload: horizon before n");
  std::map<int64_t, int64_t> counts;
  const int64_t steps = horizon - n + 1;
  if (spec.total > 0) {
    const int64_t base = spec.total / steps;
    const int64_t rem = spec.total % steps;
    for (int64_t t = n; t <= horizon; ++t)
      counts[t] = base + ((t - n) < rem ? 1 : 0);
    return counts;
  }
  if (spec.per_step < 0)
    throw std::invalid_argument("workload: negative per_step");
  for (int64_t t = n; t <= horizon; ++t) counts[t] = spec.per_step;
  return counts;
}

LinearQuery MakeWorkloadQuery(const WorkloadSpec& spec, int universe, int64_t t,
                              int64_t j, int64_t global_index,
                              const Histogram* x_t, const Histogram* public_hist,
                              const RandomSource& workload_rng) {
  if (spec.kind == "fixed-list") {
    if (spec.queries.empty())
      throw std::invalid_argument("workload: fixed-list needs queries");
    return spec.queries[static_cast<size_t>(global_index) % spec.queries.size()];
  }
  if (spec.kind == "adaptive-distinguisher") {
    if (x_t == nullptr || public_hist == nullptr)
      throw std::invalid_argument(
          "workload: adaptive-distinguisher needs private and public "
          "histograms");
    LinearQuery f = AdaptiveDistinguisher(*x_t, *public_hist);
    f.id = "adaptive_" + std::to_string(t) + "_" + std::to_string(j);
    return f;
  }
  RandomSource src = workload_rng.Derive("query", static_cast<uint64_t>(t),
                                         static_cast<uint64_t>(j));
  LinearQuery f;
  f.weights.resize(static_cast<size_t>(universe));
  if (spec.kind == "random-linear") {
    for (double& w : f.weights) w = src.NextUniform();
    f.id = "r" + std::to_string(t) + "_" + std::to_string(j);
    return f;
  }
  if (spec.kind == "counting") {
    for (double& w : f.weights) w = src.NextUniform() < 0.5 ? 1.0 : 0.0;
    f.id = "c" + std::to_string(t) + "_" + std::to_string(j);
    return f;
  }
  throw std::invalid_argument("workload: unknown kind " + spec.kind);
}

DpAuditReport DpAudit(const std::function<int(RandomSource)>& mechanism_a,
                      const std::function<int(RandomSource)>& mechanism_b,
                      int bins, int64_t samples, double eps, RandomSource rng) {
  if (bins < 2) throw std::invalid_argument("audit: need at least two bins");
  if (samples < 1000)
    throw std::invalid_argument("audit: need at least 1000 samples");
  if (!(eps > 0.0)) throw std::invalid_argument("audit: eps must be positive");
  std::vector<int64_t> count_a(static_cast<size_t>(bins), 0);
  std::vector<int64_t> count_b(static_cast<size_t>(bins), 0);
  for (int64_t i = 0; i < samples; ++i) {
    const int oa = mechanism_a(rng.Derive("audit-a", static_cast<uint64_t>(i)));
    const int ob = mechanism_b(rng.Derive("audit-b", static_cast<uint64_t>(i)));
    if (oa < 0 || oa >= bins || ob < 0 || ob >= bins)
      throw std::out_of_range("audit: outcome outside bin range");
    ++count_a[static_cast<size_t>(oa)];
    ++count_b[static_cast<size_t>(ob)];
  }
  constexpr int64_t kMinCount = 25;
  const double limit = std::exp(eps) * 1.05;
  DpAuditReport report;
  report.eps = eps;
  report.samples = samples;
  const double s = static_cast<double>(samples);
  for (int b = 0; b < bins; ++b) {
    DpAuditBin row;
    row.bin = b;
    row.count_a = count_a[static_cast<size_t>(b)];
    row.count_b = count_b[static_cast<size_t>(b)];
    const int64_t hi = std::max(row.count_a, row.count_b);
    const int64_t lo = std::min(row.count_a, row.count_b);
    if (hi < kMinCount) {
      report.bins.push_back(row);
      continue;
    }
    if (lo == 0) {
      row.ratio = std::numeric_limits<double>::infinity();
      row.flagged = true;
      report.flagged = true;
      report.max_adjusted_ratio = row.ratio;
      report.bins.push_back(row);
      continue;
    }
    const double pa = static_cast<double>(row.count_a) / s;
    const double pb = static_cast<double>(row.count_b) / s;
    row.ratio = std::max(pa / pb, pb / pa);
    row.sigma = row.ratio *
                std::sqrt((1.0 - pa) / static_cast<double>(row.count_a) +
                          (1.0 - pb) / static_cast<double>(row.count_b));
    const double adjusted = row.ratio - 3.0 * row.sigma;
    report.max_adjusted_ratio = std::max(report.max_adjusted_ratio, adjusted);
    if (adjusted > limit) {
      row.flagged = true;
      report.flagged = true;
    }
    report.bins.push_back(row);
  }
  return report;
}

PmwgTrialResult RunPmwgTrial(const ExperimentConfig& config,
                             const DatabaseStream& stream,
                             RandomSource trial_rng) {
  PmwgConfig pc{config.alpha,    config.eps,      config.delta,
                config.n,        config.universe, config.noise_exponent};
  Pmwg engine(pc, trial_rng.Derive("pmwg"));
  const RandomSource workload_rng = trial_rng.Derive("workload");
  const std::map<int64_t, int64_t> counts =
      WorkloadCounts(config.workload, config.n, config.horizon);
  PmwgTrialResult result;
  int64_t global = 0;
  int64_t queries_cum = 0;
  double budget_cum = 0.0;
  for (int64_t t = config.n; t <= config.horizon && !result.exhausted; ++t) {
    budget_cum += TheoremQueryBudgetIncrement(pc, t, config.kappa);
    const Histogram x_t = stream.HistogramAt(t);
    bool budget_violated = false;
    const auto it = counts.find(t);
    const int64_t l = it == counts.end() ? 0 : it->second;
    for (int64_t j = 1; j <= l; ++j) {
      const LinearQuery query =
          MakeWorkloadQuery(config.workload, config.universe, t, j, global,
                            &x_t, &engine.public_histogram(), workload_rng);
      ++global;
      ++queries_cum;
      if (static_cast<double>(queries_cum) > budget_cum) budget_violated = true;
      const PmwgOutcome outcome = engine.Answer({t, j, query}, x_t);
      PmwgQueryRecord record;
      record.t = t;
      record.j = j;
      record.query = query;
      record.truth = Eval(query, x_t);
      record.released = outcome.exhausted
                            ? std::numeric_limits<double>::quiet_NaN()
                            : outcome.released;
      record.public_before = outcome.public_answer;
      record.hard = outcome.hard;
      record.exhausted = outcome.exhausted;
      record.hard_cum = engine.hard_total();
      record.budget_cap = engine.hard_budget_cap();
      record.eps_ledger = engine.PrivacyReport();
      result.records.push_back(std::move(record));
      result.public_after.push_back(engine.public_histogram());
      if (outcome.exhausted) {
        result.exhausted = true;
        break;
      }
    }
    if (budget_violated) ++result.budget_violations;
  }
  result.hard_total = engine.hard_total();
  result.eps_report = engine.PrivacyReport();
  return result;
}

double ReplayPublicHistogram(const PmwgTrialResult& trial, double alpha,
                             int universe, int64_t start_size) {
  Histogram y = Histogram::Uniform(universe, start_size);
  int64_t t_prev = start_size;
  double max_gap = 0.0;
  for (size_t k = 0; k < trial.records.size(); ++k) {
    const PmwgQueryRecord& r = trial.records[k];
    if (r.t > t_prev) {
      y = UniformUpdate(y, t_prev, r.t);
      t_prev = r.t;
    }
    if (!r.exhausted && r.hard) {
      const double f_y = Eval(r.query, y);
      std::vector<double> direction(r.query.weights);
      if (r.released >= f_y) {
        for (double& d : direction) d = 1.0 - d;
      }
      y = MwUpdate(y, direction, alpha / 6.0);
    }
    const Histogram& snapshot = trial.public_after[k];
    for (int i = 0; i < universe; ++i)
      max_gap = std::max(max_gap, std::abs(y.weight(i) - snapshot.weight(i)));
  }
  return max_gap;
}

int64_t CountDriftBoundViolations(int universe_max, int64_t t_max, double tol) {
  if (universe_max < 1 || t_max < 1)
    throw std::invalid_argument("drift check: bad bounds");
  int64_t violations = 0;
  for (int universe = 1; universe <= universe_max; ++universe) {
    for (int64_t t = 1; t <= t_max; ++t) {
      const std::vector<std::vector<int64_t>> bases =
          EnumerateDatabases(universe, t);
      for (int64_t tau = t; tau <= t_max; ++tau) {
        std::vector<std::vector<int64_t>> additions;
        if (tau == t) {
          additions.push_back(std::vector<int64_t>(
              static_cast<size_t>(universe), 0));
        } else {
          additions = EnumerateDatabases(universe, tau - t);
        }
        const double bound =
            static_cast<double>(tau - t) / static_cast<double>(tau);
        for (const auto& c : bases) {
          for (const auto& d : additions) {
            for (uint32_t mask = 0; mask < (1u << universe); ++mask) {
              int64_t num_t = 0;
              int64_t num_tau = 0;
              for (int i = 0; i < universe; ++i) {
                if ((mask >> i) & 1u) {
                  num_t += c[static_cast<size_t>(i)];
                  num_tau += c[static_cast<size_t>(i)] + d[static_cast<size_t>(i)];
                }
              }
              const double gap =
                  std::abs(static_cast<double>(num_t) / static_cast<double>(t) -
                           static_cast<double>(num_tau) / static_cast<double>(tau));
              if (gap > bound + tol) ++violations;
            }
          }
        }
      }
    }
  }
  return violations;
}

bool DriftTightCaseExact() {
  const Histogram x2 = Histogram::FromCounts({2, 0});
  const Histogram x3 = AddEntry(x2, 1);
  const LinearQuery f{{1.0, 0.0}, "f"};
  const double gap = std::abs(Eval(f, x3) - Eval(f, x2));
  return std::abs(gap - 1.0 / 3.0) <= 1e-15;
}

int64_t CountEntropyIncreaseViolations(int64_t instances, int universe_max,
                                       int64_t t_max, uint64_t seed,
                                       double tol) {
  if (universe_max < 2 || t_max < 1 || instances < 1)
    throw std::invalid_argument("entropy check: bad bounds");
  RandomSource root(seed);
  int64_t violations = 0;
  for (int64_t k = 0; k < instances; ++k) {
    RandomSource src = root.Derive("entropy", static_cast<uint64_t>(k));
    const int universe =
        2 + static_cast<int>(src.NextIndex(static_cast<uint64_t>(universe_max - 1)));
    const int64_t t = 1 + static_cast<int64_t>(
                              src.NextIndex(static_cast<uint64_t>(t_max)));
    std::vector<int64_t> counts(static_cast<size_t>(universe), 0);
    for (int64_t r = 0; r < t; ++r)
      ++counts[src.NextIndex(static_cast<uint64_t>(universe))];
    const Histogram x = Histogram::FromCounts(counts);
    std::vector<double> yw(static_cast<size_t>(universe));
    double sum = 0.0;
    for (double& w : yw) {
      w = src.NextUniform();
      sum += w;
    }
    for (double& w : yw) w /= sum;
    const Histogram y(yw, t);
    const Histogram y_next = UniformUpdate(y, t, t + 1);
    const double before = RelativeEntropy(x, y);
    const double budget = PmwgBudgetIncrement(t + 1, universe);
    for (int i = 0; i < universe; ++i) {
      const Histogram x_next = AddEntry(x, i);
      const double after = RelativeEntropy(x_next, y_next);
      if (after - before > budget + tol) ++violations;
    }
  }
  return violations;
}

std::vector<ValidationResult> RunValidationSuite(uint64_t seed) {
  std::vector<ValidationResult> results;

  {
    const int64_t v = CountDriftBoundViolations(3, 9, 1e-9);
    results.push_back({"histogram-drift-bound", v == 0,
                       "violations=" + std::to_string(v)});
  }
  {
    const bool ok = DriftTightCaseExact();
    results.push_back({"histogram-drift-tight-case", ok,
                       ok ? "gap attains (tau-t)/tau" : "tight case missed"});
  }
  {
    const int64_t v = CountEntropyIncreaseViolations(2000, 5, 20, seed, 1e-9);
    results.push_back({"entropy-increase-budget", v == 0,
                       "violations=" + std::to_string(v)});
  }
  {
    EpochSchedule schedule(1.0, 0.0, std::exp(-1.0), 1000,
                           BlackBoxContract{1.0, 1.0, 1.0, std::nullopt});
    double eps_sum = 0.0;
    double beta_sum = 0.0;
    for (int64_t i = 0; i < 4000; ++i) {
      eps_sum += schedule.EpsilonAt(i);
      beta_sum += schedule.BetaAt(i);
    }
    const bool ok = std::abs(eps_sum - 1.0) < 1e-9 &&
                    std::abs(beta_sum - std::exp(-1.0)) < 1e-12;
    results.push_back({"schedule-budget-series", ok,
                       "sum(eps_i)=" + std::to_string(eps_sum)});
  }
  {
    RandomSource rng = RandomSource(seed).Derive("simplex");
    Histogram y = Histogram::Uniform(8, 10);
    bool ok = true;
    for (int step = 0; step < 500; ++step) {
      if (step % 3 == 0) {
        y = AddEntry(y, static_cast<int>(rng.NextIndex(8)));
      } else if (step % 3 == 1) {
        y = UniformUpdate(y, y.size(), y.size() + 1);
      } else {
        std::vector<double> dir(8);
        for (double& d : dir) d = rng.NextUniform() < 0.5 ? 1.0 : 0.0;
        y = MwUpdate(y, dir, 0.05);
      }
      double sum = 0.0;
      for (int i = 0; i < 8; ++i) sum += y.weight(i);
      if (std::abs(sum - 1.0) > kSimplexSumTolerance) ok = false;
    }
    results.push_back({"simplex-closure", ok, "500 mixed updates"});
  }
  {
    RandomSource rng = RandomSource(seed).Derive("laplace-tail");
    const int64_t draws = 100000;
    bool ok = true;
    for (double sline : {1.0, 2.0}) {
      int64_t exceed = 0;
      for (int64_t i = 0; i < draws; ++i)
        if (std::abs(rng.NextLaplace(1.5)) > sline * 1.5) ++exceed;
      const double frac = static_cast<double>(exceed) / static_cast<double>(draws);
      if (std::abs(frac - std::exp(-sline)) > 0.2 * std::exp(-sline)) ok = false;
    }
    results.push_back({"laplace-tail", ok, "two-sided tail vs exp(-s)"});
  }
  {
    const NoiseFunction xi(1.0, 0.5);
    std::map<int64_t, int64_t> hard{{100, 2}, {144, 1}};
    const double closed = NsgLedger(xi, 100, hard);
    const double manual = xi.XiDelta(100) + 1.125 * 2.0 * xi.XiDelta(100) +
                          1.125 * xi.XiDelta(144);
    const bool ok = std::abs(closed - manual) < 1e-12;
    results.push_back({"nsg-ledger-additivity", ok, "closed form vs per-event"});
  }
  return results;
}

}  // namespace growingdp
