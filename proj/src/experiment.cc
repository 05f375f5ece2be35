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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "growingdp/accountant.h"
#include "growingdp/harness.h"
#include "growingdp/pmwg.h"
#include "growingdp/schedulers.h"
#include "json.hpp"

namespace growingdp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CheckKeys(const json& j, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + item.key() +
                                  "' in " + where);
  }
}

StreamSpec ParseStreamSpec(const json& j) {
  CheckKeys(j, {"kind", "weights", "weights2", "shift_time", "path"}, "stream");
  StreamSpec spec;
  spec.kind = j.value("kind", spec.kind);
  if (j.contains("weights"))
    spec.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("weights2"))
    spec.weights2 = j.at("weights2").get<std::vector<double>>();
  spec.shift_time = j.value("shift_time", spec.shift_time);
  spec.path = j.value("path", spec.path);
  return spec;
}

WorkloadSpec ParseWorkloadSpec(const json& j) {
  CheckKeys(j, {"kind", "per_step", "total", "queries", "class_size"},
            "workload");
  WorkloadSpec spec;
  spec.kind = j.value("kind", spec.kind);
  spec.per_step = j.value("per_step", spec.per_step);
  spec.total = j.value("total", spec.total);
  spec.class_size = j.value("class_size", spec.class_size);
  if (j.contains("queries")) {
    int64_t index = 0;
    for (const auto& q : j.at("queries")) {
      CheckKeys(q, {"id", "weights"}, "workload.queries");
      LinearQuery lq;
      lq.id = q.value("id", "q" + std::to_string(index));
      lq.weights = q.at("weights").get<std::vector<double>>();
      spec.queries.push_back(std::move(lq));
      ++index;
    }
  }
  return spec;
}

SparseSpec ParseSparseSpec(const json& j) {
  CheckKeys(j, {"mode", "threshold", "xi_c", "xi_p", "values"}, "sparse");
  SparseSpec spec;
  spec.mode = j.value("mode", spec.mode);
  spec.threshold = j.value("threshold", spec.threshold);
  if (j.contains("xi_c")) spec.xi_c = j.at("xi_c").get<double>();
  if (j.contains("xi_p")) spec.xi_p = j.at("xi_p").get<double>();
  if (j.contains("values")) {
    for (const auto& row : j.at("values")) {
      if (!row.is_array() || row.size() != 2)
        throw std::invalid_argument("config: sparse.values rows are [t, value]");
      spec.values.emplace_back(row.at(0).get<int64_t>(),
                               row.at(1).get<double>());
    }
  }
  return spec;
}

BlackBoxContract ParseContract(const json& j) {
  CheckKeys(j, {"p", "g", "p_beta", "p_size"}, "contract");
  BlackBoxContract contract;
  contract.p = j.at("p").get<double>();
  contract.g = j.at("g").get<double>();
  if (j.contains("p_beta")) contract.p_beta = j.at("p_beta").get<double>();
  if (j.contains("p_size")) contract.p_size = j.at("p_size").get<double>();
  return contract;
}

SparseMode ParseSparseMode(const std::string& mode) {
  if (mode == "atg") return SparseMode::kAboveThreshold;
  if (mode == "natg") return SparseMode::kNumericAboveThreshold;
  if (mode == "nsg") return SparseMode::kNumericSparse;
  throw std::invalid_argument("config: unknown sparse mode " + mode);
}

// Per-trial results, concatenated in trial order so the CSV is independent of
// the thread count.
struct TrialStats {
  std::string csv;
  int64_t queries = 0;
  double max_abs_error = 0.0;
  bool failed = false;
  int64_t hard_total = 0;
  double eps_ledger = 0.0;
  int64_t budget_violations = 0;
  bool exhausted = false;
};

NoiseFunction SparseXi(const ExperimentConfig& config) {
  if (config.sparse.xi_c)
    return NoiseFunction(*config.sparse.xi_c, config.sparse.xi_p.value_or(0.5));
  return PmwgNoiseFunction(config.alpha, config.n, config.universe, config.eps,
                           config.delta, config.noise_exponent);
}

TrialStats RunOnePmwg(const ExperimentConfig& config, int64_t trial,
                      RandomSource trial_rng) {
  const DatabaseStream stream =
      GenerateStream(config.stream, config.n, config.universe, config.horizon,
                     trial_rng.Derive("stream-gen"));
  const PmwgTrialResult res = RunPmwgTrial(config, stream, trial_rng);
  TrialStats stats;
  std::ostringstream out;
  for (const PmwgQueryRecord& r : res.records) {
    const double abs_error =
        r.exhausted ? std::numeric_limits<double>::quiet_NaN()
                    : std::abs(r.released - r.truth);
    out << trial << ',' << r.t << ',' << r.j << ',' << r.query.id << ','
        << FormatDouble(r.truth) << ',' << FormatDouble(r.released) << ','
        << FormatDouble(abs_error) << ',' << (r.hard ? 1 : 0) << ','
        << r.hard_cum << ',' << FormatDouble(r.budget_cap) << ','
        << FormatDouble(r.eps_ledger) << '\n';
    ++stats.queries;
    if (!r.exhausted) {
      stats.max_abs_error = std::max(stats.max_abs_error, abs_error);
      if (abs_error > config.alpha) stats.failed = true;
    }
  }
  stats.csv = out.str();
  stats.hard_total = res.hard_total;
  stats.eps_ledger = res.eps_report;
  stats.budget_violations = res.budget_violations;
  stats.exhausted = res.exhausted;
  if (res.exhausted) stats.failed = true;
  return stats;
}

TrialStats RunOneSparse(const ExperimentConfig& config, int64_t trial,
                        RandomSource trial_rng) {
  const NoiseFunction xi = SparseXi(config);
  const SparseMode mode = ParseSparseMode(config.sparse.mode);
  SparseVector sv(mode, SparseConfig{config.sparse.threshold, xi}, config.n,
                  trial_rng.Derive("sparse"));
  std::vector<std::pair<int64_t, double>> values = config.sparse.values;
  if (values.empty()) {
    const DatabaseStream stream =
        GenerateStream(config.stream, config.n, config.universe, config.horizon,
                       trial_rng.Derive("stream-gen"));
    const RandomSource workload_rng = trial_rng.Derive("workload");
    const std::map<int64_t, int64_t> counts =
        WorkloadCounts(config.workload, config.n, config.horizon);
    int64_t global = 0;
    for (const auto& [t, count] : counts) {
      const Histogram x_t = stream.HistogramAt(t);
      for (int64_t j = 1; j <= count; ++j) {
        const LinearQuery query =
            MakeWorkloadQuery(config.workload, config.universe, t, j, global,
                              &x_t, nullptr, workload_rng);
        ++global;
        values.emplace_back(t, Eval(query, x_t));
      }
    }
  }
  TrialStats stats;
  std::ostringstream out;
  std::map<int64_t, int64_t> per_t;
  for (const auto& [t, value] : values) {
    const int64_t j = ++per_t[t];
    const SparseAnswer ans = sv.Step(t, value);
    const char* kind = ans.kind == SparseAnswer::Kind::kBelow    ? "below"
                       : ans.kind == SparseAnswer::Kind::kAbove ? "above"
                                                                : "numeric";
    int64_t hard_cum = 0;
    for (const auto& [ht, hc] : sv.hard_counts()) hard_cum += hc;
    out << trial << ',' << t << ',' << j << ',' << kind << ','
        << FormatDouble(ans.value) << ',' << hard_cum << ','
        << FormatDouble(sv.PrivacyReport()) << '\n';
    ++stats.queries;
    if (config.alpha > 0.0) {
      const double T = config.sparse.threshold;
      if (ans.kind == SparseAnswer::Kind::kBelow && value > T + config.alpha)
        stats.failed = true;
      if (ans.kind != SparseAnswer::Kind::kBelow && value < T - config.alpha)
        stats.failed = true;
      if (ans.kind == SparseAnswer::Kind::kNumeric) {
        const double err = std::abs(ans.value - value);
        stats.max_abs_error = std::max(stats.max_abs_error, err);
        if (err > config.alpha) stats.failed = true;
      }
    } else if (ans.kind == SparseAnswer::Kind::kNumeric) {
      stats.max_abs_error =
          std::max(stats.max_abs_error, std::abs(ans.value - value));
    }
    if (sv.halted()) break;
  }
  stats.csv = out.str();
  for (const auto& [t, hc] : sv.hard_counts()) stats.hard_total += hc;
  stats.eps_ledger = sv.PrivacyReport();
  return stats;
}

std::vector<LinearQuery> RandomQueryClass(int64_t k, int universe,
                                          RandomSource src, int64_t tag) {
  std::vector<LinearQuery> queries;
  queries.reserve(static_cast<size_t>(k));
  for (int64_t i = 0; i < k; ++i) {
    LinearQuery q;
    q.weights.resize(static_cast<size_t>(universe));
    for (double& w : q.weights) w = src.NextUniform() < 0.5 ? 1.0 : 0.0;
    q.id = "q" + std::to_string(tag) + "_" + std::to_string(i);
    queries.push_back(std::move(q));
  }
  return queries;
}

StaticMechanism MakeMechanism(const std::string& name,
                              std::vector<LinearQuery> workload) {
  if (name == "laplace") return LaplaceRelease(std::move(workload));
  if (name == "smalldb") return SmallDb(std::move(workload));
  throw std::invalid_argument("config: unknown mechanism " + name);
}

std::vector<LinearQuery> SchedulerClass(const ExperimentConfig& config,
                                        const RandomSource& trial_rng,
                                        int64_t epoch) {
  if (config.workload.kind == "fixed-list") {
    if (config.workload.queries.empty())
      throw std::invalid_argument("config: fixed-list workload needs queries");
    return config.workload.queries;
  }
  if (config.workload.kind == "random-class") {
    if (config.workload.class_size < 1)
      throw std::invalid_argument("config: random-class needs class_size >= 1");
    return RandomQueryClass(config.workload.class_size, config.universe,
                            trial_rng.Derive("class", static_cast<uint64_t>(epoch)),
                            epoch);
  }
  throw std::invalid_argument(
      "config: scheduler workloads are fixed-list or random-class");
}

std::string SchedulerCsv(int64_t trial, const std::vector<AnswerRow>& rows) {
  std::ostringstream out;
  for (const AnswerRow& r : rows) {
    out << trial << ',' << r.t << ',' << r.j << ',' << r.query_id << ','
        << FormatDouble(r.truth) << ',' << FormatDouble(r.released) << ','
        << FormatDouble(r.abs_error) << ',' << r.epoch << ','
        << FormatDouble(r.eps_spent_cum) << ','
        << FormatDouble(r.alpha_promised) << '\n';
  }
  return out.str();
}

TrialStats StatsFromRunLog(int64_t trial, const RunLog& log) {
  TrialStats stats;
  stats.csv = SchedulerCsv(trial, log.rows);
  stats.queries = static_cast<int64_t>(log.rows.size());
  for (const AnswerRow& r : log.rows) {
    stats.max_abs_error = std::max(stats.max_abs_error, r.abs_error);
    if (r.abs_error > r.alpha_promised) stats.failed = true;
  }
  stats.eps_ledger = log.ledger.SumEpsilon();
  return stats;
}

TrialStats RunOneScheduler(const ExperimentConfig& config, int64_t trial,
                           RandomSource trial_rng) {
  const DatabaseStream stream =
      GenerateStream(config.stream, config.n, config.universe, config.horizon,
                     trial_rng.Derive("stream-gen"));
  const std::vector<LinearQuery> class0 = SchedulerClass(config, trial_rng, 0);
  const StaticMechanism mech0 = MakeMechanism(config.mechanism, class0);
  const BlackBoxContract contract =
      config.contract_override.value_or(mech0.contract);
  const EpochSchedule schedule =
      ScheduleFixed(config.eps, config.delta, config.beta, config.n, contract);

  std::map<int64_t, int64_t> first_at_start;  // epoch start -> first index
  for (int64_t i = 0;; ++i) {
    if (i > 1000000)
      throw std::invalid_argument("scheduler: epoch enumeration runaway");
    const int64_t s = schedule.EpochStart(i);
    if (s > config.horizon) break;
    first_at_start.emplace(s, i);
  }
  if (first_at_start.empty())
    throw std::invalid_argument("scheduler: no epochs within horizon");

  std::map<int64_t, std::vector<LinearQuery>> classes;
  std::map<int64_t, StaticMechanism> mechanisms;
  for (const auto& [s, i] : first_at_start) {
    std::vector<LinearQuery> cls =
        i == 0 ? class0 : SchedulerClass(config, trial_rng, i);
    mechanisms.emplace(i, i == 0 ? mech0 : MakeMechanism(config.mechanism, cls));
    classes.emplace(i, std::move(cls));
  }

  const std::map<int64_t, int64_t> counts =
      WorkloadCounts(config.workload, config.n, config.horizon);
  std::vector<QueryEvent> events;
  int64_t cycle = 0;
  for (const auto& [t, count] : counts) {
    auto it = first_at_start.upper_bound(t);
    if (it == first_at_start.begin()) continue;  // before the first epoch
    const std::vector<LinearQuery>& cls = classes.at(std::prev(it)->second);
    for (int64_t j = 1; j <= count; ++j) {
      events.push_back({t, j, cls[static_cast<size_t>(cycle) % cls.size()]});
      ++cycle;
    }
  }

  const RunLog log = RunFixed(
      schedule,
      [&mechanisms](int64_t epoch) -> const StaticMechanism& {
        return mechanisms.at(epoch);
      },
      stream, events, config.horizon, trial_rng);
  return StatsFromRunLog(trial, log);
}

TrialStats RunOneImprover(const ExperimentConfig& config, int64_t trial,
                          RandomSource trial_rng) {
  const DatabaseStream stream =
      GenerateStream(config.stream, config.n, config.universe, config.horizon,
                     trial_rng.Derive("stream-gen"));
  const std::vector<LinearQuery> cls = SchedulerClass(config, trial_rng, 0);
  const StaticMechanism mech = MakeMechanism(config.mechanism, cls);
  const BlackBoxContract contract =
      config.contract_override.value_or(mech.contract);
  const ImproverSchedule schedule =
      ScheduleImprover(config.eps, config.delta, config.beta, config.n,
                       config.improver_c, contract);
  const std::map<int64_t, int64_t> counts =
      WorkloadCounts(config.workload, config.n, config.horizon);
  std::vector<QueryEvent> events;
  int64_t cycle = 0;
  for (const auto& [t, count] : counts) {
    for (int64_t j = 1; j <= count; ++j) {
      events.push_back({t, j, cls[static_cast<size_t>(cycle) % cls.size()]});
      ++cycle;
    }
  }
  const RunLog log =
      RunImprover(schedule, mech, stream, events, config.horizon, trial_rng);
  return StatsFromRunLog(trial, log);
}

ErmProblem MakeGridProblem(const ExperimentConfig& config) {
  if (config.erm.grid_points < 2)
    throw std::invalid_argument("config: erm.grid_points must be >= 2");
  ErmProblem problem;
  problem.dimension = 1;
  const int points = config.erm.grid_points;
  problem.grid.reserve(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i)
    problem.grid.push_back(
        {static_cast<double>(i) / static_cast<double>(points - 1)});
  const int universe = config.universe;
  problem.loss = [universe](const std::vector<double>& theta, int type) {
    const double target =
        universe <= 1 ? 0.5
                      : static_cast<double>(type) /
                            static_cast<double>(universe - 1);
    const double d = theta[0] - target;
    return std::min(1.0, d * d);
  };
  return problem;
}

TrialStats RunOneErmg(const ExperimentConfig& config, int64_t trial,
                      RandomSource trial_rng) {
  const DatabaseStream stream =
      GenerateStream(config.stream, config.n, config.universe, config.horizon,
                     trial_rng.Derive("stream-gen"));
  const ErmProblem problem = MakeGridProblem(config);
  PrivacyLedger ledger;
  const std::vector<ErmgRow> rows =
      RunErmg(problem, stream, config.eps, config.delta, config.beta, config.n,
              config.improver_c, config.horizon, trial_rng, &ledger);
  TrialStats stats;
  std::ostringstream out;
  for (const ErmgRow& r : rows) {
    out << trial << ',' << r.t << ',' << FormatDouble(r.loss) << ','
        << FormatDouble(r.best_loss) << ',' << FormatDouble(r.excess) << ','
        << FormatDouble(r.eps_spent_cum) << '\n';
    ++stats.queries;
    stats.max_abs_error = std::max(stats.max_abs_error, r.excess);
  }
  stats.csv = out.str();
  stats.eps_ledger = ledger.SumEpsilon();
  if (config.alpha > 0.0 && !rows.empty() &&
      rows.back().excess > config.alpha)
    stats.failed = true;
  return stats;
}

std::vector<TrialStats> RunTrials(
    const ExperimentConfig& config,
    const std::function<TrialStats(int64_t, RandomSource)>& runner) {
  const RandomSource master = config.noiseless
                                  ? RandomSource::Noiseless(config.seed)
                                  : RandomSource(config.seed);
  std::vector<TrialStats> results(static_cast<size_t>(config.trials));
  auto run_one = [&](int64_t trial) {
    results[static_cast<size_t>(trial)] =
        runner(trial, master.Derive("trial", static_cast<uint64_t>(trial)));
  };
  const int threads = std::max(1, config.threads);
  if (threads == 1 || config.trials <= 1) {
    for (int64_t trial = 0; trial < config.trials; ++trial) run_one(trial);
    return results;
  }
  std::atomic<int64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&]() {
    for (;;) {
      const int64_t trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      try {
        run_one(trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int64_t spawn =
      std::min<int64_t>(threads, std::max<int64_t>(1, config.trials));
  for (int64_t i = 0; i < spawn; ++i) pool.emplace_back(work);
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

const char* CsvHeader(const std::string& algorithm) {
  if (algorithm == "pmwg")
    return "trial,t,j,query_id,true_answer,released,abs_error,hard_flag,"
           "hard_cum,budget_cap,eps_ledger";
  if (algorithm == "sparse")
    return "trial,t,j,answer_kind,answer,hard_cum,eps_report";
  if (algorithm == "scheduler" || algorithm == "improver")
    return "trial,t,j,query_id,true_answer,released,abs_error,epoch,"
           "eps_spent_cum,alpha_promised";
  if (algorithm == "ermg")
    return "trial,t,loss,best_loss,excess,eps_spent_cum";
  throw std::invalid_argument("config: unknown algorithm " + algorithm);
}

void ValidateConfig(const ExperimentConfig& config) {
  if (config.trials < 0)
    throw std::invalid_argument("config: trials must be >= 0");
  if (config.n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (config.universe < 1)
    throw std::invalid_argument("config: N must be >= 1");
  if (config.horizon < config.n)
    throw std::invalid_argument("config: horizon must be >= n");
  if (config.kappa < 1.0)
    throw std::invalid_argument("config: kappa must be >= 1");
  const std::string& a = config.algorithm;
  if (a == "pmwg") {
    if (!(config.alpha > 0.0 && config.alpha <= 1.0))
      throw std::invalid_argument("config: pmwg needs alpha in (0, 1]");
    if (!(config.eps > 0.0))
      throw std::invalid_argument("config: pmwg needs eps > 0");
  } else if (a == "sparse") {
    if (!config.sparse.xi_c && !(config.eps > 0.0 && config.alpha > 0.0))
      throw std::invalid_argument(
          "config: sparse needs xi_c or (alpha, eps) for calibration");
  } else if (a == "scheduler" || a == "improver" || a == "ermg") {
    if (!(config.eps > 0.0 && config.eps <= 1.0))
      throw std::invalid_argument("config: schedulers need eps in (0, 1]");
    if (!(config.beta > 0.0 && config.beta < 1.0))
      throw std::invalid_argument("config: schedulers need beta in (0, 1)");
    if ((a == "improver" || a == "ermg") && !(config.delta > 0.0))
      throw std::invalid_argument("config: " + a + " needs delta > 0");
  } else {
    throw std::invalid_argument("config: unknown algorithm " + a);
  }
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") +
                                e.what());
  }
  try {
    CheckKeys(j,
              {"algorithm", "alpha", "eps", "delta", "beta", "n", "N", "p",
               "seed", "trials", "horizon", "noiseless", "kappa", "threads",
               "out", "stream", "workload", "sparse", "erm", "mechanism",
               "contract", "c"},
              "top level");
    ExperimentConfig config;
    config.algorithm = j.at("algorithm").get<std::string>();
    config.alpha = j.value("alpha", config.alpha);
    config.eps = j.value("eps", config.eps);
    config.delta = j.value("delta", config.delta);
    config.beta = j.value("beta", config.beta);
    config.n = j.value("n", config.n);
    config.universe = j.value("N", config.universe);
    if (j.contains("p")) config.noise_exponent = j.at("p").get<double>();
    config.seed = j.value("seed", config.seed);
    config.trials = j.value("trials", config.trials);
    config.horizon = j.value("horizon", config.horizon);
    config.noiseless = j.value("noiseless", config.noiseless);
    config.kappa = j.value("kappa", config.kappa);
    config.threads = j.value("threads", config.threads);
    config.out = j.value("out", config.out);
    config.mechanism = j.value("mechanism", config.mechanism);
    config.improver_c = j.value("c", config.improver_c);
    if (j.contains("stream")) config.stream = ParseStreamSpec(j.at("stream"));
    if (j.contains("workload"))
      config.workload = ParseWorkloadSpec(j.at("workload"));
    if (j.contains("sparse")) config.sparse = ParseSparseSpec(j.at("sparse"));
    if (j.contains("erm")) {
      CheckKeys(j.at("erm"), {"grid_points"}, "erm");
      config.erm.grid_points =
          j.at("erm").value("grid_points", config.erm.grid_points);
    }
    if (j.contains("contract"))
      config.contract_override = ParseContract(j.at("contract"));
    return config;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field: ") + e.what());
  }
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str());
}

ExperimentSummary RunExperiment(const ExperimentConfig& config) {
  ValidateConfig(config);
  std::function<TrialStats(int64_t, RandomSource)> runner;
  if (config.algorithm == "pmwg") {
    runner = [&config](int64_t trial, RandomSource rng) {
      return RunOnePmwg(config, trial, std::move(rng));
    };
  } else if (config.algorithm == "sparse") {
    runner = [&config](int64_t trial, RandomSource rng) {
      return RunOneSparse(config, trial, std::move(rng));
    };
  } else if (config.algorithm == "scheduler") {
    runner = [&config](int64_t trial, RandomSource rng) {
      return RunOneScheduler(config, trial, std::move(rng));
    };
  } else if (config.algorithm == "improver") {
    runner = [&config](int64_t trial, RandomSource rng) {
      return RunOneImprover(config, trial, std::move(rng));
    };
  } else {
    runner = [&config](int64_t trial, RandomSource rng) {
      return RunOneErmg(config, trial, std::move(rng));
    };
  }
  const std::vector<TrialStats> results = RunTrials(config, runner);

  ExperimentSummary summary;
  summary.algorithm = config.algorithm;
  summary.trials = config.trials;
  int64_t failed = 0;
  for (const TrialStats& r : results) {
    summary.queries += r.queries;
    if (std::isfinite(r.max_abs_error))
      summary.max_abs_error = std::max(summary.max_abs_error, r.max_abs_error);
    if (r.failed) ++failed;
    summary.hard_total += r.hard_total;
    summary.eps_ledger_max = std::max(summary.eps_ledger_max, r.eps_ledger);
    summary.budget_violations += r.budget_violations;
    if (r.exhausted) ++summary.exhausted_trials;
  }
  summary.failure_fraction_at_alpha =
      config.trials > 0
          ? static_cast<double>(failed) / static_cast<double>(config.trials)
          : 0.0;

  if (!config.out.empty()) {
    std::ofstream csv(config.out + ".csv", std::ios::binary);
    if (!csv)
      throw std::runtime_error("cannot write " + config.out + ".csv");
    csv << CsvHeader(config.algorithm) << '\n';
    for (const TrialStats& r : results) csv << r.csv;
    csv.close();
    std::ofstream js(config.out + "_summary.json", std::ios::binary);
    if (!js)
      throw std::runtime_error("cannot write " + config.out + "_summary.json");
    js << SummaryToJson(summary);
  }
  return summary;
}

std::string SummaryToJson(const ExperimentSummary& summary) {
  ordered_json j;
  j["algorithm"] = summary.algorithm;
  j["trials"] = summary.trials;
  j["queries"] = summary.queries;
  j["max_abs_error"] = summary.max_abs_error;
  j["failure_fraction_at_alpha"] = summary.failure_fraction_at_alpha;
  j["hard_total"] = summary.hard_total;
  j["eps_ledger_max"] = summary.eps_ledger_max;
  j["budget_violations"] = summary.budget_violations;
  j["exhausted_trials"] = summary.exhausted_trials;
  return j.dump(2) + "\n";
}

}  // namespace growingdp
