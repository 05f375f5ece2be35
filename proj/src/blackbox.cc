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

#include "growingdp/blackbox.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace growingdp {

size_t ExponentialMechanism(const std::vector<double>& utilities,
                            double sensitivity, double eps, RandomSource rng) {
  if (utilities.empty())
    throw std::invalid_argument("exponential mechanism: no candidates");
  if (!(sensitivity > 0.0))
    throw std::invalid_argument("exponential mechanism: sensitivity must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("exponential mechanism: eps must be nonnegative");
  const double best = *std::max_element(utilities.begin(), utilities.end());
  std::vector<double> weights(utilities.size());
  double total = 0.0;
  for (size_t i = 0; i < utilities.size(); ++i) {
    weights[i] = std::exp(eps * (utilities[i] - best) / (2.0 * sensitivity));
    total += weights[i];
  }
  const double u = rng.NextUniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u <= acc) return i;
  }
  return weights.size() - 1;
}

namespace {

void CheckWorkload(const std::vector<LinearQuery>& workload) {
  if (workload.empty())
    throw std::invalid_argument("mechanism: empty query class");
  for (const LinearQuery& f : workload) {
    if (f.id.empty())
      throw std::invalid_argument("mechanism: workload queries need ids");
  }
}

}  // namespace

StaticMechanism LaplaceRelease(std::vector<LinearQuery> workload) {
  CheckWorkload(workload);
  const double k = static_cast<double>(workload.size());
  StaticMechanism mech;
  mech.name = "laplace";
  mech.contract = {1.0, k, 1.0, std::nullopt};
  mech.run = [workload = std::move(workload), k](
                 const Histogram& x, double eps, double /*alpha*/,
                 double /*beta*/, RandomSource rng) -> Answerer {
    if (!(eps > 0.0))
      throw std::invalid_argument("laplace release: eps must be positive");
    const double scale = k / (eps * static_cast<double>(x.size()));
    auto answers = std::make_shared<std::map<std::string, double>>();
    for (size_t i = 0; i < workload.size(); ++i) {
      (*answers)[workload[i].id] =
          Eval(workload[i], x) +
          rng.Derive("laplace-release", static_cast<uint64_t>(i))
              .NextLaplace(scale);
    }
    return [answers](const LinearQuery& f) {
      auto it = answers->find(f.id);
      if (it == answers->end())
        throw std::invalid_argument("laplace release: query outside class");
      return it->second;
    };
  };
  return mech;
}

std::vector<std::vector<int64_t>> EnumerateDatabases(int universe, int64_t size,
                                                     int64_t cap) {
  if (universe <= 0 || size <= 0)
    throw std::invalid_argument("enumerate: universe and size must be positive");
  double approx = 1.0;
  for (int i = 1; i < universe; ++i)
    approx *= static_cast<double>(size + i) / static_cast<double>(i);
  if (approx > static_cast<double>(cap))
    throw std::invalid_argument("enumerate: candidate set exceeds cap");
  std::vector<std::vector<int64_t>> out;
  std::vector<int64_t> counts(static_cast<size_t>(universe), 0);
  // Lexicographic recursion over compositions of `size` into `universe` parts.
  auto recurse = [&](auto&& self, int type, int64_t remaining) -> void {
    if (type == universe - 1) {
      counts[static_cast<size_t>(type)] = remaining;
      out.push_back(counts);
      return;
    }
    for (int64_t c = 0; c <= remaining; ++c) {
      counts[static_cast<size_t>(type)] = c;
      self(self, type + 1, remaining - c);
    }
  };
  recurse(recurse, 0, size);
  return out;
}

StaticMechanism SmallDb(std::vector<LinearQuery> workload) {
  CheckWorkload(workload);
  const double k = static_cast<double>(workload.size());
  StaticMechanism mech;
  mech.name = "smalldb";
  mech.contract = {1.0 / 3.0, std::cbrt(64.0 * std::max(1.0, std::log(k))),
                   1.0 / 3.0, 1.0 / 3.0};
  mech.run = [workload = std::move(workload), k](
                 const Histogram& x, double eps, double alpha, double /*beta*/,
                 RandomSource rng) -> Answerer {
    if (!(eps > 0.0))
      throw std::invalid_argument("smalldb: eps must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("smalldb: alpha must be in (0,1]");
    const int64_t m = std::max<int64_t>(
        1, static_cast<int64_t>(std::ceil(std::log(k) / (alpha * alpha))));
    const std::vector<std::vector<int64_t>> candidates =
        EnumerateDatabases(x.universe(), m);
    std::vector<double> utilities(candidates.size());
    std::vector<double> truth(workload.size());
    for (size_t q = 0; q < workload.size(); ++q)
      truth[q] = Eval(workload[q], x);
    for (size_t i = 0; i < candidates.size(); ++i) {
      const Histogram z = Histogram::FromCounts(candidates[i]);
      double worst = 0.0;
      for (size_t q = 0; q < workload.size(); ++q)
        worst = std::max(worst, std::abs(truth[q] - Eval(workload[q], z)));
      utilities[i] = -worst;
    }
    const size_t chosen = ExponentialMechanism(
        utilities, Sensitivity(x.size()), eps, rng.Derive("smalldb-pick"));
    auto z = std::make_shared<Histogram>(Histogram::FromCounts(candidates[chosen]));
    return [z](const LinearQuery& f) { return Eval(f, *z); };
  };
  return mech;
}

double EmpiricalLoss(const ErmProblem& problem, size_t grid_index,
                     const Histogram& x) {
  if (grid_index >= problem.grid.size())
    throw std::out_of_range("erm: grid index out of range");
  const std::vector<double>& theta = problem.grid[grid_index];
  double acc = 0.0;
  for (int i = 0; i < x.universe(); ++i) {
    const double w = x.weight(i);
    if (w == 0.0) continue;
    const double l = problem.loss(theta, i);
    if (!(l >= 0.0 && l <= 1.0))
      throw std::invalid_argument("erm: loss outside [0,1]");
    acc += w * l;
  }
  return acc;
}

size_t GridErm(const Histogram& x, const ErmProblem& problem, double eps,
               RandomSource rng) {
  if (problem.grid.empty()) throw std::invalid_argument("erm: empty grid");
  std::vector<double> utilities(problem.grid.size());
  for (size_t i = 0; i < problem.grid.size(); ++i)
    utilities[i] = -EmpiricalLoss(problem, i, x);
  return ExponentialMechanism(utilities, Sensitivity(x.size()), eps,
                              rng.Derive("grid-erm"));
}

}  // namespace growingdp
