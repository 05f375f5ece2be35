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
#include <optional>
#include <string>
#include <vector>

#include "growingdp/core.h"
#include "growingdp/noise.h"

namespace growingdp {

// Declared accuracy shape of a static mechanism: on a database of size t with
// budget eps and failure probability beta it promises error
//   alpha = g * (ln^{p_beta}(1/beta) * ln^{p_size}(size terms) / (eps t))^...
// Only the exponent p and the leading factor g enter the epoch scheduler; the
// optional exponents are used by the time-adaptive scheduler.
struct BlackBoxContract {
  double p = 0.0;
  double g = 0.0;
  std::optional<double> p_beta;
  std::optional<double> p_size;
};

using Answerer = std::function<double(const LinearQuery&)>;

// A static mechanism bundles a declared contract with a one-shot run over a
// fixed database snapshot; the returned answerer serves the mechanism's query
// class until the next run.
struct StaticMechanism {
  std::string name;
  BlackBoxContract contract;
  std::function<Answerer(const Histogram& x, double eps, double alpha,
                         double beta, RandomSource rng)>
      run;
};

// Samples an index with probability proportional to
// exp(eps * utilities[i] / (2 * sensitivity)).
size_t ExponentialMechanism(const std::vector<double>& utilities,
                            double sensitivity, double eps, RandomSource rng);

// Answers every query in `workload` as f(x) + Lap(k/(eps*t)), k = |workload|.
// Queries are matched by id; unknown ids are rejected.
StaticMechanism LaplaceRelease(std::vector<LinearQuery> workload);

// Synthetic-database release: picks a database z of
// m = max(1, ceil(ln k / alpha^2)) records by the exponential mechanism with
// utility -max_f |f(x) - f(z)| and answers every query from z. Enumeration is
// capped at 10^6 candidate databases.
StaticMechanism SmallDb(std::vector<LinearQuery> workload);

// Finite-candidate empirical risk minimization problem over a histogram
// universe. `loss(theta, type)` must lie in [0, 1].
struct ErmProblem {
  std::vector<std::vector<double>> grid;
  std::function<double(const std::vector<double>& theta, int type)> loss;
  int dimension = 1;
  std::optional<double> strong_convexity;
};

double EmpiricalLoss(const ErmProblem& problem, size_t grid_index,
                     const Histogram& x);

// Exponential mechanism over the candidate grid with utility -L(theta; x) and
// sensitivity 1/t; returns the chosen grid index.
size_t GridErm(const Histogram& x, const ErmProblem& problem, double eps,
               RandomSource rng);

// All databases of `size` records over a universe of `universe` types,
// as count vectors. Throws if there are more than `cap` of them.
std::vector<std::vector<int64_t>> EnumerateDatabases(int universe, int64_t size,
                                                     int64_t cap = 1000000);

}  // namespace growingdp
