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
#include <string>
#include <vector>

namespace growingdp {

// Tolerances shared by the whole library. A histogram is accepted when its
// weights sum to 1 within kSimplexSumTolerance and is renormalized whenever
// the accumulated drift exceeds kRenormalizeDrift.
inline constexpr double kSimplexSumTolerance = 1e-9;
inline constexpr double kRenormalizeDrift = 1e-12;
// Multiplicative-weights entries are floored at this value before
// renormalization so that relative entropies stay finite.
inline constexpr double kWeightFloor = 1e-300;

// Normalized histogram over a finite universe {0, ..., N-1} together with the
// integer number of records it represents. `exact` marks histograms whose
// weights are integer counts divided by `size`.
class Histogram {
 public:
  Histogram(std::vector<double> weights, int64_t size, bool exact = false);

  static Histogram FromCounts(const std::vector<int64_t>& counts);
  static Histogram Uniform(int universe, int64_t size);

  int universe() const { return static_cast<int>(weights_.size()); }
  int64_t size() const { return size_; }
  bool exact() const { return exact_; }
  double weight(int i) const { return weights_[static_cast<size_t>(i)]; }
  const std::vector<double>& weights() const { return weights_; }

  // Integer counts weight*size, rounded; only meaningful when exact().
  std::vector<int64_t> Counts() const;

  bool operator==(const Histogram& other) const = default;

 private:
  std::vector<double> weights_;
  int64_t size_;
  bool exact_;
};

// Linear query with per-type weights in [0, 1]. The answer on a histogram is
// the inner product of the weights.
struct LinearQuery {
  std::vector<double> weights;
  std::string id;
};

// One adaptively chosen query: j-th query asked while the database has size t.
struct QueryEvent {
  int64_t t = 0;
  int64_t j = 0;
  LinearQuery query;
};

// A growing database: `initial_counts` records of the starting database plus
// one arriving record per subsequent time step.
class DatabaseStream {
 public:
  DatabaseStream(int universe, std::vector<int64_t> initial_counts,
                 std::vector<int> arrivals);

  int universe() const { return universe_; }
  int64_t start_size() const { return start_size_; }
  int64_t final_time() const {
    return start_size_ + static_cast<int64_t>(arrivals_.size());
  }
  const std::vector<int64_t>& initial_counts() const { return initial_counts_; }
  const std::vector<int>& arrivals() const { return arrivals_; }

  std::vector<int64_t> CountsAt(int64_t t) const;
  Histogram HistogramAt(int64_t t) const;

 private:
  int universe_;
  int64_t start_size_;
  std::vector<int64_t> initial_counts_;
  std::vector<int> arrivals_;
};

double Eval(const LinearQuery& query, const Histogram& x);

// Histogram of x with one record of type `arrival` appended:
// x' = (t*x + e_arrival) / (t+1).
Histogram AddEntry(const Histogram& x, int arrival);

// Worst-case change of a linear query under a one-record substitution at
// size t.
double Sensitivity(int64_t t);

// KL divergence sum_i x_i ln(x_i / y_i), with 0 ln 0 = 0. Requires y_i > 0
// wherever x_i > 0.
double RelativeEntropy(const Histogram& x, const Histogram& y);

// True iff the two streams agree up to some time t-1 and from t onward differ
// by exactly one substituted record at every time.
bool Neighboring(const DatabaseStream& a, const DatabaseStream& b);

// JSONL stream files: first line {"n":..,"N":..,"initial":[..]}, then one
// {"arrival":type} object per step. Types are 0-based.
DatabaseStream LoadStream(const std::string& path);
void SaveStream(const DatabaseStream& stream, const std::string& path);

}  // namespace growingdp
