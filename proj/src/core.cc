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

#include "growingdp/core.h"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace growingdp {

namespace {

double WeightSum(const std::vector<double>& w) {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

}  // namespace

Histogram::Histogram(std::vector<double> weights, int64_t size, bool exact)
    : weights_(std::move(weights)), size_(size), exact_(exact) {
  if (weights_.empty()) throw std::invalid_argument("histogram: empty universe");
  if (size_ < 0) throw std::invalid_argument("histogram: negative size");
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("histogram: weight out of range");
  }
  const double sum = WeightSum(weights_);
  if (std::abs(sum - 1.0) > kSimplexSumTolerance)
    throw std::invalid_argument("histogram: weights do not sum to 1");
  if (std::abs(sum - 1.0) > kRenormalizeDrift) {
    for (double& w : weights_) w /= sum;
  }
  if (exact_) {
    for (double w : weights_) {
      const double scaled = w * static_cast<double>(size_);
      if (std::abs(scaled - std::round(scaled)) > kSimplexSumTolerance)
        throw std::invalid_argument("histogram: weights not integer counts");
    }
  }
}

Histogram Histogram::FromCounts(const std::vector<int64_t>& counts) {
  int64_t total = 0;
  for (int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("histogram: negative count");
    total += c;
  }
  if (total <= 0) throw std::invalid_argument("histogram: empty database");
  std::vector<double> weights(counts.size());
  for (size_t i = 0; i < counts.size(); ++i)
    weights[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return Histogram(std::move(weights), total, /*exact=*/true);
}

Histogram Histogram::Uniform(int universe, int64_t size) {
  if (universe <= 0) throw std::invalid_argument("histogram: empty universe");
  std::vector<double> weights(static_cast<size_t>(universe),
                              1.0 / static_cast<double>(universe));
  return Histogram(std::move(weights), size, /*exact=*/false);
}

std::vector<int64_t> Histogram::Counts() const {
  std::vector<int64_t> counts(weights_.size());
  for (size_t i = 0; i < weights_.size(); ++i)
    counts[i] = static_cast<int64_t>(
        std::llround(weights_[i] * static_cast<double>(size_)));
  return counts;
}

DatabaseStream::DatabaseStream(int universe, std::vector<int64_t> initial_counts,
                               std::vector<int> arrivals)
    : universe_(universe),
      initial_counts_(std::move(initial_counts)),
      arrivals_(std::move(arrivals)) {
  if (universe_ <= 0) throw std::invalid_argument("stream: empty universe");
  if (static_cast<int>(initial_counts_.size()) != universe_)
    throw std::invalid_argument("stream: initial counts size mismatch");
  start_size_ = 0;
  for (int64_t c : initial_counts_) {
    if (c < 0) throw std::invalid_argument("stream: negative count");
    start_size_ += c;
  }
  if (start_size_ <= 0) throw std::invalid_argument("stream: empty start database");
  for (int a : arrivals_) {
    if (a < 0 || a >= universe_)
      throw std::invalid_argument("stream: arrival type out of range");
  }
}

std::vector<int64_t> DatabaseStream::CountsAt(int64_t t) const {
  if (t < start_size_ || t > final_time())
    throw std::out_of_range("stream: time outside [n, final]");
  std::vector<int64_t> counts = initial_counts_;
  for (int64_t s = 0; s < t - start_size_; ++s)
    ++counts[static_cast<size_t>(arrivals_[static_cast<size_t>(s)])];
  return counts;
}

Histogram DatabaseStream::HistogramAt(int64_t t) const {
  return Histogram::FromCounts(CountsAt(t));
}

double Eval(const LinearQuery& query, const Histogram& x) {
  if (static_cast<int>(query.weights.size()) != x.universe())
    throw std::invalid_argument("eval: query dimension mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < query.weights.size(); ++i) {
    const double q = query.weights[i];
    if (!(q >= 0.0 && q <= 1.0))
      throw std::invalid_argument("eval: query weight outside [0,1]");
    acc += q * x.weights()[i];
  }
  return acc;
}

Histogram AddEntry(const Histogram& x, int arrival) {
  if (arrival < 0 || arrival >= x.universe())
    throw std::invalid_argument("add_entry: type out of range");
  const double t = static_cast<double>(x.size());
  std::vector<double> weights(x.weights());
  for (double& w : weights) w *= t / (t + 1.0);
  weights[static_cast<size_t>(arrival)] += 1.0 / (t + 1.0);
  return Histogram(std::move(weights), x.size() + 1, x.exact());
}

double Sensitivity(int64_t t) {
  if (t <= 0) throw std::invalid_argument("sensitivity: t must be positive");
  return 1.0 / static_cast<double>(t);
}

double RelativeEntropy(const Histogram& x, const Histogram& y) {
  if (x.universe() != y.universe())
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < x.universe(); ++i) {
    const double xi = x.weight(i);
    if (xi <= 0.0) continue;
    const double yi = y.weight(i);
    if (yi <= 0.0)
      throw std::invalid_argument("relative_entropy: support violation");
    acc += xi * std::log(xi / yi);
  }
  return acc < 0.0 ? 0.0 : acc;
}

bool Neighboring(const DatabaseStream& a, const DatabaseStream& b) {
  if (a.universe() != b.universe() || a.start_size() != b.start_size())
    throw std::invalid_argument("neighboring: streams must share n and N");
  if (a.final_time() != b.final_time()) return false;
  bool diverged = false;
  for (int64_t t = a.start_size(); t <= a.final_time(); ++t) {
    const std::vector<int64_t> ca = a.CountsAt(t);
    const std::vector<int64_t> cb = b.CountsAt(t);
    int64_t l1 = 0;
    for (size_t i = 0; i < ca.size(); ++i) l1 += std::llabs(ca[i] - cb[i]);
    if (!diverged) {
      if (l1 == 0) continue;
      if (l1 != 2) return false;
      diverged = true;
    } else if (l1 != 2) {
      return false;
    }
  }
  return diverged;
}

}  // namespace growingdp
