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

#include "growingdp/accountant.h"

#include <cmath>
#include <stdexcept>

namespace growingdp {

void PrivacyLedger::Record(std::string label, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("ledger: epsilon must be nonnegative");
  events_.push_back({std::move(label), epsilon});
  sum_epsilon_ += epsilon;
  sum_epsilon_squared_ += epsilon * epsilon;
}

PrivacyBudget BasicCompose(const PrivacyLedger& ledger) {
  return {ledger.SumEpsilon(), 0.0};
}

PrivacyBudget CdpCompose(const PrivacyLedger& ledger, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("cdp_compose: delta must be in (0,1)");
  const double s = ledger.SumEpsilonSquared();
  return {0.5 * s + std::sqrt(2.0 * s * std::log(1.0 / delta)), delta};
}

double CdpSimplifiedBound(const PrivacyLedger& ledger, double delta) {
  if (!(delta > 0.0 && delta <= std::exp(-1.0)))
    throw std::invalid_argument("cdp bound: requires delta <= e^-1");
  const double s = ledger.SumEpsilonSquared();
  if (s > 1.0)
    throw std::invalid_argument("cdp bound: requires sum eps^2 <= 1");
  return 2.0 * std::sqrt(s * std::log(1.0 / delta));
}

double ZcdpOfPure(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("zcdp: eps must be nonnegative");
  return 0.5 * eps * eps;
}

double ZcdpCompose(const std::vector<double>& rhos) {
  double total = 0.0;
  for (double rho : rhos) {
    if (!(rho >= 0.0)) throw std::invalid_argument("zcdp: rho must be nonnegative");
    total += rho;
  }
  return total;
}

PrivacyBudget DpOfZcdp(double rho, double delta) {
  if (!(rho >= 0.0)) throw std::invalid_argument("zcdp: rho must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("zcdp: delta must be in (0,1)");
  return {rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta)), delta};
}

double AtgLoss(const NoiseFunction& xi, int64_t n0) { return xi.XiDelta(n0); }

double NatgLoss(const NoiseFunction& xi, int64_t t0, int64_t t_halt) {
  if (t_halt < t0)
    throw std::invalid_argument("natg loss: halt time before start");
  return xi.XiDelta(t0) + xi.XiDelta(t_halt) / 8.0;
}

double NsgLedger(const NoiseFunction& xi, int64_t n0,
                 const std::map<int64_t, int64_t>& hard_counts) {
  double eps = xi.XiDelta(n0);
  for (const auto& [t, h] : hard_counts) {
    if (t < n0) throw std::invalid_argument("nsg ledger: hard time before start");
    if (h < 0) throw std::invalid_argument("nsg ledger: negative count");
    eps += 1.125 * static_cast<double>(h) * xi.XiDelta(t);
  }
  return eps;
}

double PmwgBudgetIncrement(int64_t t, int universe) {
  if (t < 2) throw std::invalid_argument("budget increment: t must be >= 2");
  if (universe < 1) throw std::invalid_argument("budget increment: empty universe");
  const double td = static_cast<double>(t);
  return std::log(static_cast<double>(universe)) / td +
         std::log(td - 1.0) / td + std::log(td / (td - 1.0));
}

double PmwgEpsBound(const NoiseFunction& xi, double alpha, int universe,
                    int64_t n, int64_t horizon) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("pmwg bound: alpha must be in (0,1]");
  if (n < 1 || horizon < n)
    throw std::invalid_argument("pmwg bound: need 1 <= n <= horizon");
  const double factor = 81.0 / (2.0 * alpha * alpha);
  double eps =
      (1.0 + factor * std::log(static_cast<double>(universe))) * xi.XiDelta(n);
  for (int64_t t = n + 1; t <= horizon; ++t)
    eps += factor * PmwgBudgetIncrement(t, universe) * xi.XiDelta(t);
  return eps;
}

double PmwgEpsClosedBound(const NoiseFunction& xi, double alpha, int universe,
                          int64_t n) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("pmwg bound: alpha must be in (0,1]");
  if (n < 21)
    throw std::invalid_argument("pmwg closed bound: requires n >= 21");
  if (xi.exponent() != 0.5)
    throw std::invalid_argument("pmwg closed bound: requires xi_t = c sqrt(t)");
  const double nd = static_cast<double>(n);
  return 162.0 * xi.coefficient() *
         (std::log(static_cast<double>(universe)) + std::log(nd)) /
         (alpha * alpha * std::sqrt(nd));
}

}  // namespace growingdp
