/*
 * Copyright 2026 The airmk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AIRMK_ANALYSIS_H_
#define AIRMK_ANALYSIS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airmk/airtime.h"
#include "airmk/protocol.h"
#include "airmk/ring.h"
#include "airmk/zofl.h"

namespace airmk {

struct ChannelAggregates {
  std::size_t num_devices = 0;
  double s_omega = 0.0;   // sum Omega_i
  double s_omega2 = 0.0;  // sum Omega_i^2
  double s_mu4 = 0.0;     // sum mu_i^4

  // E[(sum h_i^2)^2] = S_Omega^2 + 2 S_Omega2 - 2 S_mu4.
  double SquaredPowerMoment() const {
    return s_omega * s_omega + 2.0 * s_omega2 - 2.0 * s_mu4;
  }
};

ChannelAggregates ComputeAggregates(const ChannelParams& cp);

// E[h^4] = 3 Omega^2 - 2 mu^4 for h ~ N(mu, sigma^2).
double FourthMoment(double mu, double sigma);
// E[(sum_i h_i^2)^2] for independent Gaussian gains.
double AggregateCheck(const ChannelParams& cp);

struct TermBreakdown {
  double a = 0.0, b1 = 0.0, b2 = 0.0, c1 = 0.0, c2 = 0.0, d = 0.0, e = 0.0;

  double Sum() const { return a + b1 + b2 + c1 + c2 + d + e; }
  std::array<std::pair<const char*, double>, 7> Named() const {
    return {{{"A", a}, {"B1", b1}, {"B2", b2}, {"C1", c1}, {"C2", c2}, {"D", d}, {"E", e}}};
  }
};

struct NoiseBudget {
  TermBreakdown terms;
  double b_eps_sq = 0.0;      // bound on E||eps_hat||^2, ring integer units
  double sigma_bar_sq = 0.0;  // per-coefficient decoded variance
  double fail_bound = 0.0;    // 4 B^2 / q^2
};

// The seven-term decomposition. Terms whose noise source is disabled in
// `sources` are zero, so a masked budget predicts a single-source run.
NoiseBudget ComputeNoiseBudget(const RingParams& params,
                               const ChannelAggregates& agg, double sigma_w,
                               const NoiseSources& sources = {});
NoiseBudget ComputeNoiseBudget(const RingParams& params, const ChannelParams& cp,
                               const NoiseSources& sources = {});

struct RateInputs {
  double L = 1.0;
  double b = 1.0;
  double delta_hat = 1.0;
  double eta0 = 0.05;
  double gamma0 = 0.05;
  double b1 = 1.0;
  double b2 = 1.0;
};

struct RateConstants {
  double L = 0.0, b = 0.0, b1 = 0.0, b2 = 0.0;
  double c1 = 0.0, c3 = 0.0;
  double c_gamma = 0.0, c_eps = 0.0;
  double delta_hat = 0.0;
  double R = 0.0, rho = 0.0;

  // R^2 / (eps beta - rho)^2. Throws DomainError when eps beta <= rho.
  double KOf(double eps, double beta) const;
};

RateConstants ComputeRateConstants(const RateInputs& in, const ChannelParams& cp,
                                   double sigma_bar_sq);

struct EmpiricalNoise {
  std::size_t rounds = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
  double budget_ratio = 0.0;  // variance / sigma_bar_sq
};

// Statistics of eps_decoded over rounds run with delta_f = 0. Throws
// InsufficientSamples below 100 rounds.
EmpiricalNoise ComputeEmpiricalNoise(std::span<const RoundOutput> trace,
                                     const NoiseBudget& budget);

// max ||x||^2 / 4 over every training example: a smoothness and Hessian
// bound for the mean logistic loss.
double LogisticSmoothness(const Dataset& data);

struct KExample {
  double eps = 0.0;
  double beta = 0.0;
  std::optional<double> k;  // empty when eps beta <= rho
};

struct BudgetReport {
  std::string profile;
  RingParamsPtr params;
  ChannelParams channel;
  ChannelAggregates aggregates;
  NoiseBudget budget;
  RateConstants rate;
  std::vector<KExample> k_examples;
  double bandwidth_hz = 1e12;
  UplinkCost uplink;
};

std::string BudgetReportJson(const BudgetReport& report,
                             const std::string& manifest_hash);

}  // namespace airmk

#endif  // AIRMK_ANALYSIS_H_
