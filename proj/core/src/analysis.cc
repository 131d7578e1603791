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

#include "airmk/analysis.h"

#include <cmath>
#include <json.hpp>

#include "airmk/errors.h"

namespace airmk {

ChannelAggregates ComputeAggregates(const ChannelParams& cp) {
  ValidateChannel(cp);
  ChannelAggregates agg;
  agg.num_devices = cp.num_devices();
  for (std::size_t i = 0; i < cp.num_devices(); ++i) {
    const double om = cp.omega(i);
    agg.s_omega += om;
    agg.s_omega2 += om * om;
    agg.s_mu4 += std::pow(cp.mu[i], 4);
  }
  return agg;
}

double FourthMoment(double mu, double sigma) {
  if (sigma < 0.0) throw InvalidParameter("fourth moment: sigma < 0");
  const double om = mu * mu + sigma * sigma;
  return 3.0 * om * om - 2.0 * std::pow(mu, 4);
}

double AggregateCheck(const ChannelParams& cp) {
  return ComputeAggregates(cp).SquaredPowerMoment();
}

NoiseBudget ComputeNoiseBudget(const RingParams& params,
                               const ChannelAggregates& agg, double sigma_w,
                               const NoiseSources& src) {
  const double n = static_cast<double>(params.n);
  const double se2 = params.sigma_e * params.sigma_e;
  const double sp2 = params.sigma_phi * params.sigma_phi;
  const double sw2 = sigma_w * sigma_w;
  const double bracket = agg.SquaredPowerMoment();
  NoiseBudget nb;
  TermBreakdown& t = nb.terms;
  t.a = (2.0 / 3.0) * n * n *
        ((src.key_error ? se2 * bracket : 0.0) + (src.w_key ? sw2 * agg.s_omega : 0.0));
  t.b1 = src.enc_e0 ? n * se2 * agg.s_omega : 0.0;
  t.b2 = src.w_c0 ? n * sw2 : 0.0;
  t.c1 = src.enc_e1 ? n * n * se2 * bracket : 0.0;
  t.c2 = src.w_c1 ? n * n * sw2 * agg.s_omega : 0.0;
  t.d = src.w_share ? n * sw2 : 0.0;
  t.e = src.smudge ? n * sp2 * agg.s_omega : 0.0;
  nb.b_eps_sq = t.Sum();
  const double lambda = std::ldexp(1.0, static_cast<int>(params.log2_lambda));
  nb.sigma_bar_sq = nb.b_eps_sq / (n * lambda * lambda);
  const double q = mpz_get_d(params.q.get_mpz_t());
  nb.fail_bound = 4.0 * nb.b_eps_sq / (q * q);
  return nb;
}

NoiseBudget ComputeNoiseBudget(const RingParams& params, const ChannelParams& cp,
                               const NoiseSources& sources) {
  return ComputeNoiseBudget(params, ComputeAggregates(cp), cp.sigma_w, sources);
}

double RateConstants::KOf(double eps, double beta) const {
  const double gap = eps * beta - rho;
  if (!(gap > 0.0)) throw DomainError("K(eps, beta) needs eps*beta > rho");
  return R * R / (gap * gap);
}

RateConstants ComputeRateConstants(const RateInputs& in, const ChannelParams& cp,
                                   double sigma_bar_sq) {
  ValidateChannel(cp);
  if (!(in.b1 > 0.0) || !(in.b2 > 0.0) || !(in.eta0 > 0.0) || !(in.gamma0 > 0.0)) {
    throw InvalidParameter("rate constants: b1, b2, eta0, gamma0 must be positive");
  }
  const double N = static_cast<double>(cp.num_devices());
  double ratio = 0.0;
  for (std::size_t i = 0; i < cp.num_devices(); ++i) ratio += cp.omega(i) / (cp.mu[i] * cp.mu[i]);
  RateConstants rc;
  rc.L = in.L;
  rc.b = in.b;
  rc.b1 = in.b1;
  rc.b2 = in.b2;
  rc.delta_hat = in.delta_hat;
  rc.c1 = 2.0 * in.b1;
  rc.c3 = in.b * std::pow(in.b2, 3) * N / (2.0 * in.b1);
  rc.c_gamma = 4.0 * in.L * in.L * std::pow(in.b2, 4) * (ratio + N * (N - 1.0));
  rc.c_eps = in.b2 * in.b2 * sigma_bar_sq;
  rc.R = 2.0 * in.delta_hat / (rc.c1 * in.eta0 * in.gamma0) + rc.c3 * rc.c3 * in.gamma0 * in.gamma0 +
         rc.c_gamma * in.L * in.eta0 * in.gamma0 / rc.c1;
  rc.rho = rc.c_eps * in.L * in.eta0 / (rc.c1 * in.gamma0);
  return rc;
}

EmpiricalNoise ComputeEmpiricalNoise(std::span<const RoundOutput> trace,
                                     const NoiseBudget& budget) {
  if (trace.size() < 100) {
    throw InsufficientSamples("empirical noise needs at least 100 rounds, got " +
                              std::to_string(trace.size()));
  }
  const double m = static_cast<double>(trace.size());
  EmpiricalNoise en;
  en.rounds = trace.size();
  for (const auto& r : trace) en.mean += r.eps_decoded;
  en.mean /= m;
  double m2 = 0.0, m4 = 0.0;
  for (const auto& r : trace) {
    const double dev = r.eps_decoded - en.mean;
    m2 += dev * dev;
    m4 += dev * dev * dev * dev;
  }
  en.variance = m2 / (m - 1.0);
  m4 /= m;
  en.se_mean = std::sqrt(en.variance / m);
  en.se_variance = std::sqrt(std::max(0.0, m4 - en.variance * en.variance) / m);
  en.budget_ratio = budget.sigma_bar_sq > 0.0 ? en.variance / budget.sigma_bar_sq : 0.0;
  return en;
}

double LogisticSmoothness(const Dataset& data) {
  double best = 0.0;
  auto scan = [&](const Examples& ex) {
    for (std::size_t r = 0; r < ex.size(); ++r) {
      double s = 0.0;
      for (double v : ex.row(r)) s += v * v;
      best = std::max(best, s);
    }
  };
  for (const auto& shard : data.shards) scan(shard);
  return best / 4.0;
}

std::string BudgetReportJson(const BudgetReport& r, const std::string& manifest_hash) {
  using nlohmann::ordered_json;
  const RingParams& p = *r.params;
  ordered_json j;
  j["manifest"] = manifest_hash;
  j["profile"] = r.profile;
  j["params"] = {{"n", p.n},
                 {"log2_q", p.log2_q()},
                 {"q", p.q.get_str()},
                 {"log2_lambda", p.log2_lambda},
                 {"sigma_e", p.sigma_e},
                 {"sigma_phi", p.sigma_phi},
                 {"fbits", p.fbits},
                 {"num_devices", r.channel.num_devices()},
                 {"mu", r.channel.mu},
                 {"sigma", r.channel.sigma},
                 {"sigma_w", r.channel.sigma_w},
                 {"sigma_n", r.channel.sigma_n}};
  j["aggregates"] = {{"S_Omega", r.aggregates.s_omega},
                     {"S_Omega2", r.aggregates.s_omega2},
                     {"S_mu4", r.aggregates.s_mu4},
                     {"N", r.aggregates.num_devices}};
  ordered_json terms;
  for (const auto& [name, v] : r.budget.terms.Named()) terms[name] = v;
  j["term_breakdown"] = terms;
  j["B_eps_sq"] = r.budget.b_eps_sq;
  j["sigma_bar_sq"] = r.budget.sigma_bar_sq;
  j["fail_bound"] = r.budget.fail_bound;
  j["rho"] = r.rate.rho;
  j["R"] = r.rate.R;
  ordered_json ks = ordered_json::array();
  for (const auto& k : r.k_examples) {
    ordered_json e = {{"eps", k.eps}, {"beta", k.beta}};
    if (k.k) {
      e["K"] = *k.k;
    } else {
      e["K"] = nullptr;
      e["reason"] = "eps*beta <= rho";
    }
    ks.push_back(e);
  }
  j["K_of_examples"] = ks;
  j["rate_constants"] = {{"L", r.rate.L},
                         {"b", r.rate.b},
                         {"b1", r.rate.b1},
                         {"b2", r.rate.b2},
                         {"c1", r.rate.c1},
                         {"c3", r.rate.c3},
                         {"C_gamma", r.rate.c_gamma},
                         {"C_eps", r.rate.c_eps},
                         {"Delta_hat", r.rate.delta_hat}};
  const double bytes = static_cast<double>(r.uplink.ciphertext_bytes);
  j["uplink"] = {{"bandwidth_hz", r.bandwidth_hz},
                 {"bits_per_device_round", r.uplink.bits_per_device_round},
                 {"mbit_per_device_round", static_cast<double>(r.uplink.bits_per_device_round) / 1e6},
                 {"ciphertext_bytes", r.uplink.ciphertext_bytes},
                 {"ciphertext_kb", bytes / 1000.0},
                 {"ciphertext_kib", bytes / 1024.0},
                 {"t_tx_s", r.uplink.t_tx_s},
                 {"t_tx_us", r.uplink.t_tx_s * 1e6}};
  return j.dump(2) + "\n";
}

}  // namespace airmk
