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

#include "airmk/airtime.h"

#include <cmath>
#include <string>

#include "airmk/errors.h"

namespace airmk {

ChannelParams HomogeneousChannel(std::size_t num_devices, double mu,
                                 double sigma, double sigma_w, double sigma_n) {
  ChannelParams cp;
  cp.mu.assign(num_devices, mu);
  cp.sigma.assign(num_devices, sigma);
  cp.sigma_w = sigma_w;
  cp.sigma_n = sigma_n;
  ValidateChannel(cp);
  return cp;
}

void ValidateChannel(const ChannelParams& cp) {
  if (cp.mu.empty()) throw InvalidParameter("channel: need at least one device");
  if (cp.mu.size() != cp.sigma.size()) {
    throw InvalidParameter("channel: mu and sigma lengths differ");
  }
  for (std::size_t i = 0; i < cp.mu.size(); ++i) {
    if (cp.mu[i] == 0.0 || !std::isfinite(cp.mu[i])) {
      throw InvalidParameter("channel: mu_" + std::to_string(i) + " must be nonzero");
    }
    if (!(cp.sigma[i] >= 0.0) || !std::isfinite(cp.sigma[i])) {
      throw InvalidParameter("channel: sigma_" + std::to_string(i) + " must be >= 0");
    }
  }
  if (!(cp.sigma_w >= 0.0)) throw InvalidParameter("channel: sigma_w must be >= 0");
  if (!(cp.sigma_n >= 0.0)) throw InvalidParameter("channel: sigma_n must be >= 0");
}

double ChannelDraw::h(std::size_t i) const {
  return std::ldexp(static_cast<double>(h_int[i]), -static_cast<int>(fbits));
}

std::int64_t QuantizeGain(double g, unsigned fbits) {
  const double scaled = std::nearbyint(std::ldexp(g, static_cast<int>(fbits)));
  if (!std::isfinite(scaled) || std::fabs(scaled) >= 0x1.0p62) {
    throw ScaleError("channel gain does not fit the fixed-point range");
  }
  return static_cast<std::int64_t>(scaled);
}

ChannelDraw DrawChannel(const ChannelParams& cp, std::uint64_t round,
                        const MasterSeed& master, unsigned fbits) {
  ValidateChannel(cp);
  SeedStream s(master, {"channel", round});
  ChannelDraw d;
  d.round = round;
  d.fbits = fbits;
  d.h_int.resize(cp.num_devices());
  for (std::size_t i = 0; i < cp.num_devices(); ++i) {
    d.h_int[i] = QuantizeGain(s.Gaussian(cp.mu[i], cp.sigma[i]), fbits);
  }
  return d;
}

AnalogVector LiftDigital(const RingElem& p) { return AnalogVector{p.coeffs(), 0}; }

AnalogVector Rescale(const AnalogVector& x, unsigned to_scale, unsigned fbits) {
  if (to_scale < x.scale) throw ScaleError("rescale: cannot lower the scale");
  if (to_scale > kMaxAnalogScale) throw ScaleError("rescale: scale above 2");
  AnalogVector out{x.coeffs, to_scale};
  const unsigned shift = (to_scale - x.scale) * fbits;
  if (shift) {
    for (auto& c : out.coeffs) mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), shift);
  }
  return out;
}

AnalogVector AnalogAdd(const AnalogVector& x, const AnalogVector& y) {
  if (x.scale != y.scale) throw ScaleError("analog add: scale mismatch");
  if (x.n() != y.n()) throw ParamMismatch("analog add: length mismatch");
  AnalogVector out{x.coeffs, x.scale};
  for (std::size_t i = 0; i < out.n(); ++i) out.coeffs[i] += y.coeffs[i];
  return out;
}

std::vector<BigInt> DrawReceiverNoise(std::size_t n, unsigned out_scale,
                                      double sigma_w, SeedStream& noise,
                                      unsigned fbits) {
  std::vector<BigInt> w(n, 0);
  if (sigma_w == 0.0) return w;
  const int shift = static_cast<int>(out_scale * fbits);
  for (auto& c : w) c = RoundToBigInt(std::ldexp(noise.Gaussian(0.0, sigma_w), shift));
  return w;
}

AnalogVector OtaSuperpose(std::span<const Transmission> signals, double sigma_w,
                          SeedStream& noise, unsigned fbits) {
  if (signals.empty()) throw EmptyInput("ota_superpose: no signals");
  const unsigned s = signals[0].x->scale;
  const std::size_t n = signals[0].x->n();
  for (const auto& t : signals) {
    if (t.x->scale != s) throw ScaleError("ota_superpose: inputs at different scales");
    if (t.x->n() != n) throw ParamMismatch("ota_superpose: inputs of different length");
  }
  if (s + 1 > kMaxAnalogScale) throw ScaleError("ota_superpose: output scale above 2");
  AnalogVector out{DrawReceiverNoise(n, s + 1, sigma_w, noise, fbits), s + 1};
  for (const auto& t : signals) {
    const long h = static_cast<long>(t.h_int);
    for (std::size_t k = 0; k < n; ++k) {
      const mpz_srcptr x = t.x->coeffs[k].get_mpz_t();
      if (h >= 0) {
        mpz_addmul_ui(out.coeffs[k].get_mpz_t(), x, static_cast<unsigned long>(h));
      } else {
        mpz_submul_ui(out.coeffs[k].get_mpz_t(), x, static_cast<unsigned long>(-h));
      }
    }
  }
  return out;
}

QuantizeResult QuantizeRound(const AnalogVector& v, const RingParamsPtr& params,
                             WrapPolicy policy) {
  if (v.scale > kMaxAnalogScale) throw ScaleError("quantize: scale above 2");
  if (v.n() != params->n) throw ParamMismatch("quantize: length does not match n");
  const unsigned shift = v.scale * params->fbits;
  const BigInt modulus = params->q * Pow2(shift);
  const BigInt peak = MaxAbs(v.coeffs);
  // Wraparound iff 2 max|c| >= q 2^(sF).
  const BigInt slack = modulus - 2 * peak;
  QuantizeResult r{{}, RingElem(params), v.scale, ScaledToDouble(slack, shift + 1),
                   sgn(slack) <= 0};
  if (r.wrapped && policy == WrapPolicy::kThrow) {
    throw Wraparound("centered reduction wrapped: max |coeff| reaches q 2^(" +
                     std::to_string(shift) + ")/2");
  }
  r.residues.resize(v.n());
  std::vector<BigInt> rounded(v.n());
  for (std::size_t i = 0; i < v.n(); ++i) {
    r.residues[i] = CenteredMod(v.coeffs[i], modulus);
    if (shift == 0) {
      rounded[i] = r.residues[i];
    } else {
      BigInt t = r.residues[i] + Pow2(shift - 1);
      mpz_fdiv_q_2exp(rounded[i].get_mpz_t(), t.get_mpz_t(), shift);
    }
  }
  r.ring = RingElem::FromCoeffs(params, std::move(rounded));
  return r;
}

}  // namespace airmk
