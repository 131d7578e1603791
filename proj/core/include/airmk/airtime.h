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

#ifndef AIRMK_AIRTIME_H_
#define AIRMK_AIRTIME_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "airmk/bigint.h"
#include "airmk/ring.h"
#include "airmk/seed_stream.h"

namespace airmk {

// Block-fading channel statistics: h_i ~ N(mu_i, sigma_i^2) per round.
struct ChannelParams {
  std::vector<double> mu;
  std::vector<double> sigma;
  double sigma_w = 1.0;  // per ring coefficient, every analog hop
  double sigma_n = 1.0;  // scalar link of the unencrypted baseline

  std::size_t num_devices() const { return mu.size(); }
  double omega(std::size_t i) const { return mu[i] * mu[i] + sigma[i] * sigma[i]; }
};

ChannelParams HomogeneousChannel(std::size_t num_devices, double mu,
                                 double sigma, double sigma_w, double sigma_n);
void ValidateChannel(const ChannelParams& cp);

// One fading block. Each h_i is stored as the integer h_i * 2^F.
struct ChannelDraw {
  std::uint64_t round = 0;
  unsigned fbits = 0;
  std::vector<std::int64_t> h_int;

  std::size_t size() const { return h_int.size(); }
  double h(std::size_t i) const;
};

// h_int = round(g 2^F) with g ~ N(mu_i, sigma_i^2), drawn from the stream
// ("channel", round).
ChannelDraw DrawChannel(const ChannelParams& cp, std::uint64_t round,
                        const MasterSeed& master, unsigned fbits);

// Converts a real gain to its 2^-F fixed-point integer. Throws ScaleError if
// the result does not fit in 63 bits.
std::int64_t QuantizeGain(double g, unsigned fbits);

// Exact analog signal: true value = coeffs / 2^(scale F).
struct AnalogVector {
  std::vector<BigInt> coeffs;
  unsigned scale = 0;

  std::size_t n() const { return coeffs.size(); }
};

inline constexpr unsigned kMaxAnalogScale = 2;

AnalogVector LiftDigital(const RingElem& p);

// Multiplies the representation by 2^((to - from) F) so the same value is
// carried at a higher scale.
AnalogVector Rescale(const AnalogVector& x, unsigned to_scale, unsigned fbits);
AnalogVector AnalogAdd(const AnalogVector& x, const AnalogVector& y);

struct Transmission {
  std::int64_t h_int;
  const AnalogVector* x;
};

// sum_i h_int_i x_i + round(w 2^((s+1) F)), w ~ N(0, sigma_w^2) per
// coefficient from `noise`. All inputs must share scale s < 2.
AnalogVector OtaSuperpose(std::span<const Transmission> signals, double sigma_w,
                          SeedStream& noise, unsigned fbits);

// The receiver noise that OtaSuperpose adds for the same arguments.
std::vector<BigInt> DrawReceiverNoise(std::size_t n, unsigned out_scale,
                                      double sigma_w, SeedStream& noise,
                                      unsigned fbits);

enum class WrapPolicy { kThrow, kPermissive };

struct QuantizeResult {
  // Centered residues modulo q 2^(s F), still at scale s.
  std::vector<BigInt> residues;
  // Nearest ring element to residues / 2^(s F).
  RingElem ring;
  unsigned scale = 0;
  // (q 2^(sF) / 2 - max |coeff|) / 2^(sF), in ring units. Non-positive iff
  // the reduction wrapped.
  double margin = 0.0;
  bool wrapped = false;
};

// Throws Wraparound under kThrow if any coefficient magnitude reaches
// q 2^(sF) / 2.
QuantizeResult QuantizeRound(const AnalogVector& v, const RingParamsPtr& params,
                             WrapPolicy policy = WrapPolicy::kThrow);

}  // namespace airmk

#endif  // AIRMK_AIRTIME_H_
