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

#ifndef AIRMK_RING_H_
#define AIRMK_RING_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "airmk/bigint.h"
#include "airmk/seed_stream.h"

namespace airmk {

struct RingParams {
  std::size_t n = 0;
  BigInt q;
  BigInt lambda;
  unsigned log2_lambda = 0;
  double sigma_e = 0.0;
  double sigma_phi = 0.0;
  unsigned fbits = 0;

  // ceil(log2 q).
  std::size_t log2_q() const { return BitLength(q - 1); }
};

using RingParamsPtr = std::shared_ptr<const RingParams>;

// Validates and bundles the ring parameters. Throws InvalidParameter naming
// the first violated constraint.
RingParamsPtr MakeParams(std::size_t n, const BigInt& q, const BigInt& lambda,
                         double sigma_e, double sigma_phi, unsigned fbits);

bool SameParams(const RingParams& a, const RingParams& b);

// Element of Z_q[X]/(X^n + 1) with coefficients centered in (-q/2, q/2].
class RingElem {
 public:
  explicit RingElem(RingParamsPtr params);

  // Reduces and centers `coeffs`, which must have length n.
  static RingElem FromCoeffs(RingParamsPtr params, std::vector<BigInt> coeffs);
  static RingElem Constant(RingParamsPtr params, const BigInt& c);
  static RingElem Monomial(RingParamsPtr params, std::size_t degree,
                           const BigInt& c);

  const RingParamsPtr& params() const { return params_; }
  std::size_t n() const { return coeffs_.size(); }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  const BigInt& operator[](std::size_t i) const { return coeffs_[i]; }

  bool IsZero() const;
  bool operator==(const RingElem& other) const;

 private:
  RingParamsPtr params_;
  std::vector<BigInt> coeffs_;
};

void CheckSameParams(const RingElem& a, const RingElem& b);

RingElem RingAdd(const RingElem& p, const RingElem& r);
RingElem RingSub(const RingElem& p, const RingElem& r);
RingElem RingNeg(const RingElem& p);
RingElem RingScalarMul(const RingElem& p, const BigInt& k);
// Fast transform-based product.
RingElem RingMul(const RingElem& p, const RingElem& r);
RingElem RingMulSchoolbook(const RingElem& p, const RingElem& r);

RingElem SampleUniform(const RingParamsPtr& params, SeedStream& seed);
// Coefficients uniform on {-1, +1}.
RingElem SampleSecret(const RingParamsPtr& params, SeedStream& seed);
// Rounded N(0, sigma^2) truncated at ceil(6 sigma).
RingElem SampleGaussian(const RingParamsPtr& params, double sigma,
                        SeedStream& seed);
// Coefficients uniform on {-1, 0, +1}.
RingElem SampleTernary(const RingParamsPtr& params, SeedStream& seed);

BigInt NormSq(const RingElem& p);
BigInt InfNorm(const RingElem& p);

// Layout: u32 LE coefficient count, then per coefficient a u32 LE byte
// length followed by the minimal little-endian two's-complement encoding.
std::vector<std::uint8_t> Serialize(const RingElem& p);
RingElem Deserialize(const RingParamsPtr& params,
                     std::span<const std::uint8_t> bytes);

}  // namespace airmk

#endif  // AIRMK_RING_H_
