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

#include "airmk/ring.h"

#include <bit>
#include <cmath>
#include <string>

#include "airmk/errors.h"
#include "airmk/negacyclic.h"

namespace airmk {
namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + 4 > bytes.size()) throw DataError("ring deserialize: truncated input");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[pos + i];
  pos += 4;
  return v;
}

}  // namespace

RingParamsPtr MakeParams(std::size_t n, const BigInt& q, const BigInt& lambda,
                         double sigma_e, double sigma_phi, unsigned fbits) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw InvalidParameter("n must be a power of two and at least 2 (got " +
                           std::to_string(n) + ")");
  }
  if (lambda < 2) throw InvalidParameter("lambda must be at least 2");
  if (mpz_popcount(lambda.get_mpz_t()) != 1) {
    throw InvalidParameter("lambda must be a power of two");
  }
  if (q < 2 * lambda) throw InvalidParameter("q must be at least 2*lambda");
  if (mpz_even_p(q.get_mpz_t())) throw InvalidParameter("q must be odd");
  if (!(sigma_e > 0.0) || !std::isfinite(sigma_e)) {
    throw InvalidParameter("sigma_e must be positive");
  }
  if (!(sigma_phi > 0.0) || !std::isfinite(sigma_phi)) {
    throw InvalidParameter("sigma_phi must be positive");
  }
  if (fbits < 1) throw InvalidParameter("fbits must be at least 1");
  auto p = std::make_shared<RingParams>();
  p->n = n;
  p->q = q;
  p->lambda = lambda;
  p->log2_lambda = static_cast<unsigned>(BitLength(lambda) - 1);
  p->sigma_e = sigma_e;
  p->sigma_phi = sigma_phi;
  p->fbits = fbits;
  return p;
}

bool SameParams(const RingParams& a, const RingParams& b) {
  return &a == &b || (a.n == b.n && a.q == b.q && a.lambda == b.lambda);
}

RingElem::RingElem(RingParamsPtr params)
    : params_(std::move(params)), coeffs_(params_->n, 0) {}

RingElem RingElem::FromCoeffs(RingParamsPtr params, std::vector<BigInt> coeffs) {
  if (coeffs.size() != params->n) {
    throw ParamMismatch("coefficient vector length " + std::to_string(coeffs.size()) +
                        " does not match n = " + std::to_string(params->n));
  }
  RingElem r(std::move(params));
  for (auto& c : coeffs) CenteredModInPlace(c, r.params_->q);
  r.coeffs_ = std::move(coeffs);
  return r;
}

RingElem RingElem::Constant(RingParamsPtr params, const BigInt& c) {
  return Monomial(std::move(params), 0, c);
}

RingElem RingElem::Monomial(RingParamsPtr params, std::size_t degree,
                            const BigInt& c) {
  if (degree >= params->n) throw InvalidParameter("monomial degree >= n");
  RingElem r(std::move(params));
  r.coeffs_[degree] = CenteredMod(c, r.params_->q);
  return r;
}

bool RingElem::IsZero() const {
  for (const auto& c : coeffs_) {
    if (sgn(c) != 0) return false;
  }
  return true;
}

bool RingElem::operator==(const RingElem& other) const {
  return SameParams(*params_, *other.params_) && coeffs_ == other.coeffs_;
}

void CheckSameParams(const RingElem& a, const RingElem& b) {
  if (!SameParams(*a.params(), *b.params())) {
    throw ParamMismatch("ring elements belong to different parameter sets");
  }
}

RingElem RingAdd(const RingElem& p, const RingElem& r) {
  CheckSameParams(p, r);
  std::vector<BigInt> out(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) out[i] = p[i] + r[i];
  return RingElem::FromCoeffs(p.params(), std::move(out));
}

RingElem RingSub(const RingElem& p, const RingElem& r) {
  CheckSameParams(p, r);
  std::vector<BigInt> out(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) out[i] = p[i] - r[i];
  return RingElem::FromCoeffs(p.params(), std::move(out));
}

RingElem RingNeg(const RingElem& p) {
  std::vector<BigInt> out(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) out[i] = -p[i];
  return RingElem::FromCoeffs(p.params(), std::move(out));
}

RingElem RingScalarMul(const RingElem& p, const BigInt& k) {
  std::vector<BigInt> out(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) out[i] = p[i] * k;
  return RingElem::FromCoeffs(p.params(), std::move(out));
}

RingElem RingMul(const RingElem& p, const RingElem& r) {
  CheckSameParams(p, r);
  return RingElem::FromCoeffs(p.params(), NegacyclicMul(p.coeffs(), r.coeffs()));
}

RingElem RingMulSchoolbook(const RingElem& p, const RingElem& r) {
  CheckSameParams(p, r);
  return RingElem::FromCoeffs(p.params(),
                              NegacyclicMulSchoolbook(p.coeffs(), r.coeffs()));
}

RingElem SampleUniform(const RingParamsPtr& params, SeedStream& seed) {
  std::vector<BigInt> c(params->n);
  for (auto& x : c) x = seed.UniformBigInt(params->q);
  return RingElem::FromCoeffs(params, std::move(c));
}

RingElem SampleSecret(const RingParamsPtr& params, SeedStream& seed) {
  std::vector<BigInt> c(params->n);
  for (auto& x : c) x = seed.Sign();
  return RingElem::FromCoeffs(params, std::move(c));
}

RingElem SampleGaussian(const RingParamsPtr& params, double sigma,
                        SeedStream& seed) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  std::vector<BigInt> c(params->n);
  for (auto& x : c) x = static_cast<long>(seed.RoundedGaussian(sigma));
  return RingElem::FromCoeffs(params, std::move(c));
}

RingElem SampleTernary(const RingParamsPtr& params, SeedStream& seed) {
  std::vector<BigInt> c(params->n);
  for (auto& x : c) x = static_cast<long>(seed.UniformU64(3)) - 1;
  return RingElem::FromCoeffs(params, std::move(c));
}

BigInt NormSq(const RingElem& p) {
  BigInt s = 0;
  for (const auto& c : p.coeffs()) mpz_addmul(s.get_mpz_t(), c.get_mpz_t(), c.get_mpz_t());
  return s;
}

BigInt InfNorm(const RingElem& p) { return MaxAbs(p.coeffs()); }

std::vector<std::uint8_t> Serialize(const RingElem& p) {
  std::vector<std::uint8_t> out;
  PutU32(out, static_cast<std::uint32_t>(p.n()));
  for (const auto& c : p.coeffs()) {
    std::vector<std::uint8_t> b = ToTwosComplementLE(c);
    PutU32(out, static_cast<std::uint32_t>(b.size()));
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

RingElem Deserialize(const RingParamsPtr& params,
                     std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::uint32_t n = GetU32(bytes, pos);
  if (n != params->n) throw ParamMismatch("serialized degree does not match params");
  std::vector<BigInt> c(n);
  for (auto& x : c) {
    const std::uint32_t len = GetU32(bytes, pos);
    if (pos + len > bytes.size()) throw DataError("ring deserialize: truncated input");
    x = FromTwosComplementLE(bytes.subspan(pos, len));
    pos += len;
  }
  if (pos != bytes.size()) throw DataError("ring deserialize: trailing bytes");
  return RingElem::FromCoeffs(params, std::move(c));
}

}  // namespace airmk
