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

#include "airmk/mkhe.h"

#include <cmath>

#include "airmk/errors.h"

namespace airmk {

KeyPair Keygen(const RingParamsPtr& params, const RingElem& a,
               const SeedStream& seed) {
  if (!SameParams(*params, *a.params())) {
    throw ParamMismatch("keygen: public polynomial uses different params");
  }
  SeedStream s_seed = seed.Child("secret");
  SeedStream e_seed = seed.Child("key-error");
  RingElem s = SampleSecret(params, s_seed);
  RingElem e = SampleGaussian(params, params->sigma_e, e_seed);
  RingElem b = RingAdd(RingNeg(RingMul(s, a)), e);
  return KeyPair{std::move(s), std::move(b), std::move(e)};
}

AggregatedKey AggregateKeys(std::span<const RingElem> pubkeys,
                            const RingElem& a) {
  if (pubkeys.empty()) throw EmptyInput("aggregate_keys: no public keys");
  RingElem sum = pubkeys[0];
  for (std::size_t i = 1; i < pubkeys.size(); ++i) sum = RingAdd(sum, pubkeys[i]);
  CheckSameParams(sum, a);
  return AggregatedKey{std::move(sum), a};
}

RingElem EncodeScalar(double x, double mu, const RingParamsPtr& params) {
  if (mu == 0.0 || !std::isfinite(mu)) throw InvalidParameter("encode: mu must be nonzero");
  const double y = std::ldexp(x / mu, static_cast<int>(params->log2_lambda));
  const double quarter_q = std::ldexp(mpz_get_d(params->q.get_mpz_t()), -2);
  if (!std::isfinite(y) || std::fabs(y) >= quarter_q) {
    throw EncodeOverflow("encode: |lambda*x/mu| reaches q/4");
  }
  return RingElem::Constant(params, RoundToBigInt(y));
}

EncryptionWitness DrawEncryptionRandomness(const RingParamsPtr& params,
                                           const SeedStream& seed) {
  SeedStream sv = seed.Child("enc-v");
  SeedStream s0 = seed.Child("enc-e0");
  SeedStream s1 = seed.Child("enc-e1");
  return EncryptionWitness{SampleTernary(params, sv),
                           SampleGaussian(params, params->sigma_e, s0),
                           SampleGaussian(params, params->sigma_e, s1)};
}

Ciphertext EncryptWith(const AggregatedKey& agg, const RingElem& m,
                       const EncryptionWitness& w) {
  CheckSameParams(agg.b_tilde, m);
  CheckSameParams(agg.a, w.v);
  RingElem c0 = RingAdd(RingAdd(RingMul(w.v, agg.b_tilde), m), w.e0);
  RingElem c1 = RingAdd(RingMul(w.v, agg.a), w.e1);
  return Ciphertext{std::move(c0), std::move(c1)};
}

Ciphertext Encrypt(const RingParamsPtr& params, const AggregatedKey& agg,
                   const RingElem& m, const SeedStream& seed,
                   EncryptionWitness* witness) {
  if (!SameParams(*params, *m.params())) {
    throw ParamMismatch("encrypt: message uses different params");
  }
  EncryptionWitness w = DrawEncryptionRandomness(params, seed);
  Ciphertext ct = EncryptWith(agg, m, w);
  if (witness) *witness = std::move(w);
  return ct;
}

Ciphertext AddCiphertexts(std::span<const Ciphertext> cts) {
  if (cts.empty()) throw EmptyInput("add_ciphertexts: no ciphertexts");
  Ciphertext sum = cts[0];
  for (std::size_t i = 1; i < cts.size(); ++i) {
    sum.c0 = RingAdd(sum.c0, cts[i].c0);
    sum.c1 = RingAdd(sum.c1, cts[i].c1);
  }
  return sum;
}

DecShare DecShareWith(const RingElem& secret, const RingElem& c_sum1,
                      const RingElem& e_star) {
  CheckSameParams(secret, c_sum1);
  return DecShare{RingAdd(RingMul(secret, c_sum1), e_star)};
}

DecShare MakeDecShare(const RingElem& secret, const RingElem& c_sum1,
                      const RingParamsPtr& params, const SeedStream& seed,
                      RingElem* e_star) {
  if (!SameParams(*params, *secret.params())) {
    throw ParamMismatch("dec_share: secret uses different params");
  }
  SeedStream ss = seed.Child("smudge");
  RingElem e = SampleGaussian(params, params->sigma_phi, ss);
  DecShare share = DecShareWith(secret, c_sum1, e);
  if (e_star) *e_star = std::move(e);
  return share;
}

Reconstruction Reconstruct(const RingElem& c_sum0,
                           std::span<const DecShare> shares,
                           const RingParamsPtr& params,
                           ReconstructOptions options) {
  if (!SameParams(*params, *c_sum0.params())) {
    throw ParamMismatch("reconstruct: ciphertext uses different params");
  }
  RingElem ring = c_sum0;
  for (const auto& s : shares) ring = RingAdd(ring, s.d);
  if (options.check_margin) {
    const BigInt& q = params->q;
    for (std::size_t i = 1; i < ring.n(); ++i) {
      if (4 * abs(ring[i]) >= q) {
        throw DecryptionMargin("reconstruct: coefficient " + std::to_string(i) +
                               " reaches q/4");
      }
    }
  }
  Reconstruction r{ring, ScaledToDouble(ring[0], params->log2_lambda)};
  return r;
}

}  // namespace airmk
