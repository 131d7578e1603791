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

#ifndef AIRMK_MKHE_H_
#define AIRMK_MKHE_H_

#include <span>
#include <vector>

#include "airmk/ring.h"
#include "airmk/seed_stream.h"

namespace airmk {

// Multi-key CKKS over a unit channel: every device holds its own secret, the
// public keys add up to a joint key, and decryption needs one share from
// every device.

struct KeyPair {
  RingElem secret;          // s in {-1, 1}^n
  RingElem partial_public;  // b = -s a + e
  RingElem error;           // e, kept for identity checks
};

struct AggregatedKey {
  RingElem b_tilde;
  RingElem a;
};

struct Ciphertext {
  RingElem c0;
  RingElem c1;
};

// Randomness consumed by one encryption.
struct EncryptionWitness {
  RingElem v;
  RingElem e0;
  RingElem e1;
};

struct DecShare {
  RingElem d;
};

struct Reconstruction {
  RingElem ring;
  double scalar = 0.0;
};

// Draws s from seed/"secret" and e from seed/"key-error".
KeyPair Keygen(const RingParamsPtr& params, const RingElem& a,
               const SeedStream& seed);

AggregatedKey AggregateKeys(std::span<const RingElem> pubkeys,
                            const RingElem& a);

// Constant coefficient round(lambda * x / mu). Throws EncodeOverflow when
// |lambda * x / mu| >= q / 4.
RingElem EncodeScalar(double x, double mu, const RingParamsPtr& params);

// Draws v, e0, e1 from seed/"enc-v", seed/"enc-e0", seed/"enc-e1".
EncryptionWitness DrawEncryptionRandomness(const RingParamsPtr& params,
                                           const SeedStream& seed);
Ciphertext EncryptWith(const AggregatedKey& agg, const RingElem& m,
                       const EncryptionWitness& w);
Ciphertext Encrypt(const RingParamsPtr& params, const AggregatedKey& agg,
                   const RingElem& m, const SeedStream& seed,
                   EncryptionWitness* witness = nullptr);

Ciphertext AddCiphertexts(std::span<const Ciphertext> cts);

// d = s c_sum1 + e*, with e* drawn from seed/"smudge" at sigma_phi.
DecShare DecShareWith(const RingElem& secret, const RingElem& c_sum1,
                      const RingElem& e_star);
DecShare MakeDecShare(const RingElem& secret, const RingElem& c_sum1,
                      const RingParamsPtr& params, const SeedStream& seed,
                      RingElem* e_star = nullptr);

struct ReconstructOptions {
  bool check_margin = true;
};

// ring = c_sum0 + sum d_i; scalar = ring[0] / lambda. With check_margin, any
// non-constant coefficient of magnitude >= q/4 raises DecryptionMargin.
Reconstruction Reconstruct(const RingElem& c_sum0,
                           std::span<const DecShare> shares,
                           const RingParamsPtr& params,
                           ReconstructOptions options = {});

}  // namespace airmk

#endif  // AIRMK_MKHE_H_
