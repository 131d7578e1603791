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

#ifndef AIRMK_BIGINT_H_
#define AIRMK_BIGINT_H_

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace airmk {

using BigInt = mpz_class;

// 2^k.
BigInt Pow2(unsigned k);

// Number of bits of |x|; 0 for x == 0.
std::size_t BitLength(const BigInt& x);

// Representative of x mod m in (-m/2, m/2]. m must be positive.
BigInt CenteredMod(const BigInt& x, const BigInt& m);
void CenteredModInPlace(BigInt& x, const BigInt& m);

// x / 2^shift as a double (53-bit precision, exact when |x| < 2^53 and the
// shift does not underflow).
double ScaledToDouble(const BigInt& x, unsigned shift);

// Nearest integer to a finite double.
BigInt RoundToBigInt(double v);

// Minimal little-endian two's-complement encoding (at least one byte).
std::vector<std::uint8_t> ToTwosComplementLE(const BigInt& x);
BigInt FromTwosComplementLE(std::span<const std::uint8_t> bytes);

// max_i |v_i|, and 0 for an empty span.
BigInt MaxAbs(std::span<const BigInt> v);

}  // namespace airmk

#endif  // AIRMK_BIGINT_H_
