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

#ifndef AIRMK_NEGACYCLIC_H_
#define AIRMK_NEGACYCLIC_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "airmk/bigint.h"

namespace airmk {

// Exact products in Z[X]/(X^n + 1). The fast path maps both operands to a set
// of word-size NTT primes, multiplies pointwise and lifts back with Garner's
// CRT; enough primes are used that the lift is the exact integer result.

// Quadratic reference implementation.
std::vector<BigInt> NegacyclicMulSchoolbook(std::span<const BigInt> a,
                                            std::span<const BigInt> b);

// Transform-based product; bit-identical to the schoolbook result.
std::vector<BigInt> NegacyclicMul(std::span<const BigInt> a,
                                  std::span<const BigInt> b);

// An operand kept in NTT form so repeated products against it skip its
// forward transforms. Products whose other operand is wider than
// `max_other_bits` fall back to the unprepared path.
class PreparedOperand {
 public:
  PreparedOperand(std::span<const BigInt> a, std::size_t max_other_bits);

  std::size_t n() const { return n_; }
  std::vector<BigInt> Mul(std::span<const BigInt> b) const;

 private:
  std::size_t n_;
  std::size_t bits_;
  std::size_t max_other_bits_;
  std::size_t num_primes_;
  std::vector<BigInt> plain_;
  std::vector<std::vector<std::uint64_t>> ntt_;
};

// Largest supported ring degree for the fast path.
inline constexpr std::size_t kMaxNttDegree = std::size_t{1} << 16;

namespace testing {
// When enabled, the fast path perturbs coefficient 0 of every product by +1.
// Used by the self-test to prove the schoolbook cross-check detects faults.
void SetMultiplyFault(bool enabled);
bool MultiplyFaultEnabled();
}  // namespace testing

}  // namespace airmk

#endif  // AIRMK_NEGACYCLIC_H_
