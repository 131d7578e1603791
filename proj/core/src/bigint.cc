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

#include "airmk/bigint.h"

#include <cmath>
#include <stdexcept>

namespace airmk {

BigInt Pow2(unsigned k) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
  return r;
}

std::size_t BitLength(const BigInt& x) {
  if (sgn(x) == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

void CenteredModInPlace(BigInt& x, const BigInt& m) {
  mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  // x in [0, m); move the upper half down so the range is (-m/2, m/2].
  BigInt twice = x;
  mpz_mul_2exp(twice.get_mpz_t(), twice.get_mpz_t(), 1);
  if (twice > m) x -= m;
}

BigInt CenteredMod(const BigInt& x, const BigInt& m) {
  BigInt r = x;
  CenteredModInPlace(r, m);
  return r;
}

double ScaledToDouble(const BigInt& x, unsigned shift) {
  if (sgn(x) == 0) return 0.0;
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(exp - static_cast<long>(shift)));
}

BigInt RoundToBigInt(double v) {
  if (!std::isfinite(v)) throw std::domain_error("RoundToBigInt: non-finite");
  BigInt r;
  mpz_set_d(r.get_mpz_t(), std::round(v));
  return r;
}

std::vector<std::uint8_t> ToTwosComplementLE(const BigInt& x) {
  // Encode |x| little-endian, then negate in two's complement if needed.
  std::size_t bits = BitLength(x);
  std::size_t len = bits / 8 + 1;  // room for the sign bit
  std::vector<std::uint8_t> out(len, 0);
  if (bits > 0) {
    std::size_t written = 0;
    mpz_export(out.data(), &written, -1, 1, -1, 0, x.get_mpz_t());
  }
  if (sgn(x) < 0) {
    unsigned carry = 1;
    for (auto& b : out) {
      unsigned v = static_cast<std::uint8_t>(~b) + carry;
      b = static_cast<std::uint8_t>(v);
      carry = v >> 8;
    }
  }
  // Trim redundant sign-extension bytes.
  while (out.size() > 1) {
    std::uint8_t top = out.back();
    std::uint8_t next = out[out.size() - 2];
    if ((top == 0x00 && !(next & 0x80)) || (top == 0xff && (next & 0x80))) {
      out.pop_back();
    } else {
      break;
    }
  }
  return out;
}

BigInt FromTwosComplementLE(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return BigInt(0);
  BigInt r;
  mpz_import(r.get_mpz_t(), bytes.size(), -1, 1, -1, 0, bytes.data());
  if (bytes.back() & 0x80) r -= Pow2(static_cast<unsigned>(8 * bytes.size()));
  return r;
}

BigInt MaxAbs(std::span<const BigInt> v) {
  BigInt best = 0;
  for (const auto& c : v) {
    if (mpz_cmpabs(c.get_mpz_t(), best.get_mpz_t()) > 0) best = abs(c);
  }
  return best;
}

}  // namespace airmk
