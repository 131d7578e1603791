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

#include "airmk/negacyclic.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <mutex>

#include "airmk/errors.h"

namespace airmk {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr unsigned kPrimeBits = 62;
constexpr unsigned kRootLog = 17;  // every prime is 1 mod 2^17

std::atomic<bool> g_fault{false};

u64 MulMod(u64 a, u64 b, u64 p) {
  return static_cast<u64>(static_cast<u128>(a) * b % p);
}

u64 PowMod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = MulMod(r, a, p);
    a = MulMod(a, a, p);
    e >>= 1;
  }
  return r;
}

bool IsPrime(u64 n) {
  if (n < 2) return false;
  for (u64 sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % sp == 0) return n == sp;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic for all 64-bit n.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Shoup multiplication by a fixed w with precomputed w' = floor(w 2^64 / p).
inline u64 ShoupPre(u64 w, u64 p) {
  return static_cast<u64>((static_cast<u128>(w) << 64) / p);
}
inline u64 MulShoup(u64 a, u64 w, u64 wp, u64 p) {
  u64 q = static_cast<u64>((static_cast<u128>(a) * wp) >> 64);
  u64 r = a * w - q * p;
  return r >= p ? r - p : r;
}

struct PrimeInfo {
  u64 p;
  u64 root;  // primitive 2^kRootLog-th root of unity
};

class PrimeList {
 public:
  const PrimeInfo& Get(std::size_t i) {
    std::lock_guard<std::mutex> lock(mu_);
    const u64 step = u64{1} << kRootLog;
    u64 cand = primes_.empty() ? ((u64{1} << kPrimeBits) - step + 1)
                               : primes_.back().p - step;
    while (primes_.size() <= i) {
      if (cand < (u64{1} << (kPrimeBits - 1))) throw Error("NTT prime pool exhausted");
      if (IsPrime(cand)) primes_.push_back({cand, FindRoot(cand)});
      cand -= step;
    }
    return primes_[i];
  }

 private:
  static u64 FindRoot(u64 p) {
    const u64 order = u64{1} << kRootLog;
    for (u64 g = 2;; ++g) {
      u64 x = PowMod(g, (p - 1) / order, p);
      if (PowMod(x, order / 2, p) == p - 1) return x;
    }
  }

  std::mutex mu_;
  std::vector<PrimeInfo> primes_;
};

PrimeList& Primes() {
  static PrimeList list;
  return list;
}

struct NttTable {
  u64 p;
  std::vector<u64> psi_rev, psi_rev_sh, ipsi_rev, ipsi_rev_sh;
  u64 n_inv, n_inv_sh;
};

unsigned BitReverse(unsigned x, unsigned bits) {
  unsigned r = 0;
  for (unsigned i = 0; i < bits; ++i) r |= ((x >> i) & 1u) << (bits - 1 - i);
  return r;
}

const NttTable& Table(std::size_t prime_index, std::size_t n) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<NttTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{prime_index, n}];
  if (slot) return *slot;
  const PrimeInfo& info = Primes().Get(prime_index);
  const u64 p = info.p;
  const unsigned logn = static_cast<unsigned>(std::countr_zero(n));
  // psi is a primitive 2n-th root of unity.
  const u64 psi = PowMod(info.root, (u64{1} << kRootLog) / (2 * n), p);
  const u64 ipsi = PowMod(psi, p - 2, p);
  auto t = std::make_unique<NttTable>();
  t->p = p;
  t->psi_rev.resize(n);
  t->ipsi_rev.resize(n);
  t->psi_rev_sh.resize(n);
  t->ipsi_rev_sh.resize(n);
  u64 pw = 1, ipw = 1;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned r = BitReverse(static_cast<unsigned>(i), logn);
    t->psi_rev[r] = pw;
    t->ipsi_rev[r] = ipw;
    pw = MulMod(pw, psi, p);
    ipw = MulMod(ipw, ipsi, p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    t->psi_rev_sh[i] = ShoupPre(t->psi_rev[i], p);
    t->ipsi_rev_sh[i] = ShoupPre(t->ipsi_rev[i], p);
  }
  t->n_inv = PowMod(n % p, p - 2, p);
  t->n_inv_sh = ShoupPre(t->n_inv, p);
  slot = std::move(t);
  return *slot;
}

void Forward(std::vector<u64>& a, const NttTable& t) {
  const std::size_t n = a.size();
  const u64 p = t.p;
  std::size_t len = n;
  for (std::size_t m = 1; m < n; m <<= 1) {
    len >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const u64 w = t.psi_rev[m + i], wp = t.psi_rev_sh[m + i];
      u64* x = a.data() + 2 * i * len;
      u64* y = x + len;
      for (std::size_t j = 0; j < len; ++j) {
        u64 u = x[j];
        u64 v = MulShoup(y[j], w, wp, p);
        u64 s = u + v;
        x[j] = s >= p ? s - p : s;
        y[j] = u >= v ? u - v : u + p - v;
      }
    }
  }
}

void Inverse(std::vector<u64>& a, const NttTable& t) {
  const std::size_t n = a.size();
  const u64 p = t.p;
  std::size_t len = 1;
  for (std::size_t m = n; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    for (std::size_t i = 0; i < h; ++i) {
      const u64 w = t.ipsi_rev[h + i], wp = t.ipsi_rev_sh[h + i];
      u64* x = a.data() + 2 * i * len;
      u64* y = x + len;
      for (std::size_t j = 0; j < len; ++j) {
        u64 u = x[j], v = y[j];
        u64 s = u + v;
        x[j] = s >= p ? s - p : s;
        y[j] = MulShoup(u >= v ? u - v : u + p - v, w, wp, p);
      }
    }
    len <<= 1;
  }
  for (auto& x : a) x = MulShoup(x, t.n_inv, t.n_inv_sh, p);
}

std::size_t MaxBits(std::span<const BigInt> v) {
  std::size_t b = 0;
  for (const auto& c : v) b = std::max(b, BitLength(c));
  return b;
}

std::size_t PrimesFor(std::size_t bits_a, std::size_t bits_b, std::size_t n) {
  // |c_k| < n 2^(bits_a + bits_b); the CRT range must cover twice that.
  std::size_t need = bits_a + bits_b + static_cast<std::size_t>(std::bit_width(n)) + 2;
  return (need + kPrimeBits - 2) / (kPrimeBits - 1);
}

std::vector<u64> Residues(std::span<const BigInt> a, u64 p) {
  std::vector<u64> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const mpz_srcptr z = a[i].get_mpz_t();
    if (mpz_sgn(z) == 0) {
      r[i] = 0;
    } else if (mpz_fits_slong_p(z)) {
      long v = mpz_get_si(z);
      r[i] = v >= 0 ? static_cast<u64>(v) % p : (p - (static_cast<u64>(-(v + 1)) + 1) % p) % p;
    } else {
      r[i] = mpz_fdiv_ui(z, p);
    }
  }
  return r;
}

void CheckShapes(std::size_t na, std::size_t nb) {
  if (na != nb) throw ParamMismatch("negacyclic product: operand lengths differ");
  if (na == 0 || !std::has_single_bit(na)) {
    throw InvalidParameter("negacyclic product: length must be a power of two");
  }
  if (na > kMaxNttDegree) {
    throw InvalidParameter("negacyclic product: degree exceeds NTT support");
  }
}

// Garner reconstruction of the centered integers from k residue vectors.
std::vector<BigInt> Lift(const std::vector<std::vector<u64>>& res, std::size_t n) {
  const std::size_t k = res.size();
  std::vector<u64> ps(k);
  for (std::size_t j = 0; j < k; ++j) ps[j] = Primes().Get(j).p;
  // inv[j][i] = p_i^{-1} mod p_j for i < j.
  std::vector<std::vector<u64>> inv(k, std::vector<u64>(k, 0));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) inv[j][i] = PowMod(ps[i] % ps[j], ps[j] - 2, ps[j]);
  }
  BigInt modulus = 1;
  for (u64 p : ps) mpz_mul_ui(modulus.get_mpz_t(), modulus.get_mpz_t(), p);
  BigInt half = modulus / 2;

  std::vector<BigInt> out(n);
  std::vector<u64> v(k);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      const u64 p = ps[j];
      u64 x = res[j][c];
      for (std::size_t i = 0; i < j; ++i) {
        u64 vi = v[i] % p;
        x = x >= vi ? x - vi : x + p - vi;
        x = MulMod(x, inv[j][i], p);
      }
      v[j] = x;
    }
    BigInt& acc = out[c];
    acc = v[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) {
      mpz_mul_ui(acc.get_mpz_t(), acc.get_mpz_t(), ps[j]);
      mpz_add_ui(acc.get_mpz_t(), acc.get_mpz_t(), v[j]);
    }
    if (acc > half) acc -= modulus;
  }
  if (g_fault.load(std::memory_order_relaxed)) out[0] += 1;
  return out;
}

}  // namespace

std::vector<BigInt> NegacyclicMulSchoolbook(std::span<const BigInt> a,
                                            std::span<const BigInt> b) {
  if (a.size() != b.size()) throw ParamMismatch("negacyclic product: operand lengths differ");
  const std::size_t n = a.size();
  std::vector<BigInt> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i + j;
      if (k < n) {
        mpz_addmul(out[k].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
      } else {
        mpz_submul(out[k - n].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
      }
    }
  }
  return out;
}

std::vector<BigInt> NegacyclicMul(std::span<const BigInt> a,
                                  std::span<const BigInt> b) {
  CheckShapes(a.size(), b.size());
  const std::size_t n = a.size();
  const std::size_t k = PrimesFor(MaxBits(a), MaxBits(b), n);
  std::vector<std::vector<u64>> res(k);
  for (std::size_t j = 0; j < k; ++j) {
    const NttTable& t = Table(j, n);
    std::vector<u64> x = Residues(a, t.p);
    std::vector<u64> y = Residues(b, t.p);
    Forward(x, t);
    Forward(y, t);
    for (std::size_t i = 0; i < n; ++i) x[i] = MulMod(x[i], y[i], t.p);
    Inverse(x, t);
    res[j] = std::move(x);
  }
  return Lift(res, n);
}

PreparedOperand::PreparedOperand(std::span<const BigInt> a,
                                 std::size_t max_other_bits)
    : n_(a.size()),
      bits_(MaxBits(a)),
      max_other_bits_(max_other_bits),
      plain_(a.begin(), a.end()) {
  CheckShapes(n_, n_);
  num_primes_ = PrimesFor(bits_, max_other_bits_, n_);
  ntt_.resize(num_primes_);
  for (std::size_t j = 0; j < num_primes_; ++j) {
    const NttTable& t = Table(j, n_);
    ntt_[j] = Residues(a, t.p);
    Forward(ntt_[j], t);
  }
}

std::vector<BigInt> PreparedOperand::Mul(std::span<const BigInt> b) const {
  CheckShapes(n_, b.size());
  const std::size_t need = PrimesFor(bits_, MaxBits(b), n_);
  if (need > num_primes_) return NegacyclicMul(plain_, b);
  std::vector<std::vector<u64>> res(need);
  for (std::size_t j = 0; j < need; ++j) {
    const NttTable& t = Table(j, n_);
    std::vector<u64> y = Residues(b, t.p);
    Forward(y, t);
    for (std::size_t i = 0; i < n_; ++i) y[i] = MulMod(y[i], ntt_[j][i], t.p);
    Inverse(y, t);
    res[j] = std::move(y);
  }
  return Lift(res, n_);
}

namespace testing {
void SetMultiplyFault(bool enabled) { g_fault.store(enabled); }
bool MultiplyFaultEnabled() { return g_fault.load(); }
}  // namespace testing

}  // namespace airmk
