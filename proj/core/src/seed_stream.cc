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

#include "airmk/seed_stream.h"

#include <sodium.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "airmk/errors.h"

namespace airmk {
namespace {

void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw Error("libsodium initialization failed");
}

void AppendU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

MasterSeed MasterSeedFromU64(std::uint64_t seed) {
  MasterSeed m{};
  for (int i = 0; i < 8; ++i) m[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  return m;
}

SeedPath SeedPath::Child(Component part) const {
  SeedPath p = *this;
  p.parts_.push_back(std::move(part));
  return p;
}

SeedPath SeedPath::Join(const SeedPath& tail) const {
  SeedPath p = *this;
  p.parts_.insert(p.parts_.end(), tail.parts_.begin(), tail.parts_.end());
  return p;
}

std::vector<std::uint8_t> SeedPath::Encode() const {
  std::vector<std::uint8_t> out;
  AppendU64(out, parts_.size());
  for (const auto& part : parts_) {
    if (const auto* s = std::get_if<std::string>(&part)) {
      out.push_back(0x53);
      AppendU64(out, s->size());
      out.insert(out.end(), s->begin(), s->end());
    } else {
      out.push_back(0x49);
      AppendU64(out, std::get<std::uint64_t>(part));
    }
  }
  return out;
}

std::string SeedPath::ToString() const {
  std::string out;
  for (const auto& part : parts_) {
    if (!out.empty()) out += '/';
    if (const auto* s = std::get_if<std::string>(&part)) {
      out += *s;
    } else {
      out += std::to_string(std::get<std::uint64_t>(part));
    }
  }
  return out;
}

SeedStream::SeedStream(const MasterSeed& master, SeedPath path)
    : master_(master), path_(std::move(path)), pos_(buf_.size()) {
  EnsureSodium();
  std::vector<std::uint8_t> label = path_.Encode();
  crypto_generichash(key_.data(), key_.size(), label.data(), label.size(),
                     master_.data(), master_.size());
}

SeedStream SeedStream::Child(SeedPath::Component part) const {
  return SeedStream(master_, path_.Child(std::move(part)));
}

void SeedStream::Refill() {
  static const std::array<std::uint8_t, 8> kNonce{};
  std::memset(buf_.data(), 0, buf_.size());
  crypto_stream_chacha20_xor_ic(buf_.data(), buf_.data(), buf_.size(),
                                kNonce.data(), block_, key_.data());
  block_ += buf_.size() / 64;
  pos_ = 0;
}

void SeedStream::Fill(std::uint8_t* out, std::size_t len) {
  while (len > 0) {
    if (pos_ == buf_.size()) Refill();
    std::size_t take = std::min(len, buf_.size() - pos_);
    std::memcpy(out, buf_.data() + pos_, take);
    pos_ += take;
    out += take;
    len -= take;
  }
}

std::uint64_t SeedStream::NextU64() {
  std::uint8_t b[8];
  Fill(b, 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t SeedStream::UniformU64(std::uint64_t bound) {
  if (bound == 0) throw InvalidParameter("UniformU64: bound must be positive");
  // Reject the tail so every residue is equally likely.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    std::uint64_t x = NextU64();
    if (x >= limit) return x % bound;
  }
}

BigInt SeedStream::UniformBigInt(const BigInt& bound) {
  if (sgn(bound) <= 0) {
    throw InvalidParameter("UniformBigInt: bound must be positive");
  }
  const std::size_t bits = BitLength(bound - 1);
  if (bits == 0) return BigInt(0);
  const std::size_t bytes = (bits + 7) / 8;
  const unsigned top_mask = static_cast<unsigned>((1u << (bits - 8 * (bytes - 1))) - 1);
  std::vector<std::uint8_t> raw(bytes);
  BigInt x;
  for (;;) {
    Fill(raw.data(), bytes);
    raw.back() &= static_cast<std::uint8_t>(top_mask);
    mpz_import(x.get_mpz_t(), bytes, -1, 1, -1, 0, raw.data());
    if (x < bound) return x;
  }
}

double SeedStream::UniformOpen01() {
  return static_cast<double>((NextU64() >> 11) + 1) * 0x1.0p-53;
}

double SeedStream::Gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = UniformOpen01();
  double u2 = UniformOpen01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

std::int64_t SeedStream::RoundedGaussian(double sigma) {
  if (!(sigma >= 0.0)) throw InvalidParameter("RoundedGaussian: sigma < 0");
  if (sigma == 0.0) return 0;
  const double bound = std::ceil(6.0 * sigma);
  for (;;) {
    double x = std::nearbyint(sigma * Gaussian());
    if (std::fabs(x) <= bound) return static_cast<std::int64_t>(x);
  }
}

int SeedStream::Sign() {
  if (pos_ == buf_.size()) Refill();
  return (buf_[pos_++] & 1) ? 1 : -1;
}

}  // namespace airmk
