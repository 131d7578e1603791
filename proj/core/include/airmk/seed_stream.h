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

#ifndef AIRMK_SEED_STREAM_H_
#define AIRMK_SEED_STREAM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "airmk/bigint.h"

namespace airmk {

using MasterSeed = std::array<std::uint8_t, 32>;

// Little-endian embedding of a 64-bit seed into the low 8 bytes.
MasterSeed MasterSeedFromU64(std::uint64_t seed);

// Hierarchical label such as ("round", 12, "device", 3, "enc-v").
class SeedPath {
 public:
  using Component = std::variant<std::string, std::uint64_t>;

  SeedPath() = default;
  SeedPath(std::initializer_list<Component> parts) : parts_(parts) {}

  SeedPath Child(Component part) const;
  SeedPath Join(const SeedPath& tail) const;

  const std::vector<Component>& parts() const { return parts_; }

  // Injective byte encoding: a tag byte per component, then either an 8-byte
  // little-endian integer or a length-prefixed string.
  std::vector<std::uint8_t> Encode() const;
  std::string ToString() const;

  bool operator==(const SeedPath&) const = default;

 private:
  std::vector<Component> parts_;
};

// Deterministic byte stream keyed by (master seed, path). The stream key is
// keyed BLAKE2b-256(master, path) and the bytes are the ChaCha20 keystream
// under that key with an all-zero nonce.
class SeedStream {
 public:
  SeedStream(const MasterSeed& master, SeedPath path);

  SeedStream Child(SeedPath::Component part) const;

  const MasterSeed& master() const { return master_; }
  const SeedPath& path() const { return path_; }

  void Fill(std::uint8_t* out, std::size_t len);
  std::uint64_t NextU64();

  // Uniform on [0, bound) by rejection. bound > 0.
  std::uint64_t UniformU64(std::uint64_t bound);
  BigInt UniformBigInt(const BigInt& bound);

  // Uniform on (0, 1] with 53 random bits.
  double UniformOpen01();
  // Standard normal via Box-Muller; the second variate of each pair is kept
  // for the next call.
  double Gaussian();
  double Gaussian(double mean, double sigma) {
    return mean + sigma * Gaussian();
  }
  // Rounded N(0, sigma^2) conditioned on |x| <= ceil(6 sigma).
  std::int64_t RoundedGaussian(double sigma);
  // +1 or -1 with equal probability.
  int Sign();

 private:
  void Refill();

  MasterSeed master_;
  SeedPath path_;
  std::array<std::uint8_t, 32> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 1024> buf_;
  std::size_t pos_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace airmk

#endif  // AIRMK_SEED_STREAM_H_
