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

#ifndef AIRMK_PROFILE_H_
#define AIRMK_PROFILE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "airmk/airtime.h"
#include "airmk/analysis.h"
#include "airmk/protocol.h"
#include "airmk/ring.h"
#include "airmk/zofl.h"

namespace airmk {

// A named experiment configuration. Every field can be overridden by key
// through ApplyOverride; Settings() lists the same keys.
struct Profile {
  std::string name;

  std::size_t n = 0;
  unsigned q_bits = 0;  // q = 2^q_bits - 1
  unsigned lambda_bits = 0;
  double sigma_e = 3.2;
  double sigma_phi = 3.2;
  unsigned fbits = 40;

  std::size_t num_devices = 10;
  double mu = 1.0;
  double sigma = 1.0;
  double sigma_w = 1.0;
  double sigma_n = 1.0;
  double sigma_pilot = 0.1;
  std::uint64_t stale_setup_round = 0;
  std::size_t workers = 1;

  TrainConfig train;
  std::string dataset;  // "mnist01" or "synthetic"
  SyntheticConfig synthetic;

  double smoothness_L = 1.0;
  double lipschitz_b = 1.0;
  std::optional<double> delta_hat;  // defaults to F(0) = N log 2
  double bandwidth_hz = 1e12;

  BigInt q() const;
  RingParamsPtr MakeRingParams() const;
  ChannelParams MakeChannel() const;
  ProtocolConfig MakeProtocolConfig(Mode mode) const;
  double DeltaHat() const;
  std::map<std::string, std::string> Settings() const;
};

std::vector<std::string> ProfileNames();
// Throws InvalidParameter for an unknown name.
Profile GetProfile(std::string_view name);

// Throws InvalidParameter for an unknown key or a malformed value.
void ApplyOverride(Profile& profile, std::string_view key, std::string_view value);
// `key = value` lines; blank lines and lines starting with '#' are skipped.
void ApplyConfigText(Profile& profile, std::string_view text);
void ApplyConfigFile(Profile& profile, const std::filesystem::path& path);

// $AIRMK_MNIST_DIR, or data/mnist when unset.
std::filesystem::path MnistDirectory();
Dataset LoadProfileData(const Profile& profile, const MasterSeed& master);

BudgetReport MakeBudgetReport(const Profile& profile);

}  // namespace airmk

#endif  // AIRMK_PROFILE_H_
