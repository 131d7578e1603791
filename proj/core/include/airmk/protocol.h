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

#ifndef AIRMK_PROTOCOL_H_
#define AIRMK_PROTOCOL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airmk/airtime.h"
#include "airmk/mkhe.h"
#include "airmk/negacyclic.h"
#include "airmk/ring.h"
#include "airmk/seed_stream.h"

namespace airmk {

enum class Mode { kEncryptedOta, kStaleKey, kPreeqZf, kPreeqMmse, kUnencrypted };

std::string ModeName(Mode mode);
// Accepts "encrypted-ota", "stale-key", "preeq-zf", "preeq-mmse",
// "unencrypted".
Mode ParseMode(std::string_view name);

// Switches for the individual noise sources. Disabling a source forces it to
// zero; the remaining randomness is drawn from unchanged seed paths.
struct NoiseSources {
  bool key_error = true;     // e_i in b_i
  bool enc_e0 = true;        // e_i^(0)
  bool enc_e1 = true;        // e_i^(1)
  bool smudge = true;        // e_i^*
  bool w_key = true;         // receiver noise, key hop
  bool w_c0 = true;          // receiver noise, c0 hop
  bool w_c1 = true;          // receiver noise, c1 hop
  bool w_share = true;       // receiver noise, share hop
  bool scalar_noise = true;  // n_k of the unencrypted link

  static NoiseSources None();
};

struct ProtocolConfig {
  Mode mode = Mode::kEncryptedOta;
  double sigma_pilot = 0.1;
  std::uint64_t stale_setup_round = 0;
  NoiseSources noise;
  // Threads used for the per-device work inside a phase.
  std::size_t workers = 1;
};

// Public polynomial, per-device keys and exact integer lifts of the partial
// public keys, fixed for the whole run.
class ProtocolState {
 public:
  ProtocolState(RingParamsPtr params, ChannelParams channel,
                ProtocolConfig config, const MasterSeed& master);

  const RingParamsPtr& params() const { return params_; }
  const ChannelParams& channel() const { return channel_; }
  const ProtocolConfig& config() const { return config_; }
  Mode mode() const { return config_.mode; }
  const MasterSeed& master() const { return master_; }
  std::size_t num_devices() const { return devices_.size(); }

  const RingElem& a() const { return a_; }
  const std::vector<KeyPair>& devices() const { return devices_; }
  // -s_i a + e_i over Z[X]/(X^n + 1), not reduced mod q.
  const std::vector<BigInt>& b_lift(std::size_t i) const { return b_lift_[i]; }
  const PreparedOperand& a_prepared() const { return *a_prepared_; }

 private:
  RingParamsPtr params_;
  ChannelParams channel_;
  ProtocolConfig config_;
  MasterSeed master_;
  RingElem a_;
  std::vector<KeyPair> devices_;
  std::vector<std::vector<BigInt>> b_lift_;
  std::shared_ptr<const PreparedOperand> a_prepared_;
};

struct RoundOutput {
  std::uint64_t round = 0;
  Mode mode = Mode::kEncryptedOta;
  double m_decoded = 0.0;
  double target = 0.0;
  double eps_decoded = 0.0;
  double margin = 0.0;
  // Inf-norm of V (b + S a) - V E, where b is the key used for encryption,
  // E its error part and S the share-phase secret weighting.
  BigInt cancel_residual;
  bool wrapped = false;
  std::size_t pilot_redraws = 0;
  double wall_time_s = 0.0;
};

struct DeviceWitness {
  BigInt m;
  std::vector<BigInt> v, e0, e1, e_star;
};

// Everything a round consumed or produced, for exact identity checks.
struct RoundWitness {
  // Channel object used by phases 1, 2 and 3.
  std::array<std::shared_ptr<const ChannelDraw>, 3> phase_channel;
  std::vector<std::int64_t> key_weights;  // 2^F-scaled weights forming b
  std::vector<std::int64_t> gains;        // 2^F-scaled gains in phases 2-3
  AnalogVector b_tilde, c0_tilde, c1_tilde, d_tilde, m_hat;
  std::vector<BigInt> e_key;  // sum_i w_i e_i + w_key, scale 1
  std::vector<BigInt> w_key, w_c0, w_c1, w_share;
  std::vector<BigInt> v_tilde, s_tilde;  // scale 1
  std::vector<BigInt> residues;          // m_hat centered mod q 2^(2F)
  std::vector<DeviceWitness> devices;
};

// Dispatches on state.mode().
RoundOutput RunRound(const ProtocolState& state, std::span<const double> delta_f,
                     std::uint64_t round, RoundWitness* witness = nullptr);

RoundOutput RunRoundEncrypted(const ProtocolState& state,
                              std::span<const double> delta_f,
                              std::uint64_t round,
                              RoundWitness* witness = nullptr);
RoundOutput RunRoundStale(const ProtocolState& state,
                          std::span<const double> delta_f, std::uint64_t round,
                          std::uint64_t setup_round,
                          RoundWitness* witness = nullptr);
RoundOutput RunRoundPreeq(const ProtocolState& state,
                          std::span<const double> delta_f, std::uint64_t round,
                          RoundWitness* witness = nullptr);
RoundOutput RunRoundUnencrypted(const ProtocolState& state,
                                std::span<const double> delta_f,
                                std::uint64_t round,
                                RoundWitness* witness = nullptr);

struct UplinkCost {
  std::uint64_t bits_per_device_round = 0;
  std::uint64_t ciphertext_bytes = 0;
  double t_tx_s = 0.0;
};

// bits = 4 n ceil(log2 q), ciphertext = 2 n ceil(log2 q) / 8 bytes,
// t_tx = bits / bandwidth.
UplinkCost ComputeUplinkCost(std::uint64_t n, std::uint64_t log2_q,
                             double bandwidth_hz);
UplinkCost ComputeUplinkCost(const RingParams& params, double bandwidth_hz);

}  // namespace airmk

#endif  // AIRMK_PROTOCOL_H_
