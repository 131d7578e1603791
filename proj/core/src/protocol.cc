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

#include "airmk/protocol.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "airmk/errors.h"

namespace airmk {
namespace {

template <class Fn>
void ParallelFor(std::size_t count, std::size_t workers, Fn fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < std::min(workers, count); ++t) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void AddShifted(std::vector<BigInt>& acc, const std::vector<BigInt>& x,
                unsigned shift) {
  BigInt t;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    mpz_mul_2exp(t.get_mpz_t(), x[i].get_mpz_t(), shift);
    acc[i] += t;
  }
}

std::vector<BigInt> WeightedSum(std::span<const std::int64_t> weights,
                                const std::vector<const std::vector<BigInt>*>& xs,
                                std::size_t n) {
  std::vector<BigInt> out(n, 0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long w = static_cast<long>(weights[i]);
    for (std::size_t k = 0; k < n; ++k) {
      const mpz_srcptr x = (*xs[i])[k].get_mpz_t();
      if (w >= 0) {
        mpz_addmul_ui(out[k].get_mpz_t(), x, static_cast<unsigned long>(w));
      } else {
        mpz_submul_ui(out[k].get_mpz_t(), x, static_cast<unsigned long>(-w));
      }
    }
  }
  return out;
}

std::vector<BigInt> Sub(const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
  std::vector<BigInt> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

SeedStream RoundStream(const ProtocolState& st, std::uint64_t round,
                       std::initializer_list<SeedPath::Component> tail) {
  SeedPath p{"round", round};
  for (const auto& c : tail) p = p.Child(c);
  return SeedStream(st.master(), std::move(p));
}

struct KeyBroadcast {
  AnalogVector b_tilde;
  std::vector<std::int64_t> weights;
  std::vector<BigInt> e_key;  // sum_i w_i e_i + w_key, scale 1
  std::vector<BigInt> w_key;
};

KeyBroadcast BuildKey(const ProtocolState& st, std::span<const std::int64_t> weights,
                      std::uint64_t noise_round, double sigma_w) {
  const RingParams& p = *st.params();
  const std::size_t N = st.num_devices();
  std::vector<AnalogVector> lifts(N);
  std::vector<Transmission> tx(N);
  std::vector<const std::vector<BigInt>*> errs(N);
  for (std::size_t i = 0; i < N; ++i) {
    lifts[i] = AnalogVector{st.b_lift(i), 0};
    tx[i] = Transmission{weights[i], &lifts[i]};
    errs[i] = &st.devices()[i].error.coeffs();
  }
  SeedStream noise = RoundStream(st, noise_round, {"noise", "w-key"});
  SeedStream noise_copy = noise;
  KeyBroadcast kb;
  kb.weights.assign(weights.begin(), weights.end());
  kb.w_key = DrawReceiverNoise(p.n, 1, sigma_w, noise_copy, p.fbits);
  kb.b_tilde = OtaSuperpose(tx, sigma_w, noise, p.fbits);
  kb.e_key = WeightedSum(weights, errs, p.n);
  for (std::size_t k = 0; k < p.n; ++k) kb.e_key[k] += kb.w_key[k];
  return kb;
}

double Target(const ProtocolState& st, std::span<const double> delta_f,
              std::span<const std::int64_t> gains) {
  const int f = static_cast<int>(st.params()->fbits);
  double t = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    t += std::ldexp(static_cast<double>(gains[i]), -f) * (delta_f[i] / st.channel().mu[i]);
  }
  return t;
}

void CheckInputs(const ProtocolState& st, std::span<const double> delta_f) {
  if (delta_f.size() != st.num_devices()) {
    throw InvalidParameter("round input: expected one delta_f per device");
  }
}

// Phases 2 to 4 given the broadcast key and the phase 2/3 gains.
RoundOutput RunPhases(const ProtocolState& st, std::span<const double> delta_f,
                      std::uint64_t round, const KeyBroadcast& key,
                      std::span<const std::int64_t> gains, WrapPolicy policy,
                      RoundWitness* witness) {
  const RingParamsPtr& params = st.params();
  const RingParams& p = *params;
  const NoiseSources& ns = st.config().noise;
  const std::size_t N = st.num_devices();
  const std::size_t n = p.n;
  const unsigned F = p.fbits;
  const double sigma_w = st.channel().sigma_w;

  std::vector<BigInt> m(N);
  for (std::size_t i = 0; i < N; ++i) {
    m[i] = EncodeScalar(delta_f[i], st.channel().mu[i], params)[0];
  }

  // Phase 2: encrypt under the broadcast key, superpose c0 and c1.
  const PreparedOperand b_prep(key.b_tilde.coeffs, 2);
  std::vector<DeviceWitness> dev(N);
  std::vector<AnalogVector> c0(N), c1(N);
  ParallelFor(N, st.config().workers, [&](std::size_t i) {
    EncryptionWitness ew = DrawEncryptionRandomness(params, RoundStream(st, round, {"device", i}));
    DeviceWitness& d = dev[i];
    d.m = m[i];
    d.v = ew.v.coeffs();
    d.e0 = ns.enc_e0 ? ew.e0.coeffs() : std::vector<BigInt>(n, 0);
    d.e1 = ns.enc_e1 ? ew.e1.coeffs() : std::vector<BigInt>(n, 0);
    c0[i] = AnalogVector{b_prep.Mul(d.v), 1};
    std::vector<BigInt> payload = d.e0;
    payload[0] += d.m;
    AddShifted(c0[i].coeffs, payload, F);
    c1[i] = AnalogVector{st.a_prepared().Mul(d.v), 0};
    for (std::size_t k = 0; k < n; ++k) c1[i].coeffs[k] += d.e1[k];
  });
  std::vector<Transmission> tx0(N), tx1(N);
  for (std::size_t i = 0; i < N; ++i) {
    tx0[i] = Transmission{gains[i], &c0[i]};
    tx1[i] = Transmission{gains[i], &c1[i]};
  }
  SeedStream w0 = RoundStream(st, round, {"noise", "w-c0"});
  SeedStream w1 = RoundStream(st, round, {"noise", "w-c1"});
  const double s0 = ns.w_c0 ? sigma_w : 0.0;
  const double s1 = ns.w_c1 ? sigma_w : 0.0;
  if (witness) {
    SeedStream w0c = w0, w1c = w1;
    witness->w_c0 = DrawReceiverNoise(n, 2, s0, w0c, F);
    witness->w_c1 = DrawReceiverNoise(n, 1, s1, w1c, F);
  }
  AnalogVector c0_tilde = OtaSuperpose(tx0, s0, w0, F);
  AnalogVector c1_tilde = OtaSuperpose(tx1, s1, w1, F);

  // Phase 3: shares against the broadcast c1, superposed.
  const PreparedOperand c1_prep(c1_tilde.coeffs, 2);
  std::vector<AnalogVector> shares(N);
  ParallelFor(N, st.config().workers, [&](std::size_t j) {
    DeviceWitness& d = dev[j];
    if (ns.smudge) {
      SeedStream ss = RoundStream(st, round, {"device", j, "smudge"});
      d.e_star = SampleGaussian(params, p.sigma_phi, ss).coeffs();
    } else {
      d.e_star.assign(n, 0);
    }
    shares[j] = AnalogVector{c1_prep.Mul(st.devices()[j].secret.coeffs()), 1};
    AddShifted(shares[j].coeffs, d.e_star, F);
  });
  std::vector<Transmission> txd(N);
  for (std::size_t j = 0; j < N; ++j) txd[j] = Transmission{gains[j], &shares[j]};
  SeedStream wd = RoundStream(st, round, {"noise", "w-share"});
  const double sd = ns.w_share ? sigma_w : 0.0;
  if (witness) {
    SeedStream wdc = wd;
    witness->w_share = DrawReceiverNoise(n, 2, sd, wdc, F);
  }
  AnalogVector d_tilde = OtaSuperpose(txd, sd, wd, F);

  // Phase 4: combine, reduce once, decode.
  AnalogVector m_hat = AnalogAdd(c0_tilde, d_tilde);
  QuantizeResult qr = QuantizeRound(m_hat, params, policy);

  RoundOutput out;
  out.round = round;
  out.m_decoded = ScaledToDouble(qr.residues[0], p.log2_lambda + 2 * F);
  out.target = Target(st, delta_f, gains);
  out.eps_decoded = out.m_decoded - out.target;
  out.margin = qr.margin;
  out.wrapped = qr.wrapped;

  std::vector<const std::vector<BigInt>*> vs(N), ss(N);
  for (std::size_t i = 0; i < N; ++i) {
    vs[i] = &dev[i].v;
    ss[i] = &st.devices()[i].secret.coeffs();
  }
  std::vector<BigInt> v_tilde = WeightedSum(gains, vs, n);
  std::vector<BigInt> s_tilde = WeightedSum(gains, ss, n);
  std::vector<BigInt> sa = st.a_prepared().Mul(s_tilde);
  std::vector<BigInt> masked(n);
  for (std::size_t k = 0; k < n; ++k) masked[k] = key.b_tilde.coeffs[k] + sa[k];
  std::vector<BigInt> residual =
      Sub(NegacyclicMul(v_tilde, masked), NegacyclicMul(v_tilde, key.e_key));
  out.cancel_residual = MaxAbs(residual);

  if (witness) {
    witness->key_weights = key.weights;
    witness->gains.assign(gains.begin(), gains.end());
    witness->b_tilde = key.b_tilde;
    witness->c0_tilde = std::move(c0_tilde);
    witness->c1_tilde = std::move(c1_tilde);
    witness->d_tilde = std::move(d_tilde);
    witness->m_hat = std::move(m_hat);
    witness->e_key = key.e_key;
    witness->w_key = key.w_key;
    witness->v_tilde = std::move(v_tilde);
    witness->s_tilde = std::move(s_tilde);
    witness->residues = std::move(qr.residues);
    witness->devices = std::move(dev);
  }
  return out;
}

template <class Fn>
RoundOutput Timed(Mode mode, Fn fn) {
  const auto t0 = std::chrono::steady_clock::now();
  RoundOutput out = fn();
  out.mode = mode;
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void RequireMode(const ProtocolState& st, std::initializer_list<Mode> allowed) {
  for (Mode m : allowed) {
    if (st.mode() == m) return;
  }
  throw InvalidParameter("round function does not match protocol mode " + ModeName(st.mode()));
}

}  // namespace

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kEncryptedOta:
      return "encrypted-ota";
    case Mode::kStaleKey:
      return "stale-key";
    case Mode::kPreeqZf:
      return "preeq-zf";
    case Mode::kPreeqMmse:
      return "preeq-mmse";
    case Mode::kUnencrypted:
      return "unencrypted";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  for (Mode m : {Mode::kEncryptedOta, Mode::kStaleKey, Mode::kPreeqZf,
                 Mode::kPreeqMmse, Mode::kUnencrypted}) {
    if (ModeName(m) == name) return m;
  }
  throw InvalidParameter("unknown mode '" + std::string(name) + "'");
}

NoiseSources NoiseSources::None() {
  NoiseSources s;
  s.key_error = s.enc_e0 = s.enc_e1 = s.smudge = false;
  s.w_key = s.w_c0 = s.w_c1 = s.w_share = s.scalar_noise = false;
  return s;
}

ProtocolState::ProtocolState(RingParamsPtr params, ChannelParams channel,
                             ProtocolConfig config, const MasterSeed& master)
    : params_(std::move(params)),
      channel_(std::move(channel)),
      config_(config),
      master_(master),
      a_(params_) {
  ValidateChannel(channel_);
  if (config_.sigma_pilot < 0.0) throw InvalidParameter("sigma_pilot must be >= 0");
  SeedStream as(master_, {"setup", "a"});
  a_ = SampleUniform(params_, as);
  a_prepared_ = std::make_shared<PreparedOperand>(a_.coeffs(), 64);
  const std::size_t N = channel_.num_devices();
  devices_.reserve(N);
  b_lift_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    KeyPair kp = Keygen(params_, a_, SeedStream(master_, {"setup", "device", i}));
    if (!config_.noise.key_error) {
      kp.error = RingElem(params_);
      kp.partial_public = RingNeg(RingMul(kp.secret, a_));
    }
    std::vector<BigInt> sa = a_prepared_->Mul(kp.secret.coeffs());
    b_lift_[i].resize(params_->n);
    for (std::size_t k = 0; k < params_->n; ++k) b_lift_[i][k] = kp.error[k] - sa[k];
    devices_.push_back(std::move(kp));
  }
}

RoundOutput RunRound(const ProtocolState& state, std::span<const double> delta_f,
                     std::uint64_t round, RoundWitness* witness) {
  switch (state.mode()) {
    case Mode::kEncryptedOta:
      return RunRoundEncrypted(state, delta_f, round, witness);
    case Mode::kStaleKey:
      return RunRoundStale(state, delta_f, round, state.config().stale_setup_round, witness);
    case Mode::kPreeqZf:
    case Mode::kPreeqMmse:
      return RunRoundPreeq(state, delta_f, round, witness);
    case Mode::kUnencrypted:
      return RunRoundUnencrypted(state, delta_f, round, witness);
  }
  throw InvalidParameter("unknown mode");
}

RoundOutput RunRoundEncrypted(const ProtocolState& state,
                              std::span<const double> delta_f,
                              std::uint64_t round, RoundWitness* witness) {
  RequireMode(state, {Mode::kEncryptedOta});
  CheckInputs(state, delta_f);
  return Timed(Mode::kEncryptedOta, [&] {
    auto draw = std::make_shared<const ChannelDraw>(
        DrawChannel(state.channel(), round, state.master(), state.params()->fbits));
    const double sw = state.config().noise.w_key ? state.channel().sigma_w : 0.0;
    KeyBroadcast key = BuildKey(state, draw->h_int, round, sw);
    RoundOutput out = RunPhases(state, delta_f, round, key, draw->h_int,
                                WrapPolicy::kThrow, witness);
    if (witness) witness->phase_channel = {draw, draw, draw};
    return out;
  });
}

RoundOutput RunRoundStale(const ProtocolState& state,
                          std::span<const double> delta_f, std::uint64_t round,
                          std::uint64_t setup_round, RoundWitness* witness) {
  RequireMode(state, {Mode::kStaleKey});
  CheckInputs(state, delta_f);
  if (setup_round >= round) throw InvalidParameter("stale key: setup_round must precede round");
  return Timed(Mode::kStaleKey, [&] {
    const unsigned F = state.params()->fbits;
    auto setup = std::make_shared<const ChannelDraw>(
        DrawChannel(state.channel(), setup_round, state.master(), F));
    auto draw = std::make_shared<const ChannelDraw>(
        DrawChannel(state.channel(), round, state.master(), F));
    const double sw = state.config().noise.w_key ? state.channel().sigma_w : 0.0;
    KeyBroadcast key = BuildKey(state, setup->h_int, setup_round, sw);
    RoundOutput out = RunPhases(state, delta_f, round, key, draw->h_int,
                                WrapPolicy::kPermissive, witness);
    if (witness) witness->phase_channel = {setup, draw, draw};
    return out;
  });
}

RoundOutput RunRoundPreeq(const ProtocolState& state,
                          std::span<const double> delta_f, std::uint64_t round,
                          RoundWitness* witness) {
  RequireMode(state, {Mode::kPreeqZf, Mode::kPreeqMmse});
  CheckInputs(state, delta_f);
  return Timed(state.mode(), [&] {
    const unsigned F = state.params()->fbits;
    const ChannelParams& cp = state.channel();
    const std::size_t N = state.num_devices();
    auto draw = std::make_shared<const ChannelDraw>(
        DrawChannel(cp, round, state.master(), F));
    const double sp = state.config().sigma_pilot;
    std::size_t redraws = 0;
    std::vector<std::int64_t> gains(N), mu_int(N);
    for (std::size_t i = 0; i < N; ++i) {
      SeedStream pilot = RoundStream(state, round, {"device", i, "pilot"});
      const double h = draw->h(i);
      double h_est = 0.0;
      for (int tries = 0;; ++tries) {
        if (tries > 1000) throw DomainError("pre-equalization: pilot estimate stuck near zero");
        h_est = h + sp * pilot.Gaussian();
        if (std::fabs(h_est) >= 1e-6) break;
        ++redraws;
      }
      const double beta = state.mode() == Mode::kPreeqZf
                              ? cp.mu[i] / h_est
                              : cp.mu[i] * h_est / (h_est * h_est + cp.sigma_w * cp.sigma_w);
      gains[i] = QuantizeGain(h * beta, F);
      mu_int[i] = QuantizeGain(cp.mu[i], F);
    }
    // The key is aggregated digitally with the nominal gains mu_i.
    KeyBroadcast key = BuildKey(state, mu_int, round, 0.0);
    RoundOutput out = RunPhases(state, delta_f, round, key, gains,
                                WrapPolicy::kPermissive, witness);
    out.pilot_redraws = redraws;
    if (witness) witness->phase_channel = {draw, draw, draw};
    return out;
  });
}

RoundOutput RunRoundUnencrypted(const ProtocolState& state,
                                std::span<const double> delta_f,
                                std::uint64_t round, RoundWitness* witness) {
  RequireMode(state, {Mode::kUnencrypted});
  CheckInputs(state, delta_f);
  return Timed(Mode::kUnencrypted, [&] {
    auto draw = std::make_shared<const ChannelDraw>(
        DrawChannel(state.channel(), round, state.master(), state.params()->fbits));
    RoundOutput out;
    out.round = round;
    out.target = Target(state, delta_f, draw->h_int);
    double noise = 0.0;
    if (state.config().noise.scalar_noise && state.channel().sigma_n > 0.0) {
      SeedStream ns = RoundStream(state, round, {"scalar-noise"});
      noise = ns.Gaussian(0.0, state.channel().sigma_n);
    }
    out.m_decoded = out.target + noise;
    out.eps_decoded = out.m_decoded - out.target;
    out.cancel_residual = 0;
    if (witness) {
      witness->phase_channel = {draw, draw, draw};
      witness->gains = draw->h_int;
    }
    return out;
  });
}

UplinkCost ComputeUplinkCost(std::uint64_t n, std::uint64_t log2_q,
                             double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw InvalidParameter("bandwidth must be positive");
  UplinkCost c;
  c.bits_per_device_round = 4 * n * log2_q;
  c.ciphertext_bytes = 2 * n * log2_q / 8;
  c.t_tx_s = static_cast<double>(c.bits_per_device_round) / bandwidth_hz;
  return c;
}

UplinkCost ComputeUplinkCost(const RingParams& params, double bandwidth_hz) {
  return ComputeUplinkCost(params.n, params.log2_q(), bandwidth_hz);
}

}  // namespace airmk
