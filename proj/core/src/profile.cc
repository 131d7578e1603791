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

#include "airmk/profile.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "airmk/errors.h"
#include "airmk/trace_io.h"

namespace airmk {
namespace {

Profile PaperProfile(std::string name, std::size_t n, unsigned q_bits) {
  Profile p;
  p.name = std::move(name);
  p.n = n;
  p.q_bits = q_bits;
  p.lambda_bits = 40;
  p.dataset = "mnist01";
  // max ||x||^2 / 4 over the MNIST 0/1 training split, rounded up.
  p.smoothness_L = 74.03;
  p.lipschitz_b = p.smoothness_L;
  return p;
}

Profile CiToyProfile() {
  Profile p;
  p.name = "ci-toy";
  p.n = 256;
  p.q_bits = 60;
  p.lambda_bits = 30;
  p.train.rounds = 50;
  p.dataset = "synthetic";
  // max ||x||^2 / 4 over the synthetic training split at seed 1, rounded up.
  p.smoothness_L = 28.59;
  p.lipschitz_b = p.smoothness_L;
  return p;
}

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidParameter("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return out;
}

double ParsePositive(std::string_view key, std::string_view value) {
  const double v = ParseNumber<double>(key, value);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string(key) + " must be positive");
  }
  return v;
}

double ParseNonNegative(std::string_view key, std::string_view value) {
  const double v = ParseNumber<double>(key, value);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string(key) + " must be non-negative");
  }
  return v;
}

using Setter = std::function<void(Profile&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& Setters() {
  static const auto* setters = new std::map<std::string, Setter, std::less<>>{
      {"n", [](Profile& p, auto k, auto v) { p.n = ParseNumber<std::size_t>(k, v); }},
      {"q_bits", [](Profile& p, auto k, auto v) { p.q_bits = ParseNumber<unsigned>(k, v); }},
      {"lambda_bits", [](Profile& p, auto k, auto v) { p.lambda_bits = ParseNumber<unsigned>(k, v); }},
      {"sigma_e", [](Profile& p, auto k, auto v) { p.sigma_e = ParsePositive(k, v); }},
      {"sigma_phi", [](Profile& p, auto k, auto v) { p.sigma_phi = ParsePositive(k, v); }},
      {"fbits", [](Profile& p, auto k, auto v) { p.fbits = ParseNumber<unsigned>(k, v); }},
      {"num_devices", [](Profile& p, auto k, auto v) { p.num_devices = ParseNumber<std::size_t>(k, v); }},
      {"mu", [](Profile& p, auto k, auto v) { p.mu = ParseNumber<double>(k, v); }},
      {"sigma", [](Profile& p, auto k, auto v) { p.sigma = ParseNonNegative(k, v); }},
      {"sigma_w", [](Profile& p, auto k, auto v) { p.sigma_w = ParseNonNegative(k, v); }},
      {"sigma_n", [](Profile& p, auto k, auto v) { p.sigma_n = ParseNonNegative(k, v); }},
      {"sigma_pilot", [](Profile& p, auto k, auto v) { p.sigma_pilot = ParseNonNegative(k, v); }},
      {"stale_setup_round",
       [](Profile& p, auto k, auto v) { p.stale_setup_round = ParseNumber<std::uint64_t>(k, v); }},
      {"workers", [](Profile& p, auto k, auto v) { p.workers = ParseNumber<std::size_t>(k, v); }},
      {"rounds", [](Profile& p, auto k, auto v) { p.train.rounds = ParseNumber<std::size_t>(k, v); }},
      {"batch", [](Profile& p, auto k, auto v) { p.train.batch = ParseNumber<std::size_t>(k, v); }},
      {"eta0", [](Profile& p, auto k, auto v) { p.train.eta0 = ParsePositive(k, v); }},
      {"gamma0", [](Profile& p, auto k, auto v) { p.train.gamma0 = ParsePositive(k, v); }},
      {"eta_exp", [](Profile& p, auto k, auto v) { p.train.eta_exp = ParseNonNegative(k, v); }},
      {"gamma_exp", [](Profile& p, auto k, auto v) { p.train.gamma_exp = ParseNonNegative(k, v); }},
      {"perturbation",
       [](Profile& p, auto, auto v) { p.train.law = ParsePerturbationLaw(v); }},
      {"divergence_threshold",
       [](Profile& p, auto k, auto v) { p.train.divergence_threshold = ParsePositive(k, v); }},
      {"dataset",
       [](Profile& p, auto, auto v) {
         if (v != "mnist01" && v != "synthetic") {
           throw InvalidParameter("dataset must be mnist01 or synthetic");
         }
         p.dataset = std::string(v);
       }},
      {"synthetic_d", [](Profile& p, auto k, auto v) { p.synthetic.d = ParseNumber<std::size_t>(k, v); }},
      {"synthetic_train_per_device",
       [](Profile& p, auto k, auto v) { p.synthetic.train_per_device = ParseNumber<std::size_t>(k, v); }},
      {"synthetic_test_size",
       [](Profile& p, auto k, auto v) { p.synthetic.test_size = ParseNumber<std::size_t>(k, v); }},
      {"synthetic_separation",
       [](Profile& p, auto k, auto v) { p.synthetic.separation = ParseNonNegative(k, v); }},
      {"smoothness_L", [](Profile& p, auto k, auto v) { p.smoothness_L = ParsePositive(k, v); }},
      {"lipschitz_b", [](Profile& p, auto k, auto v) { p.lipschitz_b = ParsePositive(k, v); }},
      {"delta_hat", [](Profile& p, auto k, auto v) { p.delta_hat = ParsePositive(k, v); }},
      {"bandwidth_hz", [](Profile& p, auto k, auto v) { p.bandwidth_hz = ParsePositive(k, v); }},
  };
  return *setters;
}

}  // namespace

BigInt Profile::q() const {
  if (q_bits < 2) throw InvalidParameter("q_bits must be at least 2");
  return Pow2(q_bits) - 1;
}

RingParamsPtr Profile::MakeRingParams() const {
  return MakeParams(n, q(), Pow2(lambda_bits), sigma_e, sigma_phi, fbits);
}

ChannelParams Profile::MakeChannel() const {
  ChannelParams cp = HomogeneousChannel(num_devices, mu, sigma, sigma_w, sigma_n);
  ValidateChannel(cp);
  return cp;
}

ProtocolConfig Profile::MakeProtocolConfig(Mode mode) const {
  ProtocolConfig cfg;
  cfg.mode = mode;
  cfg.sigma_pilot = sigma_pilot;
  cfg.stale_setup_round = stale_setup_round;
  cfg.workers = workers;
  return cfg;
}

double Profile::DeltaHat() const {
  return delta_hat.value_or(static_cast<double>(num_devices) * std::log(2.0));
}

std::map<std::string, std::string> Profile::Settings() const {
  std::map<std::string, std::string> s;
  s["n"] = std::to_string(n);
  s["q_bits"] = std::to_string(q_bits);
  s["lambda_bits"] = std::to_string(lambda_bits);
  s["sigma_e"] = FormatDouble(sigma_e);
  s["sigma_phi"] = FormatDouble(sigma_phi);
  s["fbits"] = std::to_string(fbits);
  s["num_devices"] = std::to_string(num_devices);
  s["mu"] = FormatDouble(mu);
  s["sigma"] = FormatDouble(sigma);
  s["sigma_w"] = FormatDouble(sigma_w);
  s["sigma_n"] = FormatDouble(sigma_n);
  s["sigma_pilot"] = FormatDouble(sigma_pilot);
  s["stale_setup_round"] = std::to_string(stale_setup_round);
  s["rounds"] = std::to_string(train.rounds);
  s["batch"] = std::to_string(train.batch);
  s["eta0"] = FormatDouble(train.eta0);
  s["gamma0"] = FormatDouble(train.gamma0);
  s["eta_exp"] = FormatDouble(train.eta_exp);
  s["gamma_exp"] = FormatDouble(train.gamma_exp);
  s["perturbation"] = PerturbationLawName(train.law);
  s["divergence_threshold"] = FormatDouble(train.divergence_threshold);
  s["dataset"] = dataset;
  if (dataset == "synthetic") {
    s["synthetic_d"] = std::to_string(synthetic.d);
    s["synthetic_train_per_device"] = std::to_string(synthetic.train_per_device);
    s["synthetic_test_size"] = std::to_string(synthetic.test_size);
    s["synthetic_separation"] = FormatDouble(synthetic.separation);
  }
  s["smoothness_L"] = FormatDouble(smoothness_L);
  s["lipschitz_b"] = FormatDouble(lipschitz_b);
  s["delta_hat"] = FormatDouble(DeltaHat());
  s["bandwidth_hz"] = FormatDouble(bandwidth_hz);
  // workers is left out: results do not depend on it.
  return s;
}

std::vector<std::string> ProfileNames() { return {"paper-4096", "paper-8192", "ci-toy"}; }

Profile GetProfile(std::string_view name) {
  if (name == "paper-4096") return PaperProfile("paper-4096", 4096, 109);
  if (name == "paper-8192") return PaperProfile("paper-8192", 8192, 218);
  if (name == "ci-toy") return CiToyProfile();
  throw InvalidParameter("unknown profile '" + std::string(name) + "'");
}

void ApplyOverride(Profile& profile, std::string_view key, std::string_view value) {
  const auto& setters = Setters();
  auto it = setters.find(key);
  if (it == setters.end()) throw InvalidParameter("unknown config key '" + std::string(key) + "'");
  it->second(profile, key, value);
}

void ApplyConfigText(Profile& profile, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter("config line " + std::to_string(lineno) + ": expected key = value");
    }
    ApplyOverride(profile, Trim(std::string_view(t).substr(0, eq)),
                  Trim(std::string_view(t).substr(eq + 1)));
  }
}

void ApplyConfigFile(Profile& profile, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ApplyConfigText(profile, buf.str());
}

std::filesystem::path MnistDirectory() {
  if (const char* env = std::getenv("AIRMK_MNIST_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "data/mnist";
}

Dataset LoadProfileData(const Profile& profile, const MasterSeed& master) {
  if (profile.dataset == "synthetic") {
    return MakeSynthetic(profile.synthetic, profile.num_devices, master);
  }
  return LoadMnist01(MnistPaths::InDirectory(MnistDirectory()), profile.num_devices, master);
}

BudgetReport MakeBudgetReport(const Profile& profile) {
  BudgetReport r;
  r.profile = profile.name;
  r.params = profile.MakeRingParams();
  r.channel = profile.MakeChannel();
  r.aggregates = ComputeAggregates(r.channel);
  r.budget = ComputeNoiseBudget(*r.params, r.aggregates, r.channel.sigma_w);

  constexpr std::size_t kMnistFeatures = 28 * 28 + 1;
  const std::size_t d = profile.dataset == "synthetic" ? profile.synthetic.d : kMnistFeatures;
  const Perturbation pert = SharedPerturbation(0, MasterSeedFromU64(0), d, profile.train.law);
  RateInputs in;
  in.L = profile.smoothness_L;
  in.b = profile.lipschitz_b;
  in.delta_hat = profile.DeltaHat();
  in.eta0 = profile.train.eta0;
  in.gamma0 = profile.train.gamma0;
  in.b1 = pert.b1;
  in.b2 = pert.b2;
  r.rate = ComputeRateConstants(in, r.channel, r.budget.sigma_bar_sq);

  for (const auto& [eps, beta] : {std::pair{0.1, 0.1}, std::pair{0.05, 0.1}, std::pair{0.01, 0.1}}) {
    KExample ex{eps, beta, std::nullopt};
    if (eps * beta > r.rate.rho) ex.k = r.rate.KOf(eps, beta);
    r.k_examples.push_back(ex);
  }
  r.bandwidth_hz = profile.bandwidth_hz;
  r.uplink = ComputeUplinkCost(*r.params, profile.bandwidth_hz);
  return r;
}

}  // namespace airmk
