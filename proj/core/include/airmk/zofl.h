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

#ifndef AIRMK_ZOFL_H_
#define AIRMK_ZOFL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "airmk/protocol.h"
#include "airmk/seed_stream.h"

namespace airmk {

// Row-major feature matrix with +-1 labels.
struct Examples {
  std::size_t d = 0;
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
};

struct Dataset {
  std::size_t d = 0;
  std::vector<Examples> shards;  // one per device
  Examples test;
};

struct MnistPaths {
  std::filesystem::path train_images, train_labels, test_images, test_labels;

  // Standard file names under `dir`.
  static MnistPaths InDirectory(const std::filesystem::path& dir);
};

// Reads an IDX image/label pair, keeps digits 0 and 1, scales pixels by
// 1/255, appends a bias feature and maps labels {0, 1} to {-1, +1}.
Examples ReadMnist01(const std::filesystem::path& images,
                     const std::filesystem::path& labels);

// Shuffles the training split with ("data", "shard") and deals equal shards
// to `num_devices` devices; the remainder is dropped.
Dataset LoadMnist01(const MnistPaths& paths, std::size_t num_devices,
                    const MasterSeed& master);

struct SyntheticConfig {
  std::size_t d = 32;  // including the bias feature
  std::size_t train_per_device = 200;
  std::size_t test_size = 1000;
  double separation = 10.0;  // distance between blob centres, in noise std
};

// Two unit-variance Gaussian blobs at +-(separation/2) u for a random unit
// direction u, labels alternating so both classes are exactly balanced.
Dataset MakeSynthetic(const SyntheticConfig& cfg, std::size_t num_devices,
                      const MasterSeed& master);

// log(1 + exp(-y x'theta)) averaged over `rows`, stable for large margins.
double LocalLoss(std::span<const double> theta, const Examples& ex,
                 std::span<const std::size_t> rows);
double MeanLoss(std::span<const double> theta, const Examples& ex);
double Accuracy(std::span<const double> theta, const Examples& ex);
// sum over devices of the full-shard mean loss.
double GlobalLoss(std::span<const double> theta, const Dataset& data);

// Uniform with replacement from ("round", round, "device", device, "batch").
std::vector<std::size_t> SampleBatch(std::size_t rows, std::size_t batch,
                                     std::uint64_t round, std::size_t device,
                                     const MasterSeed& master);

using LossFn = std::function<double(std::span<const double>)>;

// f(theta + gamma phi) - f(theta - gamma phi).
double DeltaF(const LossFn& f, std::span<const double> theta,
              std::span<const double> phi, double gamma);
double DeltaF(const Examples& ex, std::span<const std::size_t> rows,
              std::span<const double> theta, std::span<const double> phi,
              double gamma);

enum class PerturbationLaw {
  kRademacher,        // +-1 entries: b1 = 1, b2 = sqrt(d)
  kScaledRademacher,  // +-1/sqrt(d) entries: b1 = 1/d, b2 = 1
};

std::string PerturbationLawName(PerturbationLaw law);
PerturbationLaw ParsePerturbationLaw(std::string_view name);

struct Perturbation {
  std::vector<double> phi;
  double b1 = 0.0;
  double b2 = 0.0;
};

// Drawn from ("round", round, "perturbation"); every device derives the same
// vector.
Perturbation SharedPerturbation(std::uint64_t round, const MasterSeed& master,
                                std::size_t d,
                                PerturbationLaw law = PerturbationLaw::kRademacher);

struct TrainConfig {
  std::size_t rounds = 400;
  std::size_t batch = 128;
  double eta0 = 0.05;
  double gamma0 = 0.05;
  double eta_exp = 0.5;
  double gamma_exp = 0.25;
  PerturbationLaw law = PerturbationLaw::kRademacher;
  double divergence_threshold = 1e10;
};

struct StepSizes {
  double eta = 0.0;
  double gamma = 0.0;
};

// eta_k = eta0 (1 + k)^-eta_exp, gamma_k = gamma0 (1 + k)^-gamma_exp.
StepSizes Schedules(const TrainConfig& cfg, std::uint64_t k);

struct TrainRecord {
  std::uint64_t round = 0;
  double train_loss = 0.0;
  double test_acc = 0.0;
  double m_k = 0.0;
  double eps_decoded = 0.0;
  double eta_k = 0.0;
  double gamma_k = 0.0;
};

struct TrainSummary {
  double final_test_acc = 0.0;
  double min_loss = 0.0;
  double max_loss = 0.0;
  bool diverged = false;
  std::uint64_t first_divergence_round = 0;  // 0 if never
};

struct TrainTrace {
  std::vector<TrainRecord> records;
  std::vector<RoundOutput> rounds;
  TrainSummary summary;
};

// Rounds are numbered 1..K; round r uses schedule index k = r - 1, and
// round 0 is reserved as the key-setup block of the stale-key baseline.
TrainTrace Train(const TrainConfig& cfg, const ProtocolState& state,
                 const Dataset& data);

}  // namespace airmk

#endif  // AIRMK_ZOFL_H_
