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

#include "airmk/zofl.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "airmk/errors.h"

namespace airmk {
namespace {

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t BigEndian32(const std::vector<std::uint8_t>& b, std::size_t pos,
                          const std::filesystem::path& path) {
  if (pos + 4 > b.size()) throw DataError("truncated IDX header in " + path.string());
  return (std::uint32_t{b[pos]} << 24) | (std::uint32_t{b[pos + 1]} << 16) |
         (std::uint32_t{b[pos + 2]} << 8) | std::uint32_t{b[pos + 3]};
}

double Softplus(double t) {
  // log(1 + e^t)
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

void Shuffle(std::vector<std::size_t>& idx, SeedStream& s) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[s.UniformU64(i)]);
  }
}

Examples Subset(const Examples& ex, std::span<const std::size_t> rows) {
  Examples out;
  out.d = ex.d;
  out.x.reserve(rows.size() * ex.d);
  out.y.reserve(rows.size());
  for (std::size_t r : rows) {
    auto row = ex.row(r);
    out.x.insert(out.x.end(), row.begin(), row.end());
    out.y.push_back(ex.y[r]);
  }
  return out;
}

}  // namespace

MnistPaths MnistPaths::InDirectory(const std::filesystem::path& dir) {
  return MnistPaths{dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
                    dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
}

Examples ReadMnist01(const std::filesystem::path& images,
                     const std::filesystem::path& labels) {
  const std::vector<std::uint8_t> img = ReadFile(images);
  const std::vector<std::uint8_t> lab = ReadFile(labels);
  if (BigEndian32(img, 0, images) != 0x00000803) {
    throw DataError("bad IDX image magic in " + images.string());
  }
  if (BigEndian32(lab, 0, labels) != 0x00000801) {
    throw DataError("bad IDX label magic in " + labels.string());
  }
  const std::size_t count = BigEndian32(img, 4, images);
  const std::size_t rows = BigEndian32(img, 8, images);
  const std::size_t cols = BigEndian32(img, 12, images);
  const std::size_t lcount = BigEndian32(lab, 4, labels);
  if (count != lcount) {
    throw DataError("image count " + std::to_string(count) + " does not match label count " +
                    std::to_string(lcount));
  }
  const std::size_t pixels = rows * cols;
  if (img.size() != 16 + count * pixels || lab.size() != 8 + count) {
    throw DataError("IDX payload size does not match its header");
  }
  Examples ex;
  ex.d = pixels + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t label = lab[8 + i];
    if (label > 1) continue;
    const std::uint8_t* p = img.data() + 16 + i * pixels;
    for (std::size_t j = 0; j < pixels; ++j) ex.x.push_back(p[j] / 255.0);
    ex.x.push_back(1.0);
    ex.y.push_back(label == 1 ? 1.0 : -1.0);
  }
  return ex;
}

Dataset LoadMnist01(const MnistPaths& paths, std::size_t num_devices,
                    const MasterSeed& master) {
  if (num_devices == 0) throw InvalidParameter("need at least one device");
  Examples train = ReadMnist01(paths.train_images, paths.train_labels);
  Dataset data;
  data.d = train.d;
  data.test = ReadMnist01(paths.test_images, paths.test_labels);
  if (data.test.d != data.d) throw DataError("train and test image sizes differ");
  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeedStream s(master, {"data", "shard"});
  Shuffle(idx, s);
  const std::size_t per = idx.size() / num_devices;
  if (per == 0) throw DataError("fewer examples than devices");
  for (std::size_t i = 0; i < num_devices; ++i) {
    data.shards.push_back(Subset(train, std::span(idx).subspan(i * per, per)));
  }
  return data;
}

Dataset MakeSynthetic(const SyntheticConfig& cfg, std::size_t num_devices,
                      const MasterSeed& master) {
  if (cfg.d < 2) throw InvalidParameter("synthetic data needs d >= 2");
  if (num_devices == 0) throw InvalidParameter("need at least one device");
  const std::size_t f = cfg.d - 1;
  SeedStream dir(master, {"data", "synthetic", "direction"});
  std::vector<double> u(f);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& v : u) v = dir.Gaussian();
    norm = std::sqrt(Dot(u, u));
  }
  for (auto& v : u) v /= norm;
  auto make = [&](std::size_t count, SeedStream& s) {
    Examples ex;
    ex.d = cfg.d;
    for (std::size_t i = 0; i < count; ++i) {
      const double y = (i % 2 == 0) ? 1.0 : -1.0;
      for (std::size_t j = 0; j < f; ++j) {
        ex.x.push_back(y * 0.5 * cfg.separation * u[j] + s.Gaussian());
      }
      ex.x.push_back(1.0);
      ex.y.push_back(y);
    }
    return ex;
  };
  Dataset data;
  data.d = cfg.d;
  for (std::size_t i = 0; i < num_devices; ++i) {
    SeedStream s(master, {"data", "synthetic", "device", i});
    data.shards.push_back(make(cfg.train_per_device, s));
  }
  SeedStream ts(master, {"data", "synthetic", "test"});
  data.test = make(cfg.test_size, ts);
  return data;
}

double LocalLoss(std::span<const double> theta, const Examples& ex,
                 std::span<const std::size_t> rows) {
  if (theta.size() != ex.d) throw InvalidParameter("loss: dimension mismatch");
  if (rows.empty()) throw EmptyInput("loss: empty batch");
  double s = 0.0;
  for (std::size_t r : rows) s += Softplus(-ex.y[r] * Dot(ex.row(r), theta));
  return s / static_cast<double>(rows.size());
}

double MeanLoss(std::span<const double> theta, const Examples& ex) {
  if (theta.size() != ex.d) throw InvalidParameter("loss: dimension mismatch");
  if (ex.size() == 0) throw EmptyInput("loss: no examples");
  double s = 0.0;
  for (std::size_t r = 0; r < ex.size(); ++r) s += Softplus(-ex.y[r] * Dot(ex.row(r), theta));
  return s / static_cast<double>(ex.size());
}

double Accuracy(std::span<const double> theta, const Examples& ex) {
  if (theta.size() != ex.d) throw InvalidParameter("accuracy: dimension mismatch");
  if (ex.size() == 0) return 0.0;
  std::size_t hit = 0;
  for (std::size_t r = 0; r < ex.size(); ++r) {
    if (ex.y[r] * Dot(ex.row(r), theta) > 0.0) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(ex.size());
}

double GlobalLoss(std::span<const double> theta, const Dataset& data) {
  double s = 0.0;
  for (const auto& shard : data.shards) s += MeanLoss(theta, shard);
  return s;
}

std::vector<std::size_t> SampleBatch(std::size_t rows, std::size_t batch,
                                     std::uint64_t round, std::size_t device,
                                     const MasterSeed& master) {
  if (rows == 0) throw EmptyInput("batch: empty shard");
  SeedStream s(master, {"round", round, "device", device, "batch"});
  std::vector<std::size_t> out(batch);
  for (auto& r : out) r = s.UniformU64(rows);
  return out;
}

double DeltaF(const LossFn& f, std::span<const double> theta,
              std::span<const double> phi, double gamma) {
  if (theta.size() != phi.size()) throw InvalidParameter("delta_f: dimension mismatch");
  std::vector<double> plus(theta.size()), minus(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    plus[j] = theta[j] + gamma * phi[j];
    minus[j] = theta[j] - gamma * phi[j];
  }
  return f(plus) - f(minus);
}

double DeltaF(const Examples& ex, std::span<const std::size_t> rows,
              std::span<const double> theta, std::span<const double> phi,
              double gamma) {
  return DeltaF([&](std::span<const double> t) { return LocalLoss(t, ex, rows); },
                theta, phi, gamma);
}

std::string PerturbationLawName(PerturbationLaw law) {
  return law == PerturbationLaw::kRademacher ? "rademacher" : "scaled-rademacher";
}

PerturbationLaw ParsePerturbationLaw(std::string_view name) {
  if (name == "rademacher") return PerturbationLaw::kRademacher;
  if (name == "scaled-rademacher") return PerturbationLaw::kScaledRademacher;
  throw InvalidParameter("unknown perturbation law '" + std::string(name) + "'");
}

Perturbation SharedPerturbation(std::uint64_t round, const MasterSeed& master,
                                std::size_t d, PerturbationLaw law) {
  if (d == 0) throw InvalidParameter("perturbation: d must be positive");
  SeedStream s(master, {"round", round, "perturbation"});
  const double dd = static_cast<double>(d);
  const double mag = law == PerturbationLaw::kRademacher ? 1.0 : 1.0 / std::sqrt(dd);
  Perturbation p;
  p.phi.resize(d);
  for (auto& v : p.phi) v = mag * s.Sign();
  p.b1 = mag * mag;
  p.b2 = mag * std::sqrt(dd);
  return p;
}

StepSizes Schedules(const TrainConfig& cfg, std::uint64_t k) {
  const double base = 1.0 + static_cast<double>(k);
  return StepSizes{cfg.eta0 * std::pow(base, -cfg.eta_exp),
                   cfg.gamma0 * std::pow(base, -cfg.gamma_exp)};
}

TrainTrace Train(const TrainConfig& cfg, const ProtocolState& state,
                 const Dataset& data) {
  if (cfg.rounds < 1) throw InvalidParameter("train: rounds must be >= 1");
  if (cfg.batch < 1) throw InvalidParameter("train: batch must be >= 1");
  if (!(cfg.eta0 > 0.0) || !(cfg.gamma0 > 0.0)) {
    throw InvalidParameter("train: eta0 and gamma0 must be positive");
  }
  const std::size_t N = state.num_devices();
  if (data.shards.size() != N) throw InvalidParameter("train: one shard per device required");

  TrainTrace trace;
  std::vector<double> theta(data.d, 0.0);
  std::vector<double> delta(N);
  for (std::uint64_t r = 1; r <= cfg.rounds; ++r) {
    const StepSizes st = Schedules(cfg, r - 1);
    const Perturbation phi = SharedPerturbation(r, state.master(), data.d, cfg.law);
    for (std::size_t i = 0; i < N; ++i) {
      const auto rows = SampleBatch(data.shards[i].size(), cfg.batch, r, i, state.master());
      delta[i] = DeltaF(data.shards[i], rows, theta, phi.phi, st.gamma);
    }
    RoundOutput out = RunRound(state, delta, r);
    for (std::size_t j = 0; j < data.d; ++j) theta[j] -= st.eta * phi.phi[j] * out.m_decoded;

    TrainRecord rec;
    rec.round = r;
    rec.train_loss = GlobalLoss(theta, data);
    rec.test_acc = Accuracy(theta, data.test);
    rec.m_k = out.m_decoded;
    rec.eps_decoded = out.eps_decoded;
    rec.eta_k = st.eta;
    rec.gamma_k = st.gamma;
    const bool bad = !std::isfinite(rec.train_loss) || rec.train_loss > cfg.divergence_threshold;
    if (bad && !trace.summary.diverged) {
      trace.summary.diverged = true;
      trace.summary.first_divergence_round = r;
    }
    trace.records.push_back(rec);
    trace.rounds.push_back(std::move(out));
  }
  TrainSummary& s = trace.summary;
  s.final_test_acc = trace.records.back().test_acc;
  s.min_loss = s.max_loss = trace.records.front().train_loss;
  for (const auto& rec : trace.records) {
    s.min_loss = std::min(s.min_loss, rec.train_loss);
    s.max_loss = std::max(s.max_loss, rec.train_loss);
  }
  return trace;
}

}  // namespace airmk
