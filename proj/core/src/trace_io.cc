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

#include "airmk/trace_io.h"

#include <sodium.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "airmk/errors.h"

namespace airmk {
namespace {

constexpr const char* kSchema = "airmk-trace-1";

nlohmann::ordered_json HashedFields(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["profile"] = m.profile;
  j["mode"] = m.mode;
  j["master_seed"] = m.master_seed;
  j["settings"] = m.settings;
  j["outputs"] = m.outputs;
  j["version"] = m.version;
  return j;
}

std::string JsonNumber(double v) {
  // JSON has no inf/nan; they only appear after a diverged decode.
  if (!std::isfinite(v)) return "null";
  return FormatDouble(v);
}

}  // namespace

std::string Version() {
  std::string v = AIRMK_VERSION;
  const std::string git = AIRMK_GIT_DESCRIBE;
  if (!git.empty()) v += "+" + git;
  return v;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ManifestHash(const RunManifest& m) {
  if (sodium_init() < 0) throw Error("libsodium initialization failed");
  const std::string canon = HashedFields(m).dump();
  unsigned char out[32];
  crypto_generichash(out, sizeof(out), reinterpret_cast<const unsigned char*>(canon.data()),
                     canon.size(), nullptr, 0);
  char hex[65];
  sodium_bin2hex(hex, sizeof(hex), out, sizeof(out));
  return std::string(hex);
}

std::string ManifestJson(const RunManifest& m) {
  nlohmann::ordered_json j = HashedFields(m);
  j["hash"] = ManifestHash(m);
  j["output_dir"] = m.output_dir;
  j["wall_clock"] = m.wall_clock;
  return j.dump(2) + "\n";
}

std::string RoundTraceCsv(std::span<const RoundOutput> rounds,
                          const std::string& manifest_hash, bool include_timing) {
  std::string out = "# manifest " + manifest_hash + "\n";
  out += "round,mode,M_k,eps_decoded,margin,wall_time\n";
  for (const auto& r : rounds) {
    out += std::to_string(r.round) + "," + ModeName(r.mode) + "," + FormatDouble(r.m_decoded) +
           "," + FormatDouble(r.eps_decoded) + "," + FormatDouble(r.margin) + "," +
           FormatDouble(include_timing ? r.wall_time_s : 0.0) + "\n";
  }
  return out;
}

std::string RoundTraceJsonl(std::span<const RoundOutput> rounds,
                            const std::string& manifest_hash, bool include_timing) {
  std::string out = "{\"manifest\":\"" + manifest_hash + "\",\"schema\":\"" + kSchema + "\"}\n";
  for (const auto& r : rounds) {
    out += "{\"round\":" + std::to_string(r.round) + ",\"mode\":\"" + ModeName(r.mode) +
           "\",\"M_k\":" + JsonNumber(r.m_decoded) + ",\"eps_decoded\":" +
           JsonNumber(r.eps_decoded) + ",\"margin\":" + JsonNumber(r.margin) +
           ",\"wall_time\":" + JsonNumber(include_timing ? r.wall_time_s : 0.0) + "}\n";
  }
  return out;
}

std::string TrainTraceCsv(std::span<const TrainRecord> records,
                          const std::string& manifest_hash) {
  std::string out = "# manifest " + manifest_hash + "\n";
  out += "round,train_loss,test_acc,M_k,eps_decoded,eta_k,gamma_k\n";
  for (const auto& r : records) {
    out += std::to_string(r.round) + "," + FormatDouble(r.train_loss) + "," +
           FormatDouble(r.test_acc) + "," + FormatDouble(r.m_k) + "," +
           FormatDouble(r.eps_decoded) + "," + FormatDouble(r.eta_k) + "," +
           FormatDouble(r.gamma_k) + "\n";
  }
  return out;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace airmk
