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

#ifndef AIRMK_TRACE_IO_H_
#define AIRMK_TRACE_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airmk/protocol.h"
#include "airmk/zofl.h"

namespace airmk {

struct RunManifest {
  std::string command;
  std::string profile;
  std::string mode;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> settings;
  std::vector<std::string> outputs;  // file names inside the output directory
  std::string version;
  std::string output_dir;  // not hashed
  std::string wall_clock;  // not hashed
};

// Hex BLAKE2b-256 of the canonical JSON of the reproducible manifest fields.
std::string ManifestHash(const RunManifest& m);
std::string ManifestJson(const RunManifest& m);

// Round trace with columns round, mode, M_k, eps_decoded, margin, wall_time.
// wall_time is written as 0 unless include_timing is set, so repeated runs
// produce identical bytes.
std::string RoundTraceCsv(std::span<const RoundOutput> rounds,
                          const std::string& manifest_hash, bool include_timing);
std::string RoundTraceJsonl(std::span<const RoundOutput> rounds,
                            const std::string& manifest_hash, bool include_timing);

// Columns round, train_loss, test_acc, M_k, eps_decoded, eta_k, gamma_k.
std::string TrainTraceCsv(std::span<const TrainRecord> records,
                          const std::string& manifest_hash);

// Writes to a temporary sibling and renames it over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

// Library version plus the git description of the source tree at configure
// time, when available.
std::string Version();

// Shortest round-trip decimal form of a double.
std::string FormatDouble(double v);

}  // namespace airmk

#endif  // AIRMK_TRACE_IO_H_
