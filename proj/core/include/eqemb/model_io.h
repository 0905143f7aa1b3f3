// Copyright 2026 The eqemb Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqemb/config.h"
#include "eqemb/trainer.h"

namespace eqemb {

inline constexpr char kModelMagic[8] = {'E', 'Q', 'E', 'M', 'B', 'M', 'D', 'L'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelHeader {
  std::uint32_t version = kModelFormatVersion;
  Mode mode = Mode::kEqEmb;
  std::uint32_t dim = 0;
  std::uint32_t n_words = 0;
  std::uint32_t n_equations = 0;
  std::uint32_t n_units = 0;
  Provenance provenance = Provenance::kNone;
  std::uint64_t seed = 0;
  std::string config_echo;
};

struct ModelFile {
  ModelHeader header;
  ModelTables tables;  // parameters widened from the stored 32-bit floats
};

// Little-endian layout: magic, version, mode, K, vocabulary sizes,
// provenance, seed, config echo, then word rho, word alpha, equation rho,
// equation alpha and (EqEmb-U) unit rho, unit alpha and the unit id list of
// every equation, then an FNV-1a checksum of everything before it.
std::string serialize_model(const TrainedModel& model);
ModelFile deserialize_model(const std::string& bytes);

// Writes through a temporary file and a rename.
void save_model(const TrainedModel& model, const std::string& path);
// Throws Error(kCorrupt) on a bad magic, version, size or checksum.
ModelFile load_model(const std::string& path);

std::string describe_header(const ModelHeader& header);

const char* provenance_name(Provenance p);

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t hash = 0xcbf29ce484222325ULL);

// Replaces `path` with `contents` via a sibling temporary file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace eqemb
