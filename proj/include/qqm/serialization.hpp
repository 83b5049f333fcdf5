// Copyright 2026 The qqm Authors
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

// JSON import/export for tables and gauge phases. Quaternions are
// [w, x, y, z] arrays and bases {"id": string, "size": int}; doubles are
// written in shortest round-trip form, so load(save(x)) is bit-exact.

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qqm/measurement.hpp"

namespace qqm {

void to_json(nlohmann::json& j, const Quaternion& q);
void from_json(const nlohmann::json& j, Quaternion& q);

void to_json(nlohmann::json& j, const BasisLabel& b);
void from_json(const nlohmann::json& j, BasisLabel& b);

void to_json(nlohmann::json& j, const TransformationTable& t);
void from_json(const nlohmann::json& j, TransformationTable& t);

void to_json(nlohmann::json& j, const GaugePhase& g);
void from_json(const nlohmann::json& j, GaugePhase& g);

/// Throws IoError / ParseError.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

TransformationTable load_table(const std::filesystem::path& path);
void save_table(const std::filesystem::path& path, const TransformationTable& t);
GaugePhase load_phase(const std::filesystem::path& path);
void save_phase(const std::filesystem::path& path, const GaugePhase& g);

/// "%.17g".
std::string format_double(double v);

}  // namespace qqm
