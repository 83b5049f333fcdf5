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

/**
 * @file experiment.hpp
 * @brief Config-driven experiments and suites behind the qqm command line.
 *
 * Every experiment produces a list of check records. A record compares a
 * measured deviation against a tolerance (or, for witnesses, requires it to
 * exceed a threshold). Diagnostic records are informational and always pass.
 * Reports are deterministic for a fixed config; wall time and the UTC stamp
 * live under the single "timestamp" key.
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qqm/quat.hpp"

namespace qqm {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind {
  AlgebraLaws,
  MeasurementInvariants,
  GaugeSweep,
  DegreeConstraint,
  Evolution,
  Oscillator,
  GridMomentum,
};

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept;
const std::vector<ExperimentKind>& all_experiments();

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::AlgebraLaws;
  std::uint64_t seed = 0;
  std::vector<std::size_t> dims;  // empty: experiment default
  std::size_t trials = 0;         // 0: experiment default
  Quaternion eta = kE1;
  double omega = 1.0;
  std::size_t truncation = 12;
  std::vector<int> modes;  // empty: one-mode and two-mode runs
  std::size_t grid_points = 256;
  bool violate_superselection = false;
  std::map<std::string, double> tolerances;  // overrides by record name
  std::string output_dir;                    // empty: nothing written
};

/// Throws ConfigInvalid naming the offending field, e.g. "suite.experiments[2].eta".
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& path = "config");
nlohmann::json config_to_json(const ExperimentConfig& config);

enum class Comparison { AtMost, Exceeds };

struct CheckRecord {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::AtMost;
  bool diagnostic = false;
  bool pass = false;
  std::string note;
};

struct Report {
  std::string experiment;
  nlohmann::json config;
  std::vector<CheckRecord> records;
  bool pass = false;
  std::string error;  // set when the experiment threw
  std::vector<std::string> artifacts;
  double wall_time_ms = 0.0;
  std::string timestamp_utc;

  const CheckRecord* find(std::string_view name) const;
};

nlohmann::json report_to_json(const Report& report);
/// The report without its "timestamp" member.
nlohmann::json deterministic_view(const nlohmann::json& report);

/// Runs one experiment. When config.output_dir is set, writes report.json
/// and trace CSVs there (IoError on failure).
Report run(const ExperimentConfig& config);

struct SuiteResult {
  std::vector<Report> reports;
  bool pass = true;
  nlohmann::json summary;
};

/// Suite JSON: {"seed": n, "output_dir": path, "experiments": [config, ...]}.
/// Experiments without their own seed get derive_seed(seed, index).
/// `output_override`, when non-empty, replaces the suite output_dir. Runs
/// experiments concurrently, capped by QQM_THREADS.
SuiteResult run_suite(const nlohmann::json& suite, const std::string& output_override = "");
SuiteResult run_suite_file(const std::filesystem::path& path, const std::string& output_override = "");

std::uint64_t derive_seed(std::uint64_t suite_seed, std::uint64_t index) noexcept;
/// QQM_THREADS if set to a positive integer, otherwise the OpenMP default.
int suite_threads();

}  // namespace qqm
