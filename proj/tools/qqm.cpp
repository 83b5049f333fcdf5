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

// qqm: run quaternionic QM experiments from JSON configs.
//
//   qqm run --config <file> [--experiment <name>] [--seed <n>] [--out <dir>]
//           [--eta x,y,z] [--trials <n>]
//   qqm suite <file> [--out <dir>]
//   qqm list
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on a
// config or I/O error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qqm/error.hpp"
#include "qqm/experiment.hpp"
#include "qqm/serialization.hpp"

namespace {

void print_report(const qqm::Report& r) {
  std::printf("%s  %s  (%.0f ms)\n", r.pass ? "PASS" : "FAIL", r.experiment.c_str(), r.wall_time_ms);
  for (const auto& rec : r.records) {
    const char* status = rec.diagnostic ? "info" : rec.pass ? "ok  " : "FAIL";
    const char* op = rec.comparison == qqm::Comparison::AtMost ? "<=" : ">";
    if (rec.diagnostic) {
      std::printf("  %s %-48s %.3e\n", status, rec.name.c_str(), rec.max_deviation);
    } else {
      std::printf("  %s %-48s %.3e %s %.1e\n", status, rec.name.c_str(), rec.max_deviation, op, rec.tolerance);
    }
  }
  if (!r.error.empty()) std::printf("  error: %s\n", r.error.c_str());
}

nlohmann::json parse_eta(const std::string& text) {
  nlohmann::json arr = nlohmann::json::array();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      arr.push_back(v);
    } catch (const std::exception&) {
      throw qqm::Error(qqm::ErrorCode::ConfigInvalid, "--eta: cannot parse '" + part + "'");
    }
  }
  if (arr.size() != 3) throw qqm::Error(qqm::ErrorCode::ConfigInvalid, "--eta: expected x,y,z");
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternionic quantum mechanics experiments"};
  app.require_subcommand(1);

  std::string config_path, experiment, out_dir, eta;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "Experiment config (JSON object)");
  run->add_option("--experiment", experiment, "Experiment name, overrides the config");
  auto* seed_opt = run->add_option("--seed", seed, "RNG seed");
  run->add_option("--out", out_dir, "Output directory for report.json and traces");
  run->add_option("--eta", eta, "Imaginary unit as x,y,z");
  auto* trials_opt = run->add_option("--trials", trials, "Number of random trials");

  std::string suite_path, suite_out;
  auto* suite = app.add_subcommand("suite", "Run every experiment listed in a suite file");
  suite->add_option("file", suite_path, "Suite config (JSON)")->required();
  suite->add_option("--out", suite_out, "Output directory, overrides the suite file");

  auto* list = app.add_subcommand("list", "List experiment names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (auto kind : qqm::all_experiments()) std::printf("%s\n", std::string(qqm::to_string(kind)).c_str());
      return 0;
    }
    if (run->parsed()) {
      nlohmann::json j = config_path.empty() ? nlohmann::json::object() : qqm::read_json_file(config_path);
      if (!j.is_object()) throw qqm::Error(qqm::ErrorCode::ConfigInvalid, "config: expected an object");
      if (!experiment.empty()) j["experiment"] = experiment;
      if (seed_opt->count() > 0) j["seed"] = seed;
      if (!out_dir.empty()) j["output_dir"] = out_dir;
      if (!eta.empty()) j["eta"] = parse_eta(eta);
      if (trials_opt->count() > 0) j["trials"] = trials;
      const qqm::Report report = qqm::run(qqm::parse_config(j));
      print_report(report);
      return report.pass ? 0 : 1;
    }
    const qqm::SuiteResult result = qqm::run_suite_file(suite_path, suite_out);
    for (const auto& r : result.reports) print_report(r);
    std::printf("%s  suite: %zu experiment(s)\n", result.pass ? "PASS" : "FAIL", result.reports.size());
    return result.pass ? 0 : 1;
  } catch (const qqm::Error& e) {
    std::fprintf(stderr, "qqm: %s\n", e.what());
    return 2;
  }
}
