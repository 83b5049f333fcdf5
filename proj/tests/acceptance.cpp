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

// Acceptance runner: executes the default suite and checks each criterion
// against its own thresholds, independent of the tolerances in the reports.
//
// usage: qqm_acceptance <suite.json> <output dir> [qqm executable]

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qqm/error.hpp"
#include "qqm/experiment.hpp"
#include "qqm/serialization.hpp"

namespace {

using qqm::CheckRecord;
using qqm::Comparison;
using qqm::Report;
using qqm::SuiteResult;

struct Bound {
  std::string record;  // exact name, or a prefix when ending in '*'
  double limit;
  Comparison comparison = Comparison::AtMost;
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

bool matches(const std::string& pattern, const std::string& name) {
  if (!pattern.empty() && pattern.back() == '*') return name.starts_with(pattern.substr(0, pattern.size() - 1));
  return name == pattern;
}

// Every report of `experiment` must contain each bound, and every matching
// record must meet it.
void check_bounds(const SuiteResult& suite, const std::string& experiment, const std::vector<Bound>& bounds,
                  Outcome& out) {
  bool any_report = false;
  for (const Report& r : suite.reports) {
    if (r.experiment != experiment) continue;
    any_report = true;
    if (!r.error.empty()) out.fail(experiment + " error: " + r.error);
    for (const Bound& b : bounds) {
      bool found = false;
      for (const CheckRecord& rec : r.records) {
        if (!matches(b.record, rec.name)) continue;
        found = true;
        const bool ok = b.comparison == Comparison::AtMost ? rec.max_deviation <= b.limit : rec.max_deviation > b.limit;
        if (!ok) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "%s = %.3e (limit %.1e)", rec.name.c_str(), rec.max_deviation, b.limit);
          out.fail(buf);
        }
      }
      if (!found) out.fail(experiment + " lacks " + b.record);
    }
  }
  if (!any_report) out.fail("suite has no " + experiment + " run");
}

void check_runtime(const SuiteResult& suite, const std::string& experiment, double limit_ms, Outcome& out) {
  double total = 0.0;
  for (const Report& r : suite.reports) {
    if (r.experiment == experiment) total += r.wall_time_ms;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.0f ms", experiment.c_str(), total);
  if (total >= limit_ms) out.fail(std::string(buf) + " over " + std::to_string(static_cast<int>(limit_ms)) + " ms");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string(buf);
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <suite.json> <output dir> [qqm executable]\n", argv[0]);
    return 2;
  }
  const std::filesystem::path suite_path = argv[1];
  const std::filesystem::path out_dir = argv[2];
  const std::string cli = argc > 3 ? argv[3] : "";

  SuiteResult suite;
  try {
    suite = qqm::run_suite_file(suite_path, (out_dir / "library").string());
  } catch (const qqm::Error& e) {
    std::printf("criterion 0: FAIL  suite could not run: %s\n", e.what());
    return 1;
  }

  using C = Comparison;
  std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria;

  criteria.emplace_back("measurement algebra axioms", [&](Outcome& o) {
    check_bounds(suite, "measurement_invariants",
                 {{"symbol_index_structure", 0.0}, {"symbol_idempotence", 1e-12}, {"symbol_orthogonality", 1e-12},
                  {"symbol_delta_composition", 1e-12}, {"symbol_product_law", 1e-12}, {"symbol_completeness", 1e-12},
                  {"symbol_resolution_of_identity", 1e-12}, {"symbol_associativity", 1e-12},
                  {"symbol_distributivity", 1e-12}},
                 o);
    check_runtime(suite, "measurement_invariants", 5000.0, o);
  });
  criteria.emplace_back("gauge invariance and sandwich identity", [&](Outcome& o) {
    check_bounds(suite, "gauge_sweep",
                 {{"gauge_invariance_probability", 1e-12}, {"sandwich_real_part", 1e-12},
                  {"sandwich_imaginary_norm", 1e-12}, {"sandwich_gauge_invariance", 1e-12},
                  {"gauge_symbol_covariance", 1e-12}},
                 o);
    check_runtime(suite, "gauge_sweep", 10000.0, o);
  });
  criteria.emplace_back("probability measure axioms", [&](Outcome& o) {
    check_bounds(suite, "gauge_sweep",
                 {{"probability_nonnegative", 0.0}, {"probability_symmetry", 1e-12},
                  {"probability_normalization", 1e-10}},
                 o);
  });
  criteria.emplace_back("adjoint laws", [&](Outcome& o) {
    check_bounds(suite, "algebra_laws",
                 {{"adjoint_product", 1e-12}, {"adjoint_scalar", 1e-12}, {"symbol_selective_self_adjoint", 0.0}}, o);
    check_bounds(suite, "measurement_invariants", {{"symbol_adjoint_product", 1e-12}}, o);
  });
  criteria.emplace_back("iota operator conditions", [&](Outcome& o) {
    check_bounds(suite, "algebra_laws",
                 {{"iota_anti_hermitian", 0.0}, {"iota_unitary", 1e-15}, {"generator_anti_hermitian", 1e-12},
                  {"first_order_unitarity", 1e-7}},
                 o);
  });
  criteria.emplace_back("Heisenberg algebra", [&](Outcome& o) {
    check_bounds(suite, "oscillator", {{"fock_pair_ccr_n12", 1e-10}}, o);
    check_bounds(suite, "grid_momentum", {{"grid_pair_ccr", 1e-8}}, o);
    check_bounds(suite, "evolution", {{"heisenberg_finite_difference", 1e-8}}, o);
  });
  criteria.emplace_back("Schrodinger evolution", [&](Outcome& o) {
    check_bounds(suite, "evolution",
                 {{"evolution_norm_drift", 1e-9}, {"evolution_energy_drift", 1e-9}, {"evolution_group_law", 1e-9},
                  {"evolution_reversibility", 1e-9}, {"evolution_complex_subring", 1e-10}},
                 o);
    check_runtime(suite, "evolution", 30000.0, o);
  });
  criteria.emplace_back("superselection witness", [&](Outcome& o) {
    check_bounds(suite, "evolution", {{"superselection_witness_norm_drift", 1e-6, C::Exceeds},
                                      {"superselection_rejected", 0.0}},
                 o);
    // A config that breaks the rule on purpose must fail its run.
    const nlohmann::json violation = {
        {"seed", 1}, {"experiments", {{{"experiment", "evolution"}, {"trials", 10}, {"violate_superselection", true}}}}};
    const SuiteResult bad = qqm::run_suite(violation);
    const CheckRecord* rec = bad.reports.at(0).find("superselection_respected");
    if (bad.pass || rec == nullptr || rec->pass) o.fail("violating config did not fail superselection_respected");
  });
  criteria.emplace_back("oscillator", [&](Outcome& o) {
    check_bounds(suite, "oscillator",
                 {{"oscillator_ccr_interior_*", 1e-10}, {"oscillator_spectrum_*", 1e-9},
                  {"oscillator_ehrenfest_*", 1e-6}},
                 o);
    check_runtime(suite, "oscillator", 30000.0, o);
  });
  criteria.emplace_back("grid momentum representation", [&](Outcome& o) {
    check_bounds(suite, "grid_momentum",
                 {{"grid_momentum_consistency", 1e-12}, {"grid_momentum_convergence", 0.1},
                  {"grid_plane_wave_convergence", 0.1}, {"grid_momentum_constant", 1e-10}},
                 o);
  });
  criteria.emplace_back("full suite", [&](Outcome& o) {
    if (!suite.pass) o.fail("library suite run failed");
    if (cli.empty()) {
      const SuiteResult again = qqm::run_suite_file(suite_path, (out_dir / "library").string());
      if (qqm::deterministic_view(again.summary) != qqm::deterministic_view(suite.summary)) o.fail("rerun differs");
      return;
    }
    const std::filesystem::path cli_out = out_dir / "cli";
    const std::string cmd = cli + " suite " + suite_path.string() + " --out " + cli_out.string() + " > /dev/null";
    nlohmann::json first;
    for (int pass = 0; pass < 2; ++pass) {
      const auto start = std::chrono::steady_clock::now();
      const int code = run_command(cmd);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      char buf[96];
      std::snprintf(buf, sizeof buf, "qqm suite run %d: exit %d, %.0f ms", pass + 1, code, ms);
      o.detail += (o.detail.empty() ? "" : "; ") + std::string(buf);
      if (code != 0) o.fail("nonzero exit");
      if (ms >= 120000.0) o.fail("over 120 s");
      const nlohmann::json summary = qqm::deterministic_view(qqm::read_json_file(cli_out / "summary.json"));
      if (pass == 0) {
        first = summary;
      } else if (summary != first) {
        o.fail("rerun differs");
      }
    }
  });

  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
    all = all && o.pass;
    std::printf("criterion %zu: %s  %s%s%s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.empty() ? "" : "  [", o.detail.empty() ? "" : (o.detail + "]").c_str());
  }
  return all ? 0 : 1;
}
