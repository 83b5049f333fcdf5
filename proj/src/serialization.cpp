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

#include "qqm/serialization.hpp"

#include <cstdio>
#include <fstream>

#include "qqm/error.hpp"

namespace qqm {

using nlohmann::json;

namespace {

template <typename T>
T parse_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

void to_json(json& j, const Quaternion& q) { j = json::array({q.w, q.x, q.y, q.z}); }

void from_json(const json& j, Quaternion& q) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::ParseError, "quaternion must be [w,x,y,z]");
  for (int k = 0; k < 4; ++k) q[k] = parse_as<double>(j[static_cast<std::size_t>(k)], "quaternion component");
}

void to_json(json& j, const BasisLabel& b) { j = json{{"id", b.id}, {"size", b.size}}; }

void from_json(const json& j, BasisLabel& b) {
  if (!j.is_object() || !j.contains("id") || !j.contains("size")) {
    throw Error(ErrorCode::ParseError, "basis needs id and size");
  }
  b = BasisLabel(parse_as<std::string>(j["id"], "basis id"), parse_as<std::size_t>(j["size"], "basis size"));
}

void to_json(json& j, const TransformationTable& t) {
  json rows = json::array();
  for (std::size_t a = 0; a < t.entries.rows(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < t.entries.cols(); ++b) row.push_back(t.at(a, b));
    rows.push_back(std::move(row));
  }
  j = json{{"to_basis", t.to_basis}, {"from_basis", t.from_basis}, {"entries", std::move(rows)}};
}

void from_json(const json& j, TransformationTable& t) {
  if (!j.is_object() || !j.contains("to_basis") || !j.contains("from_basis") || !j.contains("entries")) {
    throw Error(ErrorCode::ParseError, "table needs to_basis, from_basis and entries");
  }
  const auto to = j["to_basis"].get<BasisLabel>();
  const auto from = j["from_basis"].get<BasisLabel>();
  const json& rows = j["entries"];
  if (!rows.is_array() || rows.size() != to.size) throw Error(ErrorCode::ParseError, "entries row count");
  HMatrix m(to.size, from.size);
  for (std::size_t a = 0; a < to.size; ++a) {
    if (!rows[a].is_array() || rows[a].size() != from.size) throw Error(ErrorCode::ParseError, "entries column count");
    for (std::size_t b = 0; b < from.size; ++b) m(a, b) = rows[a][b].get<Quaternion>();
  }
  t = TransformationTable(to, from, std::move(m));
}

void to_json(json& j, const GaugePhase& g) {
  json lambdas = json::array();
  for (const auto& l : g.lambdas) lambdas.push_back(l.value());
  j = json{{"basis", g.basis}, {"lambdas", std::move(lambdas)}};
}

void from_json(const json& j, GaugePhase& g) {
  if (!j.is_object() || !j.contains("basis") || !j.contains("lambdas") || !j["lambdas"].is_array()) {
    throw Error(ErrorCode::ParseError, "phase needs basis and lambdas");
  }
  const auto basis = j["basis"].get<BasisLabel>();
  std::vector<UnitQuaternion> lambdas;
  for (const auto& l : j["lambdas"]) lambdas.emplace_back(l.get<Quaternion>());
  g = GaugePhase(basis, std::move(lambdas));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

TransformationTable load_table(const std::filesystem::path& path) { return read_json_file(path).get<TransformationTable>(); }
void save_table(const std::filesystem::path& path, const TransformationTable& t) { write_json_file(path, json(t)); }
GaugePhase load_phase(const std::filesystem::path& path) { return read_json_file(path).get<GaugePhase>(); }
void save_phase(const std::filesystem::path& path, const GaugePhase& g) { write_json_file(path, json(g)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace qqm
