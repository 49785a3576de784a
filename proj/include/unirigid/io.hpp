#pragma once

// Framework files (JSON, 1-based vertex indices):
//
//   { "dimension": 2,
//     "vertices": [[0, 0], [1, 0], ...],
//     "edges": [[1, 2], [2, 3], ...],
//     "name": "optional" }

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unirigid/errors.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"

namespace unirigid {

namespace detail {

inline int json_int(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InvalidInput(where + ": expected an integer");
  return v.get<int>();
}

}  // namespace detail

inline Framework parse_framework(const std::string& text, const ToleranceConfig& cfg = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("top level: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "dimension" && key != "vertices" && key != "edges" && key != "name") {
      throw InvalidInput("unknown field \"" + key + "\"");
    }
  }
  for (const char* key : {"dimension", "vertices", "edges"}) {
    if (!doc.contains(key)) throw InvalidInput(std::string("missing field \"") + key + "\"");
  }
  if (doc.contains("name") && !doc["name"].is_string()) throw InvalidInput("name: expected a string");

  const int r = detail::json_int(doc["dimension"], "dimension");
  if (r < 1) throw InvalidInput("dimension: must be positive");

  const auto& verts = doc["vertices"];
  if (!verts.is_array() || verts.empty()) throw InvalidInput("vertices: expected a nonempty array");
  const int n = static_cast<int>(verts.size());
  Matrix p(n, r);
  for (int i = 0; i < n; ++i) {
    const auto& row = verts[static_cast<std::size_t>(i)];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != r) {
      throw InvalidInput(where + ": expected " + std::to_string(r) + " coordinates");
    }
    for (int k = 0; k < r; ++k) {
      const auto& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw InvalidInput(where + "[" + std::to_string(k) + "]: expected a number");
      p(i, k) = x.get<double>();
    }
  }

  const auto& edges = doc["edges"];
  if (!edges.is_array()) throw InvalidInput("edges: expected an array");
  std::vector<VertexPair> list;
  for (std::size_t m = 0; m < edges.size(); ++m) {
    const auto& e = edges[m];
    const std::string where = "edges[" + std::to_string(m) + "]";
    if (!e.is_array() || e.size() != 2) throw InvalidInput(where + ": expected a pair [i, j]");
    const int a = detail::json_int(e[0], where + "[0]");
    const int b = detail::json_int(e[1], where + "[1]");
    if (a < 1 || a > n || b < 1 || b > n) {
      throw InvalidInput(where + ": vertex index out of range 1.." + std::to_string(n));
    }
    if (a == b) throw InvalidInput(where + ": loop at vertex " + std::to_string(a));
    list.push_back(VertexPair::one_based(a, b));
  }
  try {
    return Framework(Graph(n, list), p, cfg);
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("framework: ") + e.what());
  }
}

inline Framework load_framework(const std::string& path, const ToleranceConfig& cfg = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_framework(buf.str(), cfg);
}

inline nlohmann::ordered_json framework_to_json(const Framework& fw) {
  nlohmann::ordered_json j;
  j["dimension"] = fw.dimension();
  auto verts = nlohmann::ordered_json::array();
  for (Index i = 0; i < fw.config().rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Index k = 0; k < fw.config().cols(); ++k) row.push_back(fw.config()(i, k));
    verts.push_back(row);
  }
  j["vertices"] = verts;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : fw.graph().edges()) edges.push_back({e.i + 1, e.j + 1});
  j["edges"] = edges;
  return j;
}

}  // namespace unirigid
