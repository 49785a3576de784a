#pragma once

// JSON rendering of certificates, reports, stress matrices and oracle runs.
// Keys are emitted in a fixed order so reports diff cleanly.

#include <cmath>
#include <map>
#include <string>
#include <variant>

#include <json.hpp>

#include "unirigid/certify.hpp"
#include "unirigid/oracle.hpp"
#include "unirigid/stress.hpp"

namespace unirigid {

using Json = nlohmann::ordered_json;

namespace detail {

/// Rounding noise below 1e-13 of the largest entry is printed as 0.
inline double chop(double x, double scale) { return std::abs(x) <= 1e-13 * std::max(1.0, scale) ? 0.0 : x; }

inline Json matrix_json(const Matrix& m) {
  const double s = max_abs(m);
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(chop(m(i, k), s));
    rows.push_back(row);
  }
  return rows;
}

inline Json y_json(const Vector& y, const std::vector<VertexPair>& missing) {
  const double s = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
  Json j = Json::object();
  for (std::size_t k = 0; k < missing.size(); ++k) j[missing[k].label()] = chop(y(static_cast<Index>(k)), s);
  return j;
}

}  // namespace detail

inline Json to_json(const ToleranceConfig& cfg) {
  return Json{{"rank_tol", cfg.rank_tol}, {"psd_tol", cfg.psd_tol}, {"solver_tol", cfg.solver_tol},
              {"max_iters", cfg.max_iters}};
}

inline Json to_json(const StressMatrix& s) {
  return Json{{"rank", s.rank}, {"psd", s.psd}, {"omega", detail::matrix_json(s.omega.matrix())}};
}

inline Json to_json(const PsdStressSearch& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["stress_space_dim"] = s.stress_space_dim;
  j["objective"] = std::isfinite(s.objective) ? Json(s.objective) : Json(nullptr);
  j["iterations"] = s.iterations;
  j["stress"] = s.stress ? to_json(*s.stress) : Json(nullptr);
  return j;
}

inline Json witness_json(const Witness& w, const std::vector<VertexPair>& missing) {
  return std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, StressWitness>) {
          Json j{{"kind", "stress"}};
          j.update(to_json(v.stress));
          return j;
        } else if constexpr (std::is_same_v<T, MotionWitness>) {
          return Json{{"kind", "y"}, {"y", detail::y_json(v.y, missing)}, {"residual", v.residual}};
        } else if constexpr (std::is_same_v<T, FrameworkWitness>) {
          return Json{{"kind", "framework"},
                      {"dimension", v.dimension},
                      {"edge_residual", v.edge_residual},
                      {"vertices", detail::matrix_json(v.configuration)}};
        } else {
          return Json{{"kind", "face"},
                      {"dimension", v.directions.cols()},
                      {"directions", detail::matrix_json(v.directions.transpose())}};
        }
      },
      w);
}

inline Json to_json(const Certificate& c, const std::vector<VertexPair>& missing) {
  Json j;
  j["property"] = c.property.name();
  j["verdict"] = to_string(c.verdict);
  j["witness"] = witness_json(c.witness, missing);
  j["tolerances"] = to_json(c.tolerances);
  j["elapsed_ms"] = c.elapsed_ms ? Json(*c.elapsed_ms) : Json(nullptr);
  j["note"] = c.note;
  return j;
}

inline Json to_json(const Report& r, const Framework& fw) {
  Json j;
  Json f;
  f["vertices"] = fw.vertex_count();
  f["dimension"] = fw.dimension();
  f["edges"] = fw.graph().edges().size();
  Json missing = Json::array();
  for (const auto& p : r.missing) missing.push_back(p.label());
  f["missing_edges"] = missing;
  j["framework"] = f;
  j["stress_search"] = to_json(r.search);
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c, r.missing));
  j["certificates"] = certs;
  return j;
}

inline Json to_json(const OracleResult& o) {
  Json j;
  j["grade"] = "evidence";
  j["target_dim"] = o.target_dim;
  j["restarts"] = o.restarts;
  j["found"] = o.found.size();
  std::map<int, int> dims;
  for (const auto& f : o.found) ++dims[f.dimension];
  Json hist = Json::object();
  for (const auto& [d, count] : dims) hist[std::to_string(d)] = count;
  j["found_by_dimension"] = hist;
  j["residual"] = o.residual;
  Json ivs = Json::array();
  for (const auto& iv : o.intervals) {
    ivs.push_back(Json{{"pair", iv.pair.label()}, {"lo", iv.lo}, {"hi", iv.hi}, {"spread", iv.spread()}});
  }
  j["intervals"] = ivs;
  return j;
}

}  // namespace unirigid
