#pragma once

// Certificates for universal linkage, universal rigidity, affine motions,
// dimensional rigidity and the Farkas alternative.
//
// The stress-based conditions are sufficient only. A failed condition gives
// Unknown, never Refuted; Refuted is reserved for verdicts backed by an
// explicit witness (an affine motion, a higher-dimensional framework).

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "unirigid/errors.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"
#include "unirigid/spectra.hpp"
#include "unirigid/stress.hpp"

namespace unirigid {

enum class Verdict { Certified, Refuted, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "Certified";
    case Verdict::Refuted: return "Refuted";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

enum class PropertyKind {
  UniversallyLinked,
  UniversallyRigid,
  DimensionallyRigid,
  NoAffineMotion,
  FarkasStatement1,
  FarkasStatement2
};

struct Property {
  PropertyKind kind = PropertyKind::UniversallyRigid;
  std::optional<VertexPair> pair;  // UniversallyLinked only

  std::string name() const {
    switch (kind) {
      case PropertyKind::UniversallyLinked: return "UniversallyLinked(" + (pair ? pair->label() : "") + ")";
      case PropertyKind::UniversallyRigid: return "UniversallyRigid";
      case PropertyKind::DimensionallyRigid: return "DimensionallyRigid";
      case PropertyKind::NoAffineMotion: return "NoAffineMotion";
      case PropertyKind::FarkasStatement1: return "FarkasStatement1";
      case PropertyKind::FarkasStatement2: return "FarkasStatement2";
    }
    return "";
  }
};

struct StressWitness {
  StressMatrix stress;
};

/// y indexed by the missing edges in lexicographic order.
struct MotionWitness {
  Vector y;
  double residual = 0.0;
};

struct FrameworkWitness {
  Matrix configuration;
  int dimension = 0;
  double edge_residual = 0.0;
};

struct FaceWitness {
  Matrix directions;
};

using Witness = std::variant<std::monostate, StressWitness, MotionWitness, FrameworkWitness, FaceWitness>;

struct Certificate {
  Property property;
  Verdict verdict = Verdict::Unknown;
  Witness witness;
  ToleranceConfig tolerances;
  std::string note;
  std::optional<double> elapsed_ms;
};

namespace detail {

/// Columns vec(E^ij W), one per missing pair.
inline Matrix pair_action(const Graph& g, const Matrix& w) {
  const auto& missing = g.missing_edges();
  const Index n = g.vertex_count();
  Matrix a(n * w.cols(), static_cast<Index>(missing.size()));
  for (std::size_t k = 0; k < missing.size(); ++k) {
    const Matrix ew = unit_pair(n, missing[k]) * w;
    a.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(ew.data(), ew.size());
  }
  return a;
}

/// Columns vec(V^T E^ij Z).
inline Matrix affine_action(const Graph& g, const Matrix& v, const Matrix& z) {
  const auto& missing = g.missing_edges();
  const Index n = g.vertex_count();
  Matrix a(v.cols() * z.cols(), static_cast<Index>(missing.size()));
  for (std::size_t k = 0; k < missing.size(); ++k) {
    const Matrix m = v.transpose() * unit_pair(n, missing[k]) * z;
    a.col(static_cast<Index>(k)) = Eigen::Map<const Vector>(m.data(), m.size());
  }
  return a;
}

/// Scales y so that its first entry of non-negligible size is 1.
inline Vector normalize_witness(const Vector& y) {
  const double big = y.cwiseAbs().maxCoeff();
  if (big == 0.0) return y;
  for (Index k = 0; k < y.size(); ++k) {
    if (std::abs(y(k)) > 1e-8 * big) return y / y(k);
  }
  return y;
}

inline Matrix gale_or_empty(const Framework& fw, const ToleranceConfig& cfg) {
  if (fw.dimension() > fw.vertex_count() - 2) return Matrix(fw.vertex_count(), 0);
  return gale_matrix(fw, cfg);
}

inline void require_psd_stress(const Framework& fw, const SymMatrix& omega, const ToleranceConfig& cfg) {
  const StressDiagnostics diag = verify_stress(fw, omega, cfg);
  if (!diag.valid) throw InvalidInput("not a stress matrix: " + diag.violation);
  if (!psd_check(omega, cfg)) throw InvalidInput("stress matrix is not positive semidefinite");
  if (max_abs(omega.matrix()) <= cfg.rank_tol) throw InvalidInput("stress matrix is zero");
}

inline Certificate make(PropertyKind kind, const ToleranceConfig& cfg, std::optional<VertexPair> pair = std::nullopt) {
  Certificate c;
  c.property = {kind, pair};
  c.tolerances = cfg;
  return c;
}

}  // namespace detail

/// Pair {k,l} is universally linked when every solution of
/// sum y_ij E^ij W = 0 (W spanning the column space of Omega) has y_kl = 0.
inline Certificate linked_check(const Framework& fw, const SymMatrix& omega, VertexPair pair,
                                const ToleranceConfig& cfg) {
  detail::require_psd_stress(fw, omega, cfg);
  const int idx = fw.graph().missing_index(pair);
  if (idx < 0) throw InvalidInput("pair {" + pair.label() + "} is not a missing edge");
  Certificate c = detail::make(PropertyKind::UniversallyLinked, cfg, pair);

  const Matrix a = detail::pair_action(fw.graph(), colspace_basis(omega.matrix(), cfg));
  Matrix stacked(a.rows() + 1, a.cols());
  stacked << a, Vector::Unit(a.cols(), idx).transpose();
  if (numerical_rank(stacked, cfg) == numerical_rank(a, cfg)) {
    c.verdict = Verdict::Certified;
    c.witness = StressWitness{make_stress(omega, cfg)};
    c.note = "y_kl = 0 in every solution of the stress system";
    return c;
  }
  // Projection of e_kl onto the solution space has y_kl = |N^T e_kl|^2 > 0.
  const Matrix null = nullspace_basis(a, cfg);
  Vector y = null * null.row(idx).transpose();
  y /= y(idx);
  c.witness = MotionWitness{y, max_abs(a * y)};
  c.note = "stress system admits y_kl != 0; the condition is sufficient only";
  return c;
}

/// Universal rigidity when sum y_ij E^ij W = 0 forces y = 0.
inline Certificate rigidity_check(const Framework& fw, const SymMatrix& omega, const ToleranceConfig& cfg) {
  detail::require_psd_stress(fw, omega, cfg);
  Certificate c = detail::make(PropertyKind::UniversallyRigid, cfg);
  const Matrix a = detail::pair_action(fw.graph(), colspace_basis(omega.matrix(), cfg));
  const Matrix null = nullspace_basis(a, cfg);
  if (null.cols() == 0) {
    c.verdict = Verdict::Certified;
    c.witness = StressWitness{make_stress(omega, cfg)};
    c.note = "stress system has only the zero solution";
    return c;
  }
  const Vector y = detail::normalize_witness(null.col(0));
  c.witness = MotionWitness{y, max_abs(a * y)};
  c.note = "stress system has a nonzero solution; the condition is sufficient only";
  return c;
}

/// No affine motion iff sum y_ij V^T E^ij Z = 0 forces y = 0. Cross-checked
/// against aff(face(0)) = {0}.
inline Certificate affine_motion_check(const Framework& fw, const ToleranceConfig& cfg) {
  Certificate c = detail::make(PropertyKind::NoAffineMotion, cfg);
  const Matrix v = build_V(fw.vertex_count());
  const Matrix a = detail::affine_action(fw.graph(), v, detail::gale_or_empty(fw, cfg));
  const Matrix null = nullspace_basis(a, cfg);

  const CayleySpectrahedron sp = build_spectrahedron(fw, cfg, v);
  const FaceDescription face = face_affine_hull(sp, Vector::Zero(sp.dimension()), cfg);
  if (face.dimension() != null.cols()) {
    throw InternalInconsistency("affine motion system has " + std::to_string(null.cols()) +
                                "-dimensional solutions but aff(face(0)) has dimension " +
                                std::to_string(face.dimension()));
  }
  if (null.cols() == 0) {
    c.verdict = Verdict::Certified;
    c.witness = FaceWitness{Matrix(sp.dimension(), 0)};
    c.note = "affine motion system has only the zero solution";
    return c;
  }
  const Vector y = detail::normalize_witness(null.col(0));
  c.verdict = Verdict::Refuted;
  c.witness = MotionWitness{y, max_abs(a * y)};
  c.note = "affine motion along y";
  return c;
}

/// Classical certificate: PSD stress of rank n-r-1 and no affine motion.
inline Certificate classic_check(const Framework& fw, const PsdStressSearch& search, const ToleranceConfig& cfg) {
  Certificate c = detail::make(PropertyKind::UniversallyRigid, cfg);
  const int full = fw.vertex_count() - fw.dimension() - 1;
  if (search.status != SearchStatus::Found) {
    c.note = "no nonzero PSD stress";
    return c;
  }
  const StressMatrix& st = *search.stress;
  if (st.rank != full) {
    c.note = "best PSD stress has rank " + std::to_string(st.rank) + " < " + std::to_string(full);
    return c;
  }
  const Certificate am = affine_motion_check(fw, cfg);
  const Certificate rc = rigidity_check(fw, st.omega, cfg);
  if ((am.verdict == Verdict::Certified) != (rc.verdict == Verdict::Certified)) {
    throw InternalInconsistency("maximal-rank PSD stress: rigidity verdict " + std::string(to_string(rc.verdict)) +
                                " disagrees with affine motion verdict " + to_string(am.verdict));
  }
  if (am.verdict == Verdict::Certified) {
    c.verdict = Verdict::Certified;
    c.witness = StressWitness{st};
    c.note = "PSD stress of rank n-r-1 and no affine motion";
  } else {
    c.note = "PSD stress of rank n-r-1 but an affine motion exists";
  }
  return c;
}

inline Certificate classic_check(const Framework& fw, const ToleranceConfig& cfg, std::uint64_t seed) {
  return classic_check(fw, find_psd_stress(fw, cfg, seed), cfg);
}

namespace detail {

/// Framework witness for y in F, or nullopt when reconstruction does not
/// reproduce the edge lengths.
inline std::optional<FrameworkWitness> framework_witness(const CayleySpectrahedron& sp, const Framework& fw,
                                                         const Vector& y, const ToleranceConfig& cfg) {
  try {
    const Framework eq = equivalent_framework(sp, fw, y, cfg);
    const double res = max_edge_violation(fw, eq.config());
    const double scale = std::max(1.0, max_abs(edm_of(fw).matrix()));
    if (res > 1e-8 * scale) return std::nullopt;
    return FrameworkWitness{eq.config(), eq.dimension(), res};
  } catch (const InvalidInput&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline Certificate dimensional_rigidity_check(const Framework& fw, const PsdStressSearch& search,
                                              const CayleySpectrahedron& sp, const ToleranceConfig& cfg,
                                              std::uint64_t seed) {
  Certificate c = detail::make(PropertyKind::DimensionallyRigid, cfg);
  const int n = fw.vertex_count();
  const int r = fw.dimension();
  if (r == n - 1) {
    c.verdict = Verdict::Certified;
    c.witness = FrameworkWitness{fw.config(), r, 0.0};
    c.note = "n points span at most n-1 dimensions";
    return c;
  }
  if (search.status == SearchStatus::Found) {
    const StressMatrix& st = *search.stress;
    if (st.rank == n - r - 1) {
      c.verdict = Verdict::Certified;
      c.witness = StressWitness{st};
      c.note = "PSD stress of rank n-r-1 bounds rank X(y) by r on F";
      return c;
    }
    if (rigidity_check(fw, st.omega, cfg).verdict == Verdict::Certified) {
      c.verdict = Verdict::Certified;
      c.witness = StressWitness{st};
      c.note = "universally rigid, hence dimensionally rigid";
      return c;
    }
  }
  const MaxRankPoint best = max_rank_point(sp, cfg, seed);
  if (best.rank > r) {
    if (auto w = detail::framework_witness(sp, fw, best.y, cfg)) {
      c.verdict = Verdict::Refuted;
      c.note = "equivalent framework of dimension " + std::to_string(w->dimension);
      c.witness = std::move(*w);
      return c;
    }
  }
  c.note = "heuristic: no higher-dimensional equivalent framework found";
  return c;
}

inline Certificate dimensional_rigidity_check(const Framework& fw, const ToleranceConfig& cfg, std::uint64_t seed) {
  return dimensional_rigidity_check(fw, find_psd_stress(fw, cfg, seed), build_spectrahedron(fw, cfg), cfg, seed);
}

/// Exactly one of: (1) an (n-1)-dimensional equivalent framework exists;
/// (2) a nonzero PSD stress exists.
inline Certificate farkas_dichotomy(const Framework& fw, const PsdStressSearch& search,
                                    const CayleySpectrahedron& sp, const ToleranceConfig& cfg, std::uint64_t seed) {
  const int n = fw.vertex_count();
  std::optional<FrameworkWitness> full;
  if (fw.dimension() == n - 1) {
    full = FrameworkWitness{fw.config(), n - 1, 0.0};
  } else {
    const MaxRankPoint best = max_rank_point(sp, cfg, seed);
    if (best.rank == n - 1) {
      full = detail::framework_witness(sp, fw, best.y, cfg);
      if (full && full->dimension != n - 1) full.reset();
    }
  }
  const bool stress = search.status == SearchStatus::Found;
  if (full && stress) {
    throw InternalInconsistency("both alternatives certified: an (n-1)-dimensional equivalent framework and a PSD stress");
  }
  if (full) {
    Certificate c = detail::make(PropertyKind::FarkasStatement1, cfg);
    c.verdict = Verdict::Certified;
    c.witness = std::move(*full);
    c.note = "equivalent framework of dimension n-1";
    return c;
  }
  if (stress) {
    detail::require_psd_stress(fw, search.stress->omega, cfg);
    Certificate c = detail::make(PropertyKind::FarkasStatement2, cfg);
    c.verdict = Verdict::Certified;
    c.witness = StressWitness{*search.stress};
    c.note = "nonzero PSD stress";
    return c;
  }
  Certificate c = detail::make(PropertyKind::FarkasStatement1, cfg);
  c.note = "neither alternative resolved numerically";
  return c;
}

inline Certificate farkas_dichotomy(const Framework& fw, const ToleranceConfig& cfg, std::uint64_t seed) {
  return farkas_dichotomy(fw, find_psd_stress(fw, cfg, seed), build_spectrahedron(fw, cfg), cfg, seed);
}

/// Points of F: 0, a max-rank point y*, and random points on chords from y*
/// to the boundary of F inside aff(F), including the boundary endpoints.
inline std::vector<Vector> sample_spectrahedron(const CayleySpectrahedron& sp, const ToleranceConfig& cfg,
                                                std::uint64_t seed, int count) {
  std::vector<Vector> out{Vector::Zero(sp.dimension())};
  const MaxRankPoint best = max_rank_point(sp, cfg, seed);
  if (!membership(sp, best.y, cfg).member) return out;
  out.push_back(best.y);
  const FaceDescription face = face_affine_hull(sp, best.y, cfg);
  if (face.dimension() == 0) return out;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  for (int s = 0; s < count; ++s) {
    Vector coef(face.dimension());
    for (Index k = 0; k < coef.size(); ++k) coef(k) = normal(rng);
    const Vector d = face.directions * coef.normalized();
    double t = boundary_ray(sp, best.y, d, cfg);
    if (!std::isfinite(t)) t = 10.0;
    out.push_back(best.y + (s % 4 == 0 ? t : unit(rng) * t) * d);
  }
  return out;
}

struct SubspaceSample {
  Vector y;
  double residual = 0.0;  // max |Omega E(y)|
  bool ok = false;
};

struct SubspaceReport {
  std::vector<SubspaceSample> samples;
  int null_dim_with_v = 0;  // dim N(y -> Omega E(y) V)
  int null_dim_plain = 0;   // dim N(y -> Omega E(y))
  bool dims_equal = false;
  bool all_ok = false;
};

/// Every y in F satisfies Omega E(y) = 0 with E(y) = sum y_ij E^ij.
inline SubspaceReport subspace_check(const Framework& fw, const SymMatrix& omega, const std::vector<Vector>& samples,
                                     const ToleranceConfig& cfg) {
  detail::require_psd_stress(fw, omega, cfg);
  const Graph& g = fw.graph();
  const Index n = fw.vertex_count();
  const Index mbar = static_cast<Index>(g.missing_edges().size());
  SubspaceReport out;
  const double oscale = std::max(1.0, max_abs(omega.matrix()));
  out.all_ok = true;
  for (const auto& y : samples) {
    if (y.size() != mbar) throw InvalidInput("sample has the wrong length");
    Matrix e = Matrix::Zero(n, n);
    for (Index k = 0; k < mbar; ++k) e += y(k) * unit_pair(n, g.missing_edges()[static_cast<std::size_t>(k)]);
    SubspaceSample s{y, max_abs(omega.matrix() * e), false};
    s.ok = s.residual <= 1e-7 * oscale * std::max(1.0, y.cwiseAbs().maxCoeff());
    out.all_ok = out.all_ok && s.ok;
    out.samples.push_back(std::move(s));
  }
  const Matrix v = build_V(static_cast<int>(n));
  Matrix plain(n * n, mbar);
  Matrix with_v(n * (n - 1), mbar);
  for (Index k = 0; k < mbar; ++k) {
    const Matrix oe = omega.matrix() * unit_pair(n, g.missing_edges()[static_cast<std::size_t>(k)]);
    const Matrix oev = oe * v;
    plain.col(k) = Eigen::Map<const Vector>(oe.data(), oe.size());
    with_v.col(k) = Eigen::Map<const Vector>(oev.data(), oev.size());
  }
  out.null_dim_plain = static_cast<int>(mbar) - numerical_rank(plain, cfg);
  out.null_dim_with_v = static_cast<int>(mbar) - numerical_rank(with_v, cfg);
  out.dims_equal = out.null_dim_plain == out.null_dim_with_v;
  return out;
}

struct Report {
  std::vector<VertexPair> missing;
  PsdStressSearch search;
  std::vector<Certificate> certificates;
};

/// Stress search, then linked checks per missing pair, rigidity, affine
/// motion, dimensional rigidity and the Farkas alternative.
inline Report analyze(const Framework& fw, const ToleranceConfig& cfg, std::uint64_t seed, bool timing = false) {
  using Clock = std::chrono::steady_clock;
  auto stamp = [&](Certificate& c, Clock::time_point t0) {
    if (timing) c.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  cfg.validate();
  Report rep;
  rep.missing = fw.graph().missing_edges();
  rep.search = find_psd_stress(fw, cfg, seed);
  const bool have = rep.search.status == SearchStatus::Found;
  const CayleySpectrahedron sp = build_spectrahedron(fw, cfg);

  for (const auto& pr : rep.missing) {
    const auto t0 = Clock::now();
    Certificate c;
    if (have) {
      c = linked_check(fw, rep.search.stress->omega, pr, cfg);
    } else {
      c = detail::make(PropertyKind::UniversallyLinked, cfg, pr);
      c.note = "no nonzero PSD stress";
    }
    stamp(c, t0);
    rep.certificates.push_back(std::move(c));
  }

  auto t0 = Clock::now();
  Certificate rigid;
  if (have) {
    rigid = rigidity_check(fw, rep.search.stress->omega, cfg);
  } else {
    rigid = detail::make(PropertyKind::UniversallyRigid, cfg);
    rigid.note = "no nonzero PSD stress";
  }
  stamp(rigid, t0);

  t0 = Clock::now();
  Certificate affine = affine_motion_check(fw, cfg);
  stamp(affine, t0);
  if (have && rep.search.stress->rank == fw.vertex_count() - fw.dimension() - 1 &&
      (rigid.verdict == Verdict::Certified) != (affine.verdict == Verdict::Certified)) {
    throw InternalInconsistency("maximal-rank PSD stress: rigidity and affine motion verdicts disagree");
  }

  t0 = Clock::now();
  Certificate dim = dimensional_rigidity_check(fw, rep.search, sp, cfg, seed);
  stamp(dim, t0);

  t0 = Clock::now();
  Certificate farkas = farkas_dichotomy(fw, rep.search, sp, cfg, seed);
  stamp(farkas, t0);

  rep.certificates.push_back(std::move(rigid));
  rep.certificates.push_back(std::move(affine));
  rep.certificates.push_back(std::move(dim));
  rep.certificates.push_back(std::move(farkas));
  return rep;
}

}  // namespace unirigid
