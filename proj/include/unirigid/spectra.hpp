#pragma once

// The Cayley configuration spectrahedron
//
//     F = { y in R^mbar : X(y) = X + sum_{ij missing} y_ij M^ij  PSD },
//     M^ij = -1/2 V^T E^ij V,
//
// whose points are exactly the equivalent frameworks (rank X(y) = their
// dimension, missing squared distances shifted by y_ij).

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "unirigid/errors.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/min_eig_opt.hpp"
#include "unirigid/numerics.hpp"

namespace unirigid {

struct CayleySpectrahedron {
  Matrix V;                           // n x (n-1), V^T e = 0, V^T V = I
  SymMatrix base;                     // projected Gram matrix X
  std::vector<VertexPair> missing;    // lexicographic; indexes y
  std::vector<SymMatrix> basis;       // M^ij in the order of `missing`

  Index dimension() const { return static_cast<Index>(missing.size()); }
  Index order() const { return base.order(); }

  SymMatrix x_of_y(const Vector& y) const {
    if (y.size() != dimension()) {
      throw InvalidInput("y has " + std::to_string(y.size()) + " entries, expected " +
                         std::to_string(dimension()));
    }
    Matrix x = base.matrix();
    for (Index k = 0; k < dimension(); ++k) x += y(k) * basis[static_cast<std::size_t>(k)].matrix();
    return SymMatrix(x);
  }

  /// sum_k d_k M^k (the linear part of X(y)).
  Matrix linear_part(const Vector& d) const {
    Matrix x = Matrix::Zero(order(), order());
    for (Index k = 0; k < dimension(); ++k) x += d(k) * basis[static_cast<std::size_t>(k)].matrix();
    return x;
  }
};

inline SymMatrix basis_matrix(const Matrix& v, VertexPair p) {
  return SymMatrix(-0.5 * v.transpose() * unit_pair(v.rows(), p) * v);
}

/// `v` overrides the canonical V (any orthonormal basis of e-perp).
inline CayleySpectrahedron build_spectrahedron(const Framework& fw, const ToleranceConfig& cfg,
                                               const std::optional<Matrix>& v = std::nullopt) {
  const int n = fw.vertex_count();
  CayleySpectrahedron sp;
  sp.V = v ? *v : build_V(n);
  if (sp.V.rows() != n || sp.V.cols() != n - 1) throw InvalidInput("V has the wrong shape");
  if (max_abs(sp.V.transpose() * sp.V - Matrix::Identity(n - 1, n - 1)) > 1e-8 ||
      (sp.V.transpose() * Vector::Ones(n)).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidInput("V is not an orthonormal basis of e-perp");
  }
  sp.base = projected_gram(fw, sp.V);
  sp.missing = fw.graph().missing_edges();
  Matrix stacked(static_cast<Index>(n - 1) * (n - 1), static_cast<Index>(sp.missing.size()));
  for (std::size_t k = 0; k < sp.missing.size(); ++k) {
    sp.basis.push_back(basis_matrix(sp.V, sp.missing[k]));
    stacked.col(static_cast<Index>(k)) =
        Eigen::Map<const Vector>(sp.basis.back().matrix().data(), stacked.rows());
  }
  if (numerical_rank(stacked, cfg) != static_cast<int>(sp.missing.size())) {
    throw InternalInconsistency("basis matrices M^ij are linearly dependent");
  }
  return sp;
}

inline SymMatrix x_of_y(const CayleySpectrahedron& sp, const Vector& y) { return sp.x_of_y(y); }

struct Membership {
  bool member = false;
  double lambda_min = 0.0;
};

inline Membership membership(const CayleySpectrahedron& sp, const Vector& y, const ToleranceConfig& cfg) {
  const SymMatrix x = sp.x_of_y(y);
  return {psd_check(x, cfg), min_eigenvalue(x)};
}

/// Framework realizing X(y): dimension rank X(y), squared distance
/// d_ij + y_ij on missing pairs, unchanged on edges.
inline Framework equivalent_framework(const CayleySpectrahedron& sp, const Framework& fw, const Vector& y,
                                      const ToleranceConfig& cfg) {
  const SymMatrix x = sp.x_of_y(y);
  if (!psd_check(x, cfg)) throw InvalidInput("y is not in the spectrahedron");
  const SymMatrix gram(sp.V * x.matrix() * sp.V.transpose());
  const Matrix p = realize(gram, cfg);
  if (p.cols() == 0) throw InvalidInput("X(y) = 0: all points coincide");
  return Framework(fw.graph(), p, cfg);
}

struct FaceDescription {
  Vector anchor;        // the point whose minimal face is described
  Matrix nullspace;     // U: orthonormal basis of N(X(anchor))
  Matrix directions;    // orthonormal basis of the direction space of aff(face(anchor))

  Index dimension() const { return directions.cols(); }
};

namespace detail {

/// Matrix of the linear map d -> vec(linear_part(d) * u).
inline Matrix action_on(const CayleySpectrahedron& sp, const Matrix& u) {
  const Index rows = sp.order() * u.cols();
  Matrix a(rows, sp.dimension());
  for (Index k = 0; k < sp.dimension(); ++k) {
    const Matrix mu = sp.basis[static_cast<std::size_t>(k)].matrix() * u;
    a.col(k) = Eigen::Map<const Vector>(mu.data(), rows);
  }
  return a;
}

inline Matrix kernel_of(const SymMatrix& x, const ToleranceConfig& cfg) {
  const SymEig eig = sym_eig(x);
  const double thr = cfg.rank_tol * spectral_scale(eig.values);
  std::vector<Index> cols;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (std::abs(eig.values(k)) <= thr) cols.push_back(k);
  }
  Matrix u(x.order(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) u.col(static_cast<Index>(c)) = eig.vectors.col(cols[c]);
  return u;
}

}  // namespace detail

/// aff(face(y)) = { z : X(z) U = 0 } with U spanning N(X(y)).
inline FaceDescription face_affine_hull(const CayleySpectrahedron& sp, const Vector& y, const ToleranceConfig& cfg) {
  FaceDescription out;
  out.anchor = y;
  out.nullspace = detail::kernel_of(sp.x_of_y(y), cfg);
  if (out.nullspace.cols() == 0) {
    out.directions = Matrix::Identity(sp.dimension(), sp.dimension());
    return out;
  }
  // X(z) U = X(y) U + L(z - y) U and X(y) U = 0, so the directions are N(d -> L(d) U).
  out.directions = nullspace_basis(detail::action_on(sp, out.nullspace), cfg);
  return out;
}

/// Ordering of minimal faces through their kernels:
/// N(X(y1)) subset N(X(y2))  <=>  face(y1) contains face(y2).
enum class FaceOrder { Same, FirstContainsSecond, SecondContainsFirst, Incomparable };

inline const char* to_string(FaceOrder o) {
  switch (o) {
    case FaceOrder::Same: return "same";
    case FaceOrder::FirstContainsSecond: return "first-contains-second";
    case FaceOrder::SecondContainsFirst: return "second-contains-first";
    case FaceOrder::Incomparable: return "incomparable";
  }
  return "incomparable";
}

inline FaceOrder relint_compare(const CayleySpectrahedron& sp, const Vector& y1, const Vector& y2,
                                const ToleranceConfig& cfg) {
  const Matrix n1 = detail::kernel_of(sp.x_of_y(y1), cfg);
  const Matrix n2 = detail::kernel_of(sp.x_of_y(y2), cfg);
  Matrix both(sp.order(), n1.cols() + n2.cols());
  both << n1, n2;
  const int joint = numerical_rank(both, cfg);
  const bool n1_in_n2 = joint == n2.cols();
  const bool n2_in_n1 = joint == n1.cols();
  if (n1_in_n2 && n2_in_n1) return FaceOrder::Same;
  if (n1_in_n2) return FaceOrder::FirstContainsSecond;
  if (n2_in_n1) return FaceOrder::SecondContainsFirst;
  return FaceOrder::Incomparable;
}

/// Largest t >= 0 with y0 + t d in F, by bisection on lambda_min.
/// Returns +inf when t = 1e6 is still feasible.
inline double boundary_ray(const CayleySpectrahedron& sp, const Vector& y0, const Vector& d,
                           const ToleranceConfig& cfg) {
  if (!psd_check(sp.x_of_y(y0), cfg)) throw InvalidInput("boundary_ray: start point is not in F");
  constexpr double far = 1e6;
  auto feasible = [&](double t) { return psd_check(sp.x_of_y(y0 + t * d), cfg); };
  if (feasible(far)) return std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  int guard = 0;
  while (hi - lo > cfg.solver_tol * std::max(1.0, hi) && guard++ < 200) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

struct MaxRankPoint {
  Vector y;
  int rank = 0;
  bool converged = true;    // false: a search stage gave up; y is the best point found
  int reductions = 0;       // facial reduction steps taken
  double lambda_min = 0.0;  // lambda_min of X(y) restricted to the final face
};

/// Maximizes rank X(y) over F.
///
/// Stage: maximize lambda_min of the pencil restricted to the current face
/// (range Q, affine set y in span(B)). A positive optimum gives a point in
/// the relative interior. Otherwise (Farkas) there is a nonzero PSD Psi on
/// the kernel U of the base with <Psi, U^T A_k U> = 0; every y in F then has
/// X(y) U R = 0 for R = range(Psi), which shrinks both Q and B.
/// At the first stage Psi is exactly a PSD stress written in Gale coordinates.
inline MaxRankPoint max_rank_point(const CayleySpectrahedron& sp, const ToleranceConfig& cfg, std::uint64_t seed) {
  const Index mbar = sp.dimension();
  Matrix q = Matrix::Identity(sp.order(), sp.order());
  Matrix b = Matrix::Identity(mbar, mbar);
  MaxRankPoint out;
  out.y = Vector::Zero(mbar);

  for (int stage = 0; stage <= sp.order(); ++stage) {
    const Matrix a0 = q.transpose() * sp.base.matrix() * q;
    std::vector<Matrix> dirs;
    for (Index c = 0; c < b.cols(); ++c) dirs.push_back(q.transpose() * sp.linear_part(b.col(c)) * q);

    const MinEigOptimum primal = maximize_min_eigenvalue(a0, dirs, Vector::Zero(b.cols()), cfg);
    const double scale = std::max(1.0, a0.norm());
    if (primal.value > cfg.psd_tol * scale) {
      out.y = b * primal.w;
      out.rank = rank_tol(sp.x_of_y(out.y), cfg);
      out.lambda_min = primal.value;
      out.converged = primal.converged;
      return out;
    }

    const Matrix u = detail::kernel_of(SymMatrix(a0), cfg);
    if (u.cols() == 0) break;  // a0 is PD but the optimum said otherwise; fall through
    std::vector<Matrix> constraints;
    for (const auto& d : dirs) constraints.push_back(u.transpose() * d * u);
    const auto psi_space = sym_orthogonal_complement(constraints, u.cols(), cfg);
    const SliceOptimum dual = maximize_min_eigenvalue_on_trace_slice(psi_space, cfg, seed + static_cast<std::uint64_t>(stage));
    if (dual.empty || dual.value < -cfg.psd_tol) {
      out.converged = false;  // neither alternative resolved numerically
      break;
    }
    const Matrix r = u * colspace_basis(dual.element.matrix(), cfg);

    Matrix lin(q.cols() * r.cols(), b.cols());
    for (Index c = 0; c < b.cols(); ++c) {
      const Matrix ar = dirs[static_cast<std::size_t>(c)] * r;
      lin.col(c) = Eigen::Map<const Vector>(ar.data(), ar.size());
    }
    b = b * nullspace_basis(lin, cfg);
    q = q * complement_basis(r, cfg);
    ++out.reductions;
  }

  out.y = Vector::Zero(mbar);
  out.rank = rank_tol(sp.base, cfg);
  out.lambda_min = 0.0;
  return out;
}

}  // namespace unirigid
