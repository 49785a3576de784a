#pragma once

// Gale matrices, the space of stress matrices and the PSD stress search.
//
// A symmetric Omega is a stress matrix of (G,p) iff Omega P = 0, Omega e = 0
// and Omega_ij = 0 on every missing edge. Writing Omega = Z Psi Z^T with Z a
// Gale matrix takes care of the first two conditions, so the stress space is
// the subspace of order-(n-r-1) symmetric Psi cut out by the zero pattern.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "unirigid/errors.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/min_eig_opt.hpp"
#include "unirigid/numerics.hpp"

namespace unirigid {

/// n x (n-r-1) matrix whose orthonormal columns span N([P^T; e^T]).
inline Matrix gale_matrix(const Framework& fw, const ToleranceConfig& cfg) {
  const int n = fw.vertex_count();
  const int r = fw.dimension();
  if (r > n - 2) {
    throw EmptyGaleSpace("framework is " + std::to_string(r) + "-dimensional on " + std::to_string(n) +
                         " vertices; the Gale space is {0}");
  }
  Matrix rows(r + 1, n);
  rows << fw.config().transpose(), Vector::Ones(n).transpose();
  Matrix z = nullspace_basis(rows, cfg);
  if (z.cols() != n - r - 1) {
    throw InvalidInput("Gale space has dimension " + std::to_string(z.cols()) + ", expected " +
                       std::to_string(n - r - 1));
  }
  return z;
}

struct StressSpace {
  Matrix gale;                        // Z
  std::vector<SymMatrix> psi_basis;   // Frobenius-orthonormal; may be empty

  Index dimension() const { return static_cast<Index>(psi_basis.size()); }
  SymMatrix stress_of(const SymMatrix& psi) const {
    return SymMatrix(gale * psi.matrix() * gale.transpose());
  }
};

/// Basis of {Psi : (Z Psi Z^T)_ij = 0 for every missing edge {i,j}}.
inline StressSpace stress_space_basis(const Framework& fw, const ToleranceConfig& cfg) {
  StressSpace out;
  out.gale = gale_matrix(fw, cfg);
  const Index k = out.gale.cols();
  std::vector<Matrix> constraints;
  for (const auto& pr : fw.graph().missing_edges()) {
    // (Z Psi Z^T)_ij = <Psi, z_i z_j^T> = <Psi, sym(z_i z_j^T)>
    const Vector zi = out.gale.row(pr.i).transpose();
    const Vector zj = out.gale.row(pr.j).transpose();
    constraints.push_back(0.5 * (zi * zj.transpose() + zj * zi.transpose()));
  }
  out.psi_basis = sym_orthogonal_complement(constraints, k, cfg);
  return out;
}

struct StressMatrix {
  SymMatrix omega;
  int rank = 0;
  bool psd = false;
};

inline StressMatrix make_stress(const SymMatrix& omega, const ToleranceConfig& cfg) {
  return {omega, rank_tol(omega, cfg), psd_check(omega, cfg)};
}

struct StressDiagnostics {
  bool valid = false;
  std::string violation;  // first violated condition, empty when valid
  double residual = 0.0;  // largest violation over all conditions
};

/// Checks Omega P = 0, Omega e = 0, the missing-edge zero pattern, and the
/// per-vertex equilibrium sum_j w_ij (p^i - p^j) = 0 with w_ij = -Omega_ij.
/// Residuals are judged at rank_tol relative to max(1,|Omega|) max(1,|P|).
inline StressDiagnostics verify_stress(const Framework& fw, const SymMatrix& omega, const ToleranceConfig& cfg) {
  const int n = fw.vertex_count();
  StressDiagnostics out;
  if (omega.order() != n) {
    out.violation = "stress matrix has order " + std::to_string(omega.order()) + ", expected " + std::to_string(n);
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  const Matrix& om = omega.matrix();
  const Matrix& p = fw.config();
  const double tol = cfg.rank_tol * std::max(1.0, max_abs(om)) * std::max(1.0, max_abs(p));

  const double r_p = max_abs(om * p);
  const double r_e = (om * Vector::Ones(n)).cwiseAbs().maxCoeff();
  double r_pattern = 0.0;
  VertexPair worst{};
  for (const auto& pr : fw.graph().missing_edges()) {
    if (std::abs(om(pr.i, pr.j)) > r_pattern) {
      r_pattern = std::abs(om(pr.i, pr.j));
      worst = pr;
    }
  }
  double r_eq = 0.0;
  int worst_vertex = 0;
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd force = Eigen::RowVectorXd::Zero(p.cols());
    for (int j = 0; j < n; ++j) {
      if (j != i && fw.graph().adjacent(i, j)) force += -om(i, j) * (p.row(i) - p.row(j));
    }
    if (force.cwiseAbs().maxCoeff() > r_eq) {
      r_eq = force.cwiseAbs().maxCoeff();
      worst_vertex = i;
    }
  }
  out.residual = std::max({r_p, r_e, r_pattern, r_eq});
  if (r_pattern > tol) {
    out.violation = "nonzero entry at missing edge {" + worst.label() + "}";
  } else if (r_e > tol) {
    out.violation = "Omega e != 0";
  } else if (r_p > tol) {
    out.violation = "Omega P != 0";
  } else if (r_eq > tol) {
    out.violation = "equilibrium fails at vertex " + std::to_string(worst_vertex + 1);
  }
  out.valid = out.violation.empty();
  return out;
}

enum class SearchStatus { Found, None, Unknown };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::None: return "none";
    case SearchStatus::Unknown: return "unknown";
  }
  return "unknown";
}

struct PsdStressSearch {
  SearchStatus status = SearchStatus::None;
  std::optional<StressMatrix> stress;  // set when Found
  SymMatrix psi;                       // best iterate (order n-r-1), empty if no slice
  double objective = -std::numeric_limits<double>::infinity();  // lambda_min(Psi), trace(Psi) = 1
  int stress_space_dim = 0;
  int iterations = 0;
};

/// Nonzero PSD stress maximizing lambda_min(Psi) over trace(Psi) = 1.
///
/// Omega = Z Psi Z^T with orthonormal Z has the nonzero spectrum of Psi, so
/// the decision "Psi PSD within psd_tol" is the decision for Omega.
inline PsdStressSearch find_psd_stress(const Framework& fw, const ToleranceConfig& cfg, std::uint64_t seed) {
  PsdStressSearch out;
  if (fw.dimension() > fw.vertex_count() - 2) return out;  // only the zero stress
  const StressSpace space = stress_space_basis(fw, cfg);
  out.stress_space_dim = static_cast<int>(space.dimension());
  const SliceOptimum opt = maximize_min_eigenvalue_on_trace_slice(space.psi_basis, cfg, seed);
  if (opt.empty) return out;
  out.psi = opt.element;
  out.objective = opt.value;
  out.iterations = opt.iterations;
  if (opt.value >= -cfg.psd_tol) {
    out.status = SearchStatus::Found;
    out.stress = make_stress(space.stress_of(opt.element), cfg);
  } else {
    out.status = opt.converged ? SearchStatus::None : SearchStatus::Unknown;
  }
  return out;
}

}  // namespace unirigid
