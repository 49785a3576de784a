#pragma once

// Dense symmetric linear algebra with tolerance-scaled rank decisions.
//
// Every rank / PSD decision in the library goes through this header so that
// one ToleranceConfig governs the whole pipeline. Thresholds are relative:
// an eigenvalue (or singular value) s counts as nonzero when
//     |s| > tol * max(1, |s|_max).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "unirigid/errors.hpp"

namespace unirigid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct ToleranceConfig {
  double rank_tol = 1e-9;
  double psd_tol = 1e-8;
  double solver_tol = 1e-10;
  int max_iters = 2000;

  void validate() const {
    auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
    if (bad(rank_tol)) throw InvalidInput("rank_tol must be a positive finite number");
    if (bad(psd_tol)) throw InvalidInput("psd_tol must be a positive finite number");
    if (bad(solver_tol)) throw InvalidInput("solver_tol must be a positive finite number");
    if (max_iters < 1) throw InvalidInput("max_iters must be at least 1");
  }
};

/// Symmetric matrix. Construction symmetrizes (A + A^T)/2, so
/// entries(i,j) == entries(j,i) holds exactly afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& a) : m_(a) {
    if (a.rows() != a.cols()) {
      throw InvalidInput("symmetric matrix must be square, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) throw InvalidInput("matrix has non-finite entries");
    for (Index j = 0; j < m_.cols(); ++j) {
      for (Index i = j + 1; i < m_.rows(); ++i) {
        const double s = 0.5 * (m_(i, j) + m_(j, i));
        m_(i, j) = s;
        m_(j, i) = s;
      }
    }
  }

  static SymMatrix zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.m_ + b.m_);
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.m_ - b.m_);
  }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

 private:
  Matrix m_;
};

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, values(k) <-> vectors.col(k)
};

/// Flips each column so that its largest-magnitude entry is positive
/// (first such entry on ties).
inline void fix_column_signs(Matrix& cols) {
  for (Index c = 0; c < cols.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < cols.rows(); ++r) {
      const double a = std::abs(cols(r, c));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        arg = r;
      }
    }
    if (cols.rows() > 0 && cols(arg, c) < 0.0) cols.col(c) *= -1.0;
  }
}

inline SymEig sym_eig(const SymMatrix& a) {
  if (a.order() == 0) return {Vector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  SymEig out{solver.eigenvalues(), solver.eigenvectors()};
  fix_column_signs(out.vectors);
  return out;
}

inline double spectral_scale(const Vector& values) {
  return values.size() == 0 ? 1.0 : std::max(1.0, values.cwiseAbs().maxCoeff());
}

inline int rank_tol(const SymMatrix& a, const ToleranceConfig& cfg) {
  const SymEig eig = sym_eig(a);
  const double thr = cfg.rank_tol * spectral_scale(eig.values);
  return static_cast<int>((eig.values.array().abs() > thr).count());
}

inline double min_eigenvalue(const SymMatrix& a) {
  if (a.order() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline bool psd_check(const SymMatrix& a, const ToleranceConfig& cfg) {
  if (a.order() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  const Vector& v = solver.eigenvalues();
  return v(0) >= -cfg.psd_tol * spectral_scale(v);
}

/// Clips negative eigenvalues at zero.
inline SymMatrix project_psd(const SymMatrix& a) {
  if (a.order() == 0) return a;
  const SymEig eig = sym_eig(a);
  const Vector clipped = eig.values.cwiseMax(0.0);
  return SymMatrix(eig.vectors * clipped.asDiagonal() * eig.vectors.transpose());
}

namespace detail {

struct RankRevealed {
  Matrix left;    // rows x rank, orthonormal basis of the column space
  Matrix right_null;  // cols x (cols - rank), orthonormal basis of the null space
  int rank = 0;
};

inline RankRevealed reveal(const Matrix& a, const ToleranceConfig& cfg) {
  RankRevealed out;
  if (a.cols() == 0) {
    out.left = Matrix(a.rows(), 0);
    out.right_null = Matrix(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.left = Matrix(0, 0);
    out.right_null = Matrix::Identity(a.cols(), a.cols());
    return out;
  }
  if (!a.allFinite()) throw InvalidInput("matrix has non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double thr = cfg.rank_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > thr) ++rank;
  out.rank = rank;
  out.left = svd.matrixU().leftCols(rank);
  out.right_null = svd.matrixV().rightCols(a.cols() - rank);
  return out;
}

}  // namespace detail

/// Numerical rank of a rectangular matrix (singular values, same relative rule).
inline int numerical_rank(const Matrix& a, const ToleranceConfig& cfg) {
  return detail::reveal(a, cfg).rank;
}

/// Orthonormal basis of N(A); columns sign-normalized.
inline Matrix nullspace_basis(const Matrix& a, const ToleranceConfig& cfg) {
  Matrix n = detail::reveal(a, cfg).right_null;
  fix_column_signs(n);
  return n;
}

/// Orthonormal basis of the column space of A; columns sign-normalized.
inline Matrix colspace_basis(const Matrix& a, const ToleranceConfig& cfg) {
  Matrix c = detail::reveal(a, cfg).left;
  fix_column_signs(c);
  return c;
}

/// Orthonormal basis of the orthogonal complement of span(cols) in R^rows.
inline Matrix complement_basis(const Matrix& cols, const ToleranceConfig& cfg) {
  return nullspace_basis(cols.transpose(), cfg);
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Isometric coordinates on symmetric matrices: diagonal entries as-is,
// off-diagonal (i<j) scaled by sqrt(2), so <A,B>_F == svec(A).dot(svec(B)).

inline Index sym_dim(Index k) { return k * (k + 1) / 2; }

inline Vector svec(const Matrix& a) {
  const Index k = a.rows();
  Vector v(sym_dim(k));
  Index pos = 0;
  for (Index j = 0; j < k; ++j) {
    for (Index i = j; i < k; ++i) {
      v(pos++) = i == j ? a(i, i) : std::sqrt(2.0) * 0.5 * (a(i, j) + a(j, i));
    }
  }
  return v;
}

inline SymMatrix smat(const Vector& v, Index k) {
  if (v.size() != sym_dim(k)) throw InvalidInput("smat: coordinate vector has the wrong length");
  Matrix a(k, k);
  Index pos = 0;
  for (Index j = 0; j < k; ++j) {
    for (Index i = j; i < k; ++i) {
      const double x = i == j ? v(pos) : v(pos) / std::sqrt(2.0);
      a(i, j) = a(j, i) = x;
      ++pos;
    }
  }
  return SymMatrix(a);
}

/// Orthonormal basis of {S symmetric k x k : <S, C> = 0 for every C in constraints}.
inline std::vector<SymMatrix> sym_orthogonal_complement(const std::vector<Matrix>& constraints, Index k,
                                                       const ToleranceConfig& cfg) {
  Matrix rows(static_cast<Index>(constraints.size()), sym_dim(k));
  for (std::size_t r = 0; r < constraints.size(); ++r) rows.row(static_cast<Index>(r)) = svec(constraints[r]).transpose();
  const Matrix null = nullspace_basis(rows, cfg);
  std::vector<SymMatrix> out;
  out.reserve(static_cast<std::size_t>(null.cols()));
  for (Index c = 0; c < null.cols(); ++c) out.push_back(smat(null.col(c), k));
  return out;
}

}  // namespace unirigid
