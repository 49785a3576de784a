#pragma once

// Maximization of the smallest eigenvalue over an affine family of
// symmetric matrices
//
//     maximize  lambda_min(A0 + sum_j w_j A_j)   over w in R^p.
//
// lambda_min is concave in w. We follow the central path of
//     maximize  t + mu * log det(A(w) - t I)
// with damped Newton steps and mu -> 0. The gap to the optimum along the
// path is at most k*mu (k = matrix order), so the optimal value is resolved
// far below psd_tol; a plain subgradient method cannot decide the sign of an
// optimum that is exactly zero, which is the common degenerate case here.
// Limits of the path lie in the relative interior of the optimal set, so a
// degenerate optimum is returned at maximal rank.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "unirigid/numerics.hpp"

namespace unirigid {

struct MinEigOptimum {
  Vector w;             // maximizer (original coordinates)
  double value = 0.0;   // lambda_min(A(w)), recomputed directly
  bool converged = false;
  bool unbounded = false;
  int iterations = 0;   // Newton steps
};

namespace detail {

inline Matrix combine(const Matrix& base, const std::vector<Matrix>& dirs, const Vector& w) {
  Matrix a = base;
  for (std::size_t j = 0; j < dirs.size(); ++j) a += w(static_cast<Index>(j)) * dirs[j];
  return a;
}

inline double barrier_value(const Eigen::LLT<Matrix>& llt, double t, double mu) {
  const Matrix& l = llt.matrixLLT();
  double logdet = 0.0;
  for (Index i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
  return t + mu * logdet;
}

}  // namespace detail

inline MinEigOptimum maximize_min_eigenvalue(const Matrix& base, const std::vector<Matrix>& dirs,
                                             const Vector& start, const ToleranceConfig& cfg) {
  const Index k = base.rows();
  const Index p = static_cast<Index>(dirs.size());
  MinEigOptimum out;
  if (k == 0) {
    out.w = Vector::Zero(p);
    out.value = std::numeric_limits<double>::infinity();
    out.converged = true;
    out.unbounded = true;
    return out;
  }

  // Normalize: base to unit Frobenius scale, directions to an orthonormal
  // (Frobenius) set. u are the coordinates in that set.
  double scale = std::max(1.0, base.norm());
  for (const auto& d : dirs) scale = std::max(scale, d.norm());
  const Matrix b = base / scale;

  Matrix dmat(k * k, p);
  for (Index j = 0; j < p; ++j) {
    dmat.col(j) = Eigen::Map<const Vector>(dirs[static_cast<std::size_t>(j)].data(), k * k) / scale;
  }
  Matrix umat(k * k, 0);
  Matrix back(p, 0);  // w = back * u
  Vector u;
  if (p > 0) {
    Eigen::JacobiSVD<Matrix> svd(dmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    Index rho = 0;
    const double thr = cfg.rank_tol * std::max(1e-300, s.size() ? s(0) : 0.0);
    while (rho < s.size() && s(rho) > thr) ++rho;
    umat = svd.matrixU().leftCols(rho);
    back = svd.matrixV().leftCols(rho) * s.head(rho).cwiseInverse().asDiagonal();
    u = s.head(rho).asDiagonal() * svd.matrixV().leftCols(rho).transpose() *
        (start.size() == p ? start : Vector::Zero(p));
  } else {
    u = Vector(0);
  }
  const Index rho = u.size();
  std::vector<Matrix> d(static_cast<std::size_t>(rho));
  for (Index l = 0; l < rho; ++l) {
    d[static_cast<std::size_t>(l)] = Eigen::Map<const Matrix>(umat.col(l).data(), k, k);
    d[static_cast<std::size_t>(l)] = 0.5 * (d[static_cast<std::size_t>(l)] + d[static_cast<std::size_t>(l)].transpose());
  }

  auto finish = [&](const Vector& uu, bool converged, bool unbounded) {
    out.w = p > 0 ? Vector(back * uu) : Vector(0);
    out.converged = converged;
    out.unbounded = unbounded;
    out.value = unbounded ? std::numeric_limits<double>::infinity()
                          : min_eigenvalue(SymMatrix(detail::combine(base, dirs, out.w)));
    return out;
  };

  if (rho == 0) return finish(u, true, false);

  const Matrix eye = Matrix::Identity(k, k);
  double t = min_eigenvalue(SymMatrix(detail::combine(b, d, u))) - 1.0;
  double mu = 1.0;
  const double gap_target = 1e-2 * cfg.solver_tol;
  const double unbounded_at = 1e8;
  int iters = 0;

  while (true) {
    // Newton on the barrier at fixed mu.
    for (int inner = 0; inner < 200; ++inner) {
      if (iters >= cfg.max_iters) {
        out.iterations = iters;
        return finish(u, false, false);
      }
      const Matrix g = detail::combine(b, d, u) - t * eye;
      Eigen::LLT<Matrix> llt(g);
      if (llt.info() != Eigen::Success) break;  // lost feasibility to rounding; shrink mu and stop
      const Matrix gi = llt.solve(eye);

      const Index nv = rho + 1;
      Vector grad(nv);
      Matrix neg_hess(nv, nv);
      std::vector<Matrix> gd(static_cast<std::size_t>(rho));
      for (Index l = 0; l < rho; ++l) {
        gd[static_cast<std::size_t>(l)] = gi * d[static_cast<std::size_t>(l)];
        grad(l) = mu * gd[static_cast<std::size_t>(l)].trace();
      }
      grad(rho) = 1.0 - mu * gi.trace();
      for (Index l = 0; l < rho; ++l) {
        for (Index m = l; m < rho; ++m) {
          const double h = mu * (gd[static_cast<std::size_t>(l)].cwiseProduct(
                                     gd[static_cast<std::size_t>(m)].transpose())).sum();
          neg_hess(l, m) = neg_hess(m, l) = h;
        }
        const double h = -mu * (gd[static_cast<std::size_t>(l)].cwiseProduct(gi.transpose())).sum();
        neg_hess(l, rho) = neg_hess(rho, l) = h;
      }
      neg_hess(rho, rho) = mu * gi.squaredNorm();

      const Vector step = neg_hess.ldlt().solve(grad);
      const double decrement = grad.dot(step);
      if (!std::isfinite(decrement) || decrement / mu < 1e-12) break;

      const double f0 = detail::barrier_value(llt, t, mu);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-12) {
        const Vector u1 = u + alpha * step.head(rho);
        const double t1 = t + alpha * step(rho);
        Eigen::LLT<Matrix> llt1(detail::combine(b, d, u1) - t1 * eye);
        if (llt1.info() == Eigen::Success &&
            detail::barrier_value(llt1, t1, mu) >= f0 + 0.25 * alpha * decrement) {
          u = u1;
          t = t1;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++iters;
      if (t > unbounded_at) {
        out.iterations = iters;
        return finish(u, true, true);
      }
      if (!moved) break;
    }
    if (static_cast<double>(k) * mu <= gap_target) break;
    mu *= 0.2;
  }
  out.iterations = iters;
  return finish(u, true, false);
}

/// Result of maximizing lambda_min over {S in span(basis) : trace(S) = 1}.
struct SliceOptimum {
  bool empty = true;       // no basis, or trace vanishes on the span
  Vector coefficients;     // in terms of the given basis
  SymMatrix element;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = true;
  int iterations = 0;
};

/// The trace normalization loses nothing: every nonzero PSD matrix has
/// positive trace, so when trace vanishes on the span the only PSD
/// element is 0.
inline SliceOptimum maximize_min_eigenvalue_on_trace_slice(const std::vector<SymMatrix>& basis,
                                                           const ToleranceConfig& cfg,
                                                           std::uint64_t seed) {
  SliceOptimum out;
  const Index dim = static_cast<Index>(basis.size());
  if (dim == 0) return out;
  const Index k = basis.front().order();

  Vector tau(dim);
  double size = 0.0;
  for (Index i = 0; i < dim; ++i) {
    tau(i) = basis[static_cast<std::size_t>(i)].matrix().trace();
    size = std::max(size, basis[static_cast<std::size_t>(i)].matrix().norm());
  }
  if (tau.norm() <= cfg.rank_tol * std::max(1.0, size)) return out;

  const Vector c0 = tau / tau.squaredNorm();
  const Matrix null = nullspace_basis(tau.transpose(), cfg);

  auto span = [&](const Vector& c) {
    Matrix s = Matrix::Zero(k, k);
    for (Index i = 0; i < dim; ++i) s += c(i) * basis[static_cast<std::size_t>(i)].matrix();
    return s;
  };
  const Matrix base = span(c0);
  std::vector<Matrix> dirs;
  for (Index j = 0; j < null.cols(); ++j) dirs.push_back(span(null.col(j)));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.1);
  Vector start(null.cols());
  for (Index j = 0; j < start.size(); ++j) start(j) = normal(rng);

  const MinEigOptimum opt = maximize_min_eigenvalue(base, dirs, start, cfg);
  out.empty = false;
  out.coefficients = c0 + null * opt.w;
  out.element = SymMatrix(span(out.coefficients));
  out.value = min_eigenvalue(out.element);
  out.converged = opt.converged && !opt.unbounded;
  out.iterations = opt.iterations;
  return out;
}

}  // namespace unirigid
