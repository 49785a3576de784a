#pragma once

// Brute-force search for equivalent frameworks by nonlinear least squares
//
//     minimize  sum_{ij in E} (|q_i - q_j|^2 - d_ij)^2   over q in R^{n x s}
//
// from random starts. Evidence-grade only: a missed configuration proves
// nothing, but a found one is a concrete equivalent framework.

#include <unsupported/Eigen/LevenbergMarquardt>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "unirigid/certify.hpp"
#include "unirigid/errors.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"

namespace unirigid {

struct FoundConfiguration {
  Matrix config;        // centered, n x s
  int dimension = 0;    // affine dimension
  double objective = 0.0;
  double residual = 0.0;  // max edge violation
};

struct DistanceInterval {
  VertexPair pair;
  double lo = 0.0;
  double hi = 0.0;
  double spread() const { return hi - lo; }
};

struct OracleResult {
  int target_dim = 0;
  int restarts = 0;
  std::vector<FoundConfiguration> found;
  std::vector<DistanceInterval> intervals;  // one per missing pair, lexicographic
  double residual = 0.0;                    // max over found

  const DistanceInterval& interval(VertexPair p) const {
    for (const auto& iv : intervals) {
      if (iv.pair == p) return iv;
    }
    throw InvalidInput("pair {" + p.label() + "} is not a missing edge");
  }
};

namespace detail {

/// Residuals |q_i - q_j|^2 - d_ij, padded with zeros up to the number of
/// unknowns (the solver needs values >= inputs).
struct EdgeResidual : Eigen::DenseFunctor<double> {
  EdgeResidual(const Framework& fw, int s)
      : Eigen::DenseFunctor<double>(fw.vertex_count() * s,
                                    std::max<int>(static_cast<int>(fw.graph().edges().size()), fw.vertex_count() * s)),
        edges(fw.graph().edges()),
        n(fw.vertex_count()),
        dim(s) {
    for (const auto& e : edges) target.push_back((fw.config().row(e.i) - fw.config().row(e.j)).squaredNorm());
  }

  // x holds q column-major: q(i,k) = x(k*n + i).
  int operator()(const InputType& x, ValueType& f) const {
    f.setZero(values());
    for (std::size_t m = 0; m < edges.size(); ++m) {
      double d = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double t = x(k * n + edges[m].i) - x(k * n + edges[m].j);
        d += t * t;
      }
      f(static_cast<Index>(m)) = d - target[m];
    }
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    jac.setZero(values(), inputs());
    for (std::size_t m = 0; m < edges.size(); ++m) {
      for (int k = 0; k < dim; ++k) {
        const double t = 2.0 * (x(k * n + edges[m].i) - x(k * n + edges[m].j));
        jac(static_cast<Index>(m), k * n + edges[m].i) = t;
        jac(static_cast<Index>(m), k * n + edges[m].j) = -t;
      }
    }
    return 0;
  }

  std::vector<VertexPair> edges;
  std::vector<double> target;
  int n;
  int dim;
};

inline double diameter(const Matrix& p) {
  double d = 0.0;
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = i + 1; j < p.rows(); ++j) d = std::max(d, (p.row(i) - p.row(j)).norm());
  }
  return d;
}

}  // namespace detail

/// Restart k draws from mt19937_64 seeded with (seed, k), so results do not
/// depend on evaluation order.
inline OracleResult search_equivalent(const Framework& fw, int target_dim, int restarts, std::uint64_t seed,
                                      const ToleranceConfig& cfg) {
  const int n = fw.vertex_count();
  const int r = fw.dimension();
  if (target_dim < r || target_dim > n - 1) {
    throw InvalidInput("target dimension must lie in [" + std::to_string(r) + ", " + std::to_string(n - 1) + "]");
  }
  if (restarts < 0) throw InvalidInput("restarts must be nonnegative");

  OracleResult out;
  out.target_dim = target_dim;
  out.restarts = restarts;
  const Edm d0 = edm_of(fw);
  for (const auto& pr : fw.graph().missing_edges()) out.intervals.push_back({pr, d0(pr.i, pr.j), d0(pr.i, pr.j)});

  const double sigma = detail::diameter(fw.config()) / 4.0;
  detail::EdgeResidual functor(fw, target_dim);

  for (int k = 0; k < restarts; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, sigma);

    Matrix q = Matrix::Zero(n, target_dim);
    q.leftCols(r) = fw.config();
    for (Index i = 0; i < q.size(); ++i) q.data()[i] += normal(rng);

    Vector x = Eigen::Map<const Vector>(q.data(), q.size());
    Eigen::LevenbergMarquardt<detail::EdgeResidual> lm(functor);
    lm.setFtol(1e-15);
    lm.setXtol(1e-15);
    lm.setMaxfev(cfg.max_iters);
    lm.minimize(x);

    Vector f(functor.values());
    functor(x, f);
    const double objective = f.squaredNorm();
    if (objective > 1e-16) continue;

    const Matrix qc = center(Eigen::Map<const Matrix>(x.data(), n, target_dim));
    FoundConfiguration fc;
    fc.config = qc;
    fc.objective = objective;
    fc.residual = max_edge_violation(fw, qc);
    fc.dimension = numerical_rank(qc, cfg);
    const Edm dq = edm_of(qc);
    for (auto& iv : out.intervals) {
      iv.lo = std::min(iv.lo, dq(iv.pair.i, iv.pair.j));
      iv.hi = std::max(iv.hi, dq(iv.pair.i, iv.pair.j));
    }
    out.residual = std::max(out.residual, fc.residual);
    out.found.push_back(std::move(fc));
  }
  return out;
}

struct CrossCheck {
  bool consistent = true;
  std::vector<std::string> contradictions;
};

/// Flags Certified linkage or rigidity contradicted by an observed spread.
inline CrossCheck cross_check(const Report& report, const OracleResult& oracle, double max_spread = 1e-4) {
  CrossCheck out;
  for (const auto& c : report.certificates) {
    if (c.verdict != Verdict::Certified) continue;
    if (c.property.kind == PropertyKind::UniversallyLinked && c.property.pair) {
      const auto& iv = oracle.interval(*c.property.pair);
      if (iv.spread() > max_spread) {
        out.contradictions.push_back(c.property.name() + " certified but oracle spread is " +
                                     std::to_string(iv.spread()));
      }
    } else if (c.property.kind == PropertyKind::UniversallyRigid) {
      for (const auto& iv : oracle.intervals) {
        if (iv.spread() > max_spread) {
          out.contradictions.push_back("UniversallyRigid certified but pair {" + iv.pair.label() +
                                       "} has oracle spread " + std::to_string(iv.spread()));
        }
      }
    }
  }
  out.consistent = out.contradictions.empty();
  return out;
}

}  // namespace unirigid
