#pragma once

// Graphs, configurations and the EDM operators T, K, K_V, T_V.
//
// Internally vertices are 0-based; every string/file/report uses 1-based
// indices (see VertexPair::label).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "unirigid/errors.hpp"
#include "unirigid/numerics.hpp"

namespace unirigid {

/// Unordered vertex pair, stored 0-based with i < j.
struct VertexPair {
  int i = 0;
  int j = 0;

  static VertexPair make(int a, int b) { return a < b ? VertexPair{a, b} : VertexPair{b, a}; }
  /// From 1-based indices as they appear in files and on the command line.
  static VertexPair one_based(int a, int b) { return make(a - 1, b - 1); }

  std::string label() const { return std::to_string(i + 1) + "," + std::to_string(j + 1); }

  friend bool operator==(const VertexPair&, const VertexPair&) = default;
  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

/// Simple graph; connected and not complete.
class Graph {
 public:
  Graph(int n, std::vector<VertexPair> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 2) throw InvalidInput("graph needs at least 2 vertices");
    for (const auto& e : edges_) {
      if (e.i < 0 || e.j < 0 || e.i >= n_ || e.j >= n_) {
        throw InvalidInput("edge {" + e.label() + "} out of range 1.." + std::to_string(n_));
      }
      if (e.i == e.j) throw InvalidInput("loop at vertex " + std::to_string(e.i + 1));
      if (e.i > e.j) throw InvalidInput("edge {" + e.label() + "} not normalized");
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t k = 1; k < edges_.size(); ++k) {
      if (edges_[k] == edges_[k - 1]) throw InvalidInput("duplicate edge {" + edges_[k].label() + "}");
    }
    adjacent_.assign(static_cast<std::size_t>(n_ * n_), false);
    for (const auto& e : edges_) {
      adjacent_[idx(e.i, e.j)] = true;
      adjacent_[idx(e.j, e.i)] = true;
    }
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        if (!adjacent(i, j)) missing_.push_back({i, j});
      }
    }
    if (missing_.empty()) throw InvalidInput("graph is complete; there are no missing edges");
    if (!connected()) throw InvalidInput("graph is not connected");
  }

  int vertex_count() const { return n_; }
  const std::vector<VertexPair>& edges() const { return edges_; }
  /// Non-adjacent pairs in lexicographic order; y vectors are indexed this way.
  const std::vector<VertexPair>& missing_edges() const { return missing_; }
  bool adjacent(int i, int j) const { return adjacent_[idx(i, j)]; }

  Matrix adjacency() const {
    Matrix h = Matrix::Zero(n_, n_);
    for (const auto& e : edges_) h(e.i, e.j) = h(e.j, e.i) = 1.0;
    return h;
  }

  /// Position of a pair in missing_edges(), or -1.
  int missing_index(VertexPair p) const {
    auto it = std::lower_bound(missing_.begin(), missing_.end(), p);
    if (it == missing_.end() || !(*it == p)) return -1;
    return static_cast<int>(it - missing_.begin());
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }

  bool connected() const {
    std::vector<int> stack{0};
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n_; ++w) {
        if (!seen[static_cast<std::size_t>(w)] && adjacent(v, w)) {
          seen[static_cast<std::size_t>(w)] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n_;
  }

  int n_;
  std::vector<VertexPair> edges_;
  std::vector<VertexPair> missing_;
  std::vector<bool> adjacent_;
};

/// Translates the configuration so that its centroid is the origin.
inline Matrix center(const Matrix& config) {
  if (config.rows() == 0) return config;
  const Eigen::RowVectorXd mean = config.colwise().mean();
  return config.rowwise() - mean;
}

/// Bar framework (G,p): row i of config() is p^i, centroid at the origin,
/// and the points affinely span R^dimension().
class Framework {
 public:
  Framework(Graph graph, const Matrix& config, const ToleranceConfig& cfg = {})
      : graph_(std::move(graph)), config_(center(config)) {
    if (config_.rows() != graph_.vertex_count()) {
      throw InvalidInput("configuration has " + std::to_string(config_.rows()) +
                         " points but the graph has " + std::to_string(graph_.vertex_count()) +
                         " vertices");
    }
    if (config_.cols() < 1) throw InvalidInput("dimension must be positive");
    if (!config_.allFinite()) throw InvalidInput("configuration has non-finite coordinates");
    Matrix pe(config_.rows(), config_.cols() + 1);
    pe << config_, Vector::Ones(config_.rows());
    if (numerical_rank(pe, cfg) != config_.cols() + 1) {
      throw InvalidInput("points do not affinely span R^" + std::to_string(config_.cols()));
    }
  }

  const Graph& graph() const { return graph_; }
  const Matrix& config() const { return config_; }
  int dimension() const { return static_cast<int>(config_.cols()); }
  int vertex_count() const { return graph_.vertex_count(); }

 private:
  Graph graph_;
  Matrix config_;
};

/// Squared-distance matrix: symmetric with an exactly zero diagonal.
class Edm {
 public:
  explicit Edm(SymMatrix d) : d_(std::move(d)) {
    for (Index i = 0; i < d_.order(); ++i) {
      if (d_(i, i) != 0.0) throw InvalidInput("distance matrix has a nonzero diagonal entry");
    }
  }
  Index order() const { return d_.order(); }
  const SymMatrix& sym() const { return d_; }
  const Matrix& matrix() const { return d_.matrix(); }
  double operator()(Index i, Index j) const { return d_(i, j); }

 private:
  SymMatrix d_;
};

/// Canonical orthonormal basis of e-perp: columns 2..n of the Householder
/// reflector that maps e to sqrt(n) e_1.
inline Matrix build_V(int n) {
  if (n < 2) throw InvalidInput("build_V needs n >= 2");
  Vector v = Vector::Ones(n);
  v(0) -= std::sqrt(static_cast<double>(n));
  const Matrix h = Matrix::Identity(n, n) - (2.0 / v.squaredNorm()) * v * v.transpose();
  return h.rightCols(n - 1);
}

/// E^{ij}: ones at (i,j) and (j,i).
inline Matrix unit_pair(Index n, VertexPair p) {
  Matrix e = Matrix::Zero(n, n);
  e(p.i, p.j) = e(p.j, p.i) = 1.0;
  return e;
}

inline Edm edm_of(const Matrix& config) {
  const Index n = config.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (config.row(i) - config.row(j)).squaredNorm();
    }
  }
  return Edm(SymMatrix(d));
}

inline Edm edm_of(const Framework& fw) { return edm_of(fw.config()); }

/// T(D) = -1/2 J D J with J = I - ee^T/n.
inline SymMatrix op_T(const SymMatrix& d) {
  const Index n = d.order();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  return SymMatrix(-0.5 * j * d.matrix() * j);
}

/// K(B) = diag(B) e^T + e diag(B)^T - 2B.
inline SymMatrix op_K(const SymMatrix& b) {
  const Index n = b.order();
  const Vector diag = b.matrix().diagonal();
  const Vector e = Vector::Ones(n);
  return SymMatrix(diag * e.transpose() + e * diag.transpose() - 2.0 * b.matrix());
}

inline Edm op_KV(const SymMatrix& x, const Matrix& v) {
  Matrix d = op_K(SymMatrix(v * x.matrix() * v.transpose())).matrix();
  d.diagonal().setZero();  // exact in exact arithmetic; pin it against rounding
  return Edm(SymMatrix(d));
}

inline Edm op_KV(const SymMatrix& x) { return op_KV(x, build_V(static_cast<int>(x.order()) + 1)); }

inline SymMatrix op_TV(const SymMatrix& d, const Matrix& v) {
  return SymMatrix(-0.5 * v.transpose() * d.matrix() * v);
}

inline SymMatrix op_TV(const Edm& d) {
  return op_TV(d.sym(), build_V(static_cast<int>(d.order())));
}

/// X = V^T P P^T V, order n-1, PSD of rank r.
inline SymMatrix projected_gram(const Framework& fw, const Matrix& v) {
  const Matrix vp = v.transpose() * fw.config();
  return SymMatrix(vp * vp.transpose());
}

inline SymMatrix projected_gram(const Framework& fw) {
  return projected_gram(fw, build_V(fw.vertex_count()));
}

/// Largest |d'_ij - d_ij| over the edges of fw, for another configuration
/// of the same vertex set.
inline double max_edge_violation(const Framework& fw, const Matrix& other) {
  if (other.rows() != fw.vertex_count()) throw InvalidInput("configurations have different vertex counts");
  double worst = 0.0;
  for (const auto& e : fw.graph().edges()) {
    const double d0 = (fw.config().row(e.i) - fw.config().row(e.j)).squaredNorm();
    const double d1 = (other.row(e.i) - other.row(e.j)).squaredNorm();
    worst = std::max(worst, std::abs(d1 - d0));
  }
  return worst;
}

struct EdmCheck {
  bool is_edm = false;
  int embedding_dim = -1;  // -1 when not an EDM
  std::string reason;
};

/// Zero diagonal, symmetric and T(D) PSD; embedding dimension = rank T(D).
inline EdmCheck edm_check(const Matrix& d, const ToleranceConfig& cfg) {
  if (d.rows() != d.cols()) return {false, -1, "matrix is not square"};
  if (!d.allFinite()) return {false, -1, "matrix has non-finite entries"};
  const double scale = std::max(1.0, max_abs(d));
  if (max_abs(d - d.transpose()) > cfg.rank_tol * scale) return {false, -1, "matrix is not symmetric"};
  for (Index i = 0; i < d.rows(); ++i) {
    if (std::abs(d(i, i)) > cfg.rank_tol * scale) {
      return {false, -1, "diagonal entry " + std::to_string(i + 1) + " is nonzero"};
    }
  }
  const SymMatrix t = op_T(SymMatrix(d));
  if (!psd_check(t, cfg)) return {false, -1, "T(D) is not positive semidefinite"};
  return {true, rank_tol(t, cfg), ""};
}

/// Factor B = P P^T with P^T e = 0 and rank(B) columns.
inline Matrix realize(const SymMatrix& b, const ToleranceConfig& cfg) {
  const Index n = b.order();
  const SymEig eig = sym_eig(b);
  const double scale = spectral_scale(eig.values);
  if (n > 0 && eig.values(0) < -cfg.psd_tol * scale) {
    throw InvalidInput("realize: matrix is not positive semidefinite");
  }
  if (n > 0 && (b.matrix() * Vector::Ones(n)).cwiseAbs().maxCoeff() > cfg.psd_tol * scale * static_cast<double>(n)) {
    throw InvalidInput("realize: matrix does not annihilate e");
  }
  std::vector<Index> keep;
  for (Index k = n - 1; k >= 0; --k) {
    if (eig.values(k) > cfg.rank_tol * scale) keep.push_back(k);
  }
  Matrix p(n, static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Index k = keep[c];
    p.col(static_cast<Index>(c)) = eig.vectors.col(k) * std::sqrt(eig.values(k));
  }
  return center(p);
}

}  // namespace unirigid
