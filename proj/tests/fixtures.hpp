#pragma once

// The five reference frameworks used throughout the suite (1-based edges).

#include <initializer_list>
#include <utility>
#include <vector>

#include "unirigid/framework.hpp"

namespace fixtures {

using unirigid::Framework;
using unirigid::Graph;
using unirigid::Matrix;
using unirigid::VertexPair;

inline Graph graph(int n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<VertexPair> e;
  for (auto [a, b] : edges) e.push_back(VertexPair::one_based(a, b));
  return Graph(n, e);
}

inline Matrix points(int n, int r, std::initializer_list<double> xs) {
  Matrix p(n, r);
  auto it = xs.begin();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < r; ++k) p(i, k) = *it++;
  return p;
}

/// Three collinear vertices with two apexes; {1,5},{3,4} linked, {4,5} not.
inline Framework f1() {
  return Framework(graph(5, {{1, 2}, {2, 3}, {1, 3}, {1, 4}, {2, 4}, {2, 5}, {3, 5}}),
                   points(5, 2, {0, 0, 1, 0, 2, 0, 1, 1, 1, -1}));
}

inline Framework f2a() {
  return Framework(graph(5, {{1, 2}, {2, 3}, {1, 3}, {1, 4}, {2, 4}, {1, 5}, {3, 5}, {4, 5}}),
                   points(5, 2, {0, 2, 1, 1, 2, 0, 0, 0, -1, -1}));
}

inline Framework f2b() {
  return Framework(graph(5, {{1, 2}, {2, 3}, {1, 3}, {2, 4}, {1, 5}, {3, 5}, {4, 5}}),
                   points(5, 2, {0, 2, 1, 1, 2, 0, 0, 0, -1, -1}));
}

/// 2 x 1 rectangle on a 4-cycle.
inline Framework f3() {
  return Framework(graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}), points(4, 2, {-1, -0.5, -1, 0.5, 1, 0.5, 1, -0.5}));
}

/// Four collinear points, K4 minus {1,4}.
inline Framework f4() {
  return Framework(graph(4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}}), points(4, 1, {0, 1, 2, 3}));
}

}  // namespace fixtures
