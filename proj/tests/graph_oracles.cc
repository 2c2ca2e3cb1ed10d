/*
 * Copyright 2026 The fgml Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "graph_oracles.h"

#include <cmath>
#include <functional>
#include <random>

namespace fgml::oracle {

Adjacency FromEdges(int n, const std::vector<std::pair<int, int>>& edges) {
  Adjacency a(n, std::vector<int>(n, 0));
  for (auto [u, v] : edges) {
    if (u == v) continue;
    a[u][v] = 1;
    a[v][u] = 1;
  }
  return a;
}

namespace {

std::vector<int> Distances(const Adjacency& a, int s) {
  const int n = static_cast<int>(a.size());
  std::vector<int> dist(n, -1);
  std::vector<int> frontier = {s};
  dist[s] = 0;
  for (int d = 1; !frontier.empty(); ++d) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int v = 0; v < n; ++v) {
        if (a[u][v] && dist[v] < 0) {
          dist[v] = d;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

std::vector<double> Betweenness(const Adjacency& a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> out(n, 0.0);
  if (n < 3) return out;
  for (int s = 0; s < n; ++s) {
    std::vector<int> ds = Distances(a, s);
    for (int t = s + 1; t < n; ++t) {
      if (ds[t] < 0) continue;
      // Enumerate every shortest path s -> t.
      std::vector<std::vector<int>> paths;
      std::vector<int> path = {s};
      std::function<void(int)> walk = [&](int u) {
        if (u == t) {
          paths.push_back(path);
          return;
        }
        for (int v = 0; v < n; ++v) {
          if (a[u][v] && ds[v] == ds[u] + 1 &&
              static_cast<int>(path.size()) <= ds[t]) {
            path.push_back(v);
            walk(v);
            path.pop_back();
          }
        }
      };
      walk(s);
      std::vector<int> through(n, 0);
      int total = 0;
      for (const auto& p : paths) {
        if (p.back() != t) continue;
        ++total;
        for (size_t i = 1; i + 1 < p.size(); ++i) ++through[p[i]];
      }
      for (int v = 0; v < n; ++v) {
        if (total > 0) out[v] += static_cast<double>(through[v]) / total;
      }
    }
  }
  const double pairs = (n - 1.0) * (n - 2.0) / 2.0;
  for (double& v : out) v /= pairs;
  return out;
}

void JacobiEigen(std::vector<std::vector<double>> m, std::vector<double>* values,
                 std::vector<std::vector<double>>* vectors) {
  const size_t n = m.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
    }
    if (off < 1e-30) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) < 1e-300) continue;
        double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          double mkp = m[k][p];
          double mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (size_t k = 0; k < n; ++k) {
          double mpk = m[p][k];
          double mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
        for (size_t k = 0; k < n; ++k) {
          double vkp = v[k][p];
          double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  values->assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) (*values)[i] = m[i][i];
  *vectors = std::move(v);
}

std::vector<double> PrincipalEigenvector(const Adjacency& a) {
  const size_t n = a.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
  }
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
  JacobiEigen(m, &values, &vectors);
  size_t best = 0;
  for (size_t i = 1; i < n; ++i) {
    if (values[i] > values[best]) best = i;
  }
  std::vector<double> out(n);
  double norm = 0.0;
  double sum = 0.0;
  for (size_t k = 0; k < n; ++k) {
    out[k] = vectors[k][best];
    norm += out[k] * out[k];
    sum += out[k];
  }
  norm = std::sqrt(norm);
  const double sign = sum < 0 ? -1.0 : 1.0;
  for (double& x : out) x = sign * x / norm;
  return out;
}

std::vector<double> Clustering(const Adjacency& a) {
  const size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    int deg = 0;
    int triangles = 0;
    for (size_t i = 0; i < n; ++i) {
      if (!a[v][i]) continue;
      ++deg;
      for (size_t j = i + 1; j < n; ++j) {
        if (a[v][j] && a[i][j]) ++triangles;
      }
    }
    if (deg >= 2) out[v] = 2.0 * triangles / (deg * (deg - 1.0));
  }
  return out;
}

std::vector<double> AverageNeighborDegree(const Adjacency& a) {
  const size_t n = a.size();
  std::vector<int> degree(n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) degree[i] += a[i][j];
  }
  std::vector<double> out(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    if (degree[v] == 0) continue;
    double total = 0.0;
    for (size_t w = 0; w < n; ++w) {
      if (a[v][w]) total += degree[w];
    }
    out[v] = total / degree[v];
  }
  return out;
}

std::vector<std::pair<int, int>> RandomConnectedGraph(int n, double p,
                                                      uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> edges;
  Adjacency a(n, std::vector<int>(n, 0));
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng() % static_cast<uint64_t>(v));
    edges.emplace_back(u, v);
    a[u][v] = a[v][u] = 1;
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (!a[u][v] && r < p) {
        edges.emplace_back(u, v);
        a[u][v] = a[v][u] = 1;
      }
    }
  }
  return edges;
}

}  // namespace fgml::oracle
