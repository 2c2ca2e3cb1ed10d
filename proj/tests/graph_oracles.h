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

// Slow reference implementations of the graph metrics, written from the
// definitions over a dense adjacency matrix. They share no code with the
// library.

#ifndef FGML_TESTS_GRAPH_ORACLES_H_
#define FGML_TESTS_GRAPH_ORACLES_H_

#include <cstdint>
#include <utility>
#include <vector>

namespace fgml::oracle {

using Adjacency = std::vector<std::vector<int>>;  // 0/1, symmetric

Adjacency FromEdges(int n, const std::vector<std::pair<int, int>>& edges);

// Sum over unordered pairs {s, t} (s, t != v) of the share of shortest s-t
// paths through v, every path enumerated explicitly, divided by
// (n-1)(n-2)/2.
std::vector<double> Betweenness(const Adjacency& a);

// Principal eigenvector of A (cyclic Jacobi), unit L2 norm, non-negative sign.
std::vector<double> PrincipalEigenvector(const Adjacency& a);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, with the
// matching eigenvectors as columns of `vectors`.
void JacobiEigen(std::vector<std::vector<double>> m, std::vector<double>* values,
                 std::vector<std::vector<double>>* vectors);

std::vector<double> Clustering(const Adjacency& a);
std::vector<double> AverageNeighborDegree(const Adjacency& a);

// Random connected simple graph: a random spanning tree plus each remaining
// pair with probability p.
std::vector<std::pair<int, int>> RandomConnectedGraph(int n, double p,
                                                      uint64_t seed);

}  // namespace fgml::oracle

#endif  // FGML_TESTS_GRAPH_ORACLES_H_
