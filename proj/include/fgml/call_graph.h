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

#ifndef FGML_CALL_GRAPH_H_
#define FGML_CALL_GRAPH_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fgml/trace_parser.h"

namespace fgml {

struct NodeStats {
  int64_t total_calls = 0;
  double total_duration_us = 0.0;  // unknown durations count as 0
};

// Directed call multigraph keyed by function name. Edge values are the number
// of observed parent->child call occurrences.
struct CallGraph {
  std::vector<std::string> nodes;  // sorted
  std::map<std::pair<std::string, std::string>, int64_t> edges;
  std::map<std::string, NodeStats> node_stats;

  // Index of `name` in `nodes`, or -1.
  int IndexOf(const std::string& name) const;
};

CallGraph BuildGraph(const TraceSample& sample);

// Undirected simple view: sorted, duplicate-free neighbour lists without
// self-loops. All four node metrics are computed on this view.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(size_t n) : adj_(n) {}

  static UndirectedGraph FromEdges(
      size_t n, const std::vector<std::pair<int, int>>& edges);

  size_t size() const { return adj_.size(); }
  size_t edge_count() const;
  const std::vector<int>& neighbors(size_t v) const { return adj_[v]; }
  size_t degree(size_t v) const { return adj_[v].size(); }
  bool HasEdge(int u, int v) const;

 private:
  std::vector<std::vector<int>> adj_;
};

UndirectedGraph UndirectedView(const CallGraph& graph);

// Brandes' algorithm, normalised by (n-1)(n-2)/2; all zeros when n < 3.
std::vector<double> Betweenness(const UndirectedGraph& g);

struct EigenvectorResult {
  std::vector<double> values;
  bool converged = true;
  int iterations = 0;
};

// Principal eigenvector of the adjacency matrix restricted to the largest
// connected component (other nodes get 0), by power iteration on A + I from a
// uniform start, L2-normalised. Stops when the largest per-node change and
// the geometric estimate of the remaining change both fall below `tolerance`,
// or after `max_iterations` with converged = false.
// A graph without edges has no principal direction and yields all zeros.
EigenvectorResult Eigenvector(const UndirectedGraph& g,
                              int max_iterations = 1000,
                              double tolerance = 1e-6);

// Local clustering coefficient; 0 for degree < 2.
std::vector<double> Clustering(const UndirectedGraph& g);

// Mean degree of each node's neighbours; 0 for isolated nodes.
std::vector<double> AverageNeighborDegree(const UndirectedGraph& g);

using NodeValues = std::map<std::string, double>;

NodeValues Betweenness(const CallGraph& graph);
NodeValues Eigenvector(const CallGraph& graph, bool* converged = nullptr);
NodeValues Clustering(const CallGraph& graph);
NodeValues AverageNeighborDegree(const CallGraph& graph);

// `caller callee count` per line.
void WriteEdgeList(const CallGraph& graph, std::ostream& out);

}  // namespace fgml

#endif  // FGML_CALL_GRAPH_H_
