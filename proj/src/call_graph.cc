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

#include "fgml/call_graph.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace fgml {

int CallGraph::IndexOf(const std::string& name) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
  if (it == nodes.end() || *it != name) return -1;
  return static_cast<int>(it - nodes.begin());
}

namespace {

void AddRecord(const CallRecord& rec, std::set<std::string>* names,
               CallGraph* graph) {
  names->insert(rec.name);
  NodeStats& stats = graph->node_stats[rec.name];
  ++stats.total_calls;
  stats.total_duration_us += rec.duration_us.value_or(0.0);
  for (const auto& child : rec.children) {
    ++graph->edges[{rec.name, child.name}];
    AddRecord(child, names, graph);
  }
}

}  // namespace

CallGraph BuildGraph(const TraceSample& sample) {
  CallGraph graph;
  std::set<std::string> names;
  for (const auto& [cpu, roots] : sample.cpus) {
    for (const auto& root : roots) AddRecord(root, &names, &graph);
  }
  graph.nodes.assign(names.begin(), names.end());
  return graph;
}

UndirectedGraph UndirectedGraph::FromEdges(
    size_t n, const std::vector<std::pair<int, int>>& edges) {
  UndirectedGraph g(n);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& list : g.adj_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return g;
}

size_t UndirectedGraph::edge_count() const {
  size_t total = 0;
  for (const auto& list : adj_) total += list.size();
  return total / 2;
}

bool UndirectedGraph::HasEdge(int u, int v) const {
  const auto& list = adj_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

UndirectedGraph UndirectedView(const CallGraph& graph) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(graph.edges.size());
  for (const auto& [key, count] : graph.edges) {
    edges.emplace_back(graph.IndexOf(key.first), graph.IndexOf(key.second));
  }
  return UndirectedGraph::FromEdges(graph.nodes.size(), edges);
}

std::vector<double> Betweenness(const UndirectedGraph& g) {
  const size_t n = g.size();
  std::vector<double> centrality(n, 0.0);
  if (n < 3) return centrality;

  std::vector<int> order;
  std::vector<std::vector<int>> preds(n);
  std::vector<double> sigma(n);
  std::vector<int> dist(n);
  std::vector<double> delta(n);
  std::deque<int> queue;
  for (size_t s = 0; s < n; ++s) {
    order.clear();
    for (size_t v = 0; v < n; ++v) preds[v].clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.assign(1, static_cast<int>(s));
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (int w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (int v : preds[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != static_cast<int>(s)) centrality[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  const double pairs = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (double& c : centrality) c /= pairs;
  return centrality;
}

namespace {

// Node ids of the largest connected component (ties: the one containing the
// smallest node id).
std::vector<int> LargestComponent(const UndirectedGraph& g) {
  const size_t n = g.size();
  std::vector<int> component(n, -1);
  std::vector<int> best;
  for (size_t s = 0; s < n; ++s) {
    if (component[s] >= 0) continue;
    std::vector<int> members{static_cast<int>(s)};
    component[s] = static_cast<int>(s);
    for (size_t i = 0; i < members.size(); ++i) {
      for (int w : g.neighbors(members[i])) {
        if (component[w] < 0) {
          component[w] = static_cast<int>(s);
          members.push_back(w);
        }
      }
    }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace

EigenvectorResult Eigenvector(const UndirectedGraph& g, int max_iterations,
                              double tolerance) {
  EigenvectorResult result;
  const size_t n = g.size();
  result.values.assign(n, 0.0);
  if (g.edge_count() == 0) return result;

  std::vector<int> members = LargestComponent(g);
  std::vector<double> x(n, 0.0);
  std::vector<double> next(n, 0.0);
  const double start = 1.0 / std::sqrt(static_cast<double>(members.size()));
  for (int v : members) x[v] = start;

  // The identity shift keeps bipartite components (call trees) from
  // oscillating between the +lambda and -lambda eigenvectors.
  result.converged = false;
  double prev_change = 0.0;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    double norm = 0.0;
    for (int v : members) {
      double sum = x[v];
      for (int w : g.neighbors(v)) sum += x[w];
      next[v] = sum;
      norm += sum * sum;
    }
    norm = std::sqrt(norm);
    double change = 0.0;
    for (int v : members) {
      next[v] /= norm;
      change = std::max(change, std::abs(next[v] - x[v]));
    }
    std::swap(x, next);
    result.iterations = iter;
    // Changes shrink geometrically by ratio r, so the distance still to go is
    // about change * r / (1 - r). Slow-mixing graphs (long paths) need that
    // tail below the tolerance too, not just the last step.
    double ratio = prev_change > 0.0 ? change / prev_change : 0.0;
    double tail = ratio < 1.0 ? change * ratio / (1.0 - ratio) : change;
    prev_change = change;
    if (change < tolerance && tail < tolerance) {
      result.converged = true;
      break;
    }
  }
  result.values = std::move(x);
  return result;
}

std::vector<double> Clustering(const UndirectedGraph& g) {
  const size_t n = g.size();
  std::vector<double> out(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    const auto& nbrs = g.neighbors(v);
    const size_t deg = nbrs.size();
    if (deg < 2) continue;
    size_t links = 0;
    for (size_t i = 0; i < deg; ++i) {
      for (size_t j = i + 1; j < deg; ++j) {
        if (g.HasEdge(nbrs[i], nbrs[j])) ++links;
      }
    }
    out[v] = 2.0 * static_cast<double>(links) /
             (static_cast<double>(deg) * static_cast<double>(deg - 1));
  }
  return out;
}

std::vector<double> AverageNeighborDegree(const UndirectedGraph& g) {
  const size_t n = g.size();
  std::vector<double> out(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    const auto& nbrs = g.neighbors(v);
    if (nbrs.empty()) continue;
    double total = 0.0;
    for (int w : nbrs) total += static_cast<double>(g.degree(w));
    out[v] = total / static_cast<double>(nbrs.size());
  }
  return out;
}

namespace {

NodeValues Named(const CallGraph& graph, const std::vector<double>& values) {
  NodeValues out;
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    out[graph.nodes[i]] = values[i];
  }
  return out;
}

}  // namespace

NodeValues Betweenness(const CallGraph& graph) {
  return Named(graph, Betweenness(UndirectedView(graph)));
}

NodeValues Eigenvector(const CallGraph& graph, bool* converged) {
  EigenvectorResult r = Eigenvector(UndirectedView(graph));
  if (converged) *converged = r.converged;
  return Named(graph, r.values);
}

NodeValues Clustering(const CallGraph& graph) {
  return Named(graph, Clustering(UndirectedView(graph)));
}

NodeValues AverageNeighborDegree(const CallGraph& graph) {
  return Named(graph, AverageNeighborDegree(UndirectedView(graph)));
}

void WriteEdgeList(const CallGraph& graph, std::ostream& out) {
  for (const auto& [key, count] : graph.edges) {
    out << key.first << ' ' << key.second << ' ' << count << '\n';
  }
}

}  // namespace fgml
