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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "graph_oracles.h"

namespace fgml {
namespace {

using Edges = std::vector<std::pair<int, int>>;

const Edges kPath = {{0, 1}, {1, 2}};
const Edges kTriangle = {{0, 1}, {1, 2}, {0, 2}};
const Edges kStar = {{0, 1}, {0, 2}, {0, 3}};

TraceSample Sample(const std::string& text) {
  ParserOptions o;
  o.strict = true;
  return ParseTraceText(text, o);
}

TEST(BuildGraph, CountsEdges) {
  CallGraph g = BuildGraph(Sample(
      " 0)               |  A() {\n"
      " 0)   0.100 us    |    B();\n"
      " 0)   0.100 us    |    B();\n"
      " 0)   0.100 us    |    C();\n"
      " 0)   1.000 us    |  }\n"));
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"A", "B", "C"}));
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ((g.edges.at({"A", "B"})), 2);
  EXPECT_EQ((g.edges.at({"A", "C"})), 1);
  EXPECT_EQ(g.node_stats.at("B").total_calls, 2);
  EXPECT_NEAR(g.node_stats.at("A").total_duration_us, 1.0, 1e-12);
}

TEST(BuildGraph, SingleLeafAndEmpty) {
  CallGraph one = BuildGraph(Sample(" 0)   0.100 us    |  f();\n"));
  EXPECT_EQ(one.nodes.size(), 1u);
  EXPECT_TRUE(one.edges.empty());
  CallGraph none = BuildGraph(TraceSample{});
  EXPECT_TRUE(none.nodes.empty());
}

TEST(UndirectedGraph, DropsSelfLoopsAndDuplicates) {
  auto g = UndirectedGraph::FromEdges(3, {{0, 0}, {0, 1}, {1, 0}, {1, 2}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_TRUE(g.HasEdge(2, 1));
}

TEST(Betweenness, PathTriangle) {
  auto path = Betweenness(UndirectedGraph::FromEdges(3, kPath));
  EXPECT_EQ(path, (std::vector<double>{0, 1, 0}));
  for (double v : Betweenness(UndirectedGraph::FromEdges(3, kTriangle))) {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_EQ(Betweenness(UndirectedGraph::FromEdges(2, {{0, 1}})),
            (std::vector<double>{0, 0}));
}

TEST(Eigenvector, TriangleAndStar) {
  auto tri = Eigenvector(UndirectedGraph::FromEdges(3, kTriangle));
  EXPECT_TRUE(tri.converged);
  for (double v : tri.values) EXPECT_NEAR(v, 1.0 / std::sqrt(3.0), 1e-6);
  auto star = Eigenvector(UndirectedGraph::FromEdges(4, kStar));
  for (int leaf = 1; leaf <= 3; ++leaf) {
    EXPECT_GT(star.values[0], star.values[leaf]);
    EXPECT_NEAR(star.values[leaf], star.values[1], 1e-12);
  }
}

TEST(Eigenvector, DisconnectedUsesLargestComponent) {
  // Triangle {0,1,2} plus edge {3,4}.
  auto r = Eigenvector(
      UndirectedGraph::FromEdges(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}}));
  EXPECT_EQ(r.values[3], 0.0);
  EXPECT_EQ(r.values[4], 0.0);
  EXPECT_NEAR(r.values[0], 1.0 / std::sqrt(3.0), 1e-6);
}

TEST(Eigenvector, EdgelessIsZero) {
  auto r = Eigenvector(UndirectedGraph(1));
  EXPECT_EQ(r.values, (std::vector<double>{0.0}));
}

TEST(Clustering, Conventions) {
  EXPECT_EQ(Clustering(UndirectedGraph::FromEdges(3, kTriangle)),
            (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(Clustering(UndirectedGraph::FromEdges(3, kPath)),
            (std::vector<double>{0, 0, 0}));
}

TEST(AverageNeighborDegree, StarPathIsolated) {
  EXPECT_EQ(AverageNeighborDegree(UndirectedGraph::FromEdges(4, kStar)),
            (std::vector<double>{1, 3, 3, 3}));
  EXPECT_EQ(AverageNeighborDegree(UndirectedGraph::FromEdges(3, kPath))[1], 1.0);
  EXPECT_EQ(AverageNeighborDegree(UndirectedGraph(1))[0], 0.0);
}

TEST(Metrics, CompleteGraph) {
  Edges k5;
  for (int u = 0; u < 5; ++u) {
    for (int v = u + 1; v < 5; ++v) k5.emplace_back(u, v);
  }
  auto g = UndirectedGraph::FromEdges(5, k5);
  for (double v : Betweenness(g)) EXPECT_EQ(v, 0.0);
  for (double v : Clustering(g)) EXPECT_EQ(v, 1.0);
}

TEST(Metrics, MatchOraclesOnRandomGraphs) {
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + trial % 10;
    Edges edges = oracle::RandomConnectedGraph(n, 0.3, 1000 + trial);
    auto g = UndirectedGraph::FromEdges(n, edges);
    auto a = oracle::FromEdges(n, edges);
    auto bt = Betweenness(g);
    auto bt_ref = oracle::Betweenness(a);
    auto ev = Eigenvector(g).values;
    auto ev_ref = oracle::PrincipalEigenvector(a);
    auto cl = Clustering(g);
    auto cl_ref = oracle::Clustering(a);
    auto nd = AverageNeighborDegree(g);
    auto nd_ref = oracle::AverageNeighborDegree(a);
    for (int v = 0; v < n; ++v) {
      EXPECT_NEAR(bt[v], bt_ref[v], 1e-9);
      EXPECT_NEAR(ev[v], ev_ref[v], 1e-5);
      EXPECT_EQ(cl[v], cl_ref[v]);
      EXPECT_EQ(nd[v], nd_ref[v]);
    }
  }
}

TEST(Metrics, PermutationEquivariant) {
  Edges edges = oracle::RandomConnectedGraph(8, 0.35, 77);
  std::vector<int> perm = {3, 7, 0, 5, 1, 6, 2, 4};
  Edges permuted;
  for (auto [u, v] : edges) permuted.emplace_back(perm[u], perm[v]);
  auto g = UndirectedGraph::FromEdges(8, edges);
  auto h = UndirectedGraph::FromEdges(8, permuted);
  auto bg = Betweenness(g), bh = Betweenness(h);
  auto eg = Eigenvector(g).values, eh = Eigenvector(h).values;
  auto cg = Clustering(g), ch = Clustering(h);
  for (int v = 0; v < 8; ++v) {
    EXPECT_NEAR(bg[v], bh[perm[v]], 1e-12);
    EXPECT_NEAR(eg[v], eh[perm[v]], 1e-9);
    EXPECT_EQ(cg[v], ch[perm[v]]);
  }
}

TEST(Eigenvector, UnitNormNonNegative) {
  Edges edges = oracle::RandomConnectedGraph(10, 0.2, 5);
  auto r = Eigenvector(UndirectedGraph::FromEdges(10, edges));
  double norm = 0.0;
  for (double v : r.values) {
    EXPECT_GE(v, 0.0);
    norm += v * v;
  }
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(NodeValues, KeyedByName) {
  CallGraph g = BuildGraph(Sample(
      " 0)               |  A() {\n"
      " 0)               |    B() {\n"
      " 0)   0.100 us    |      C();\n"
      " 0)   0.500 us    |    }\n"
      " 0)   1.000 us    |  }\n"));
  NodeValues b = Betweenness(g);
  EXPECT_EQ(b.at("B"), 1.0);
  EXPECT_EQ(b.at("A"), 0.0);
  EXPECT_EQ(AverageNeighborDegree(g).at("B"), 1.0);
}

TEST(WriteEdgeList, OneLinePerEdge) {
  CallGraph g = BuildGraph(Sample(
      " 0)               |  A() {\n"
      " 0)   0.100 us    |    B();\n"
      " 0)   0.100 us    |    B();\n"
      " 0)   1.000 us    |  }\n"));
  std::ostringstream out;
  WriteEdgeList(g, out);
  EXPECT_EQ(out.str(), "A B 2\n");
}

}  // namespace
}  // namespace fgml
