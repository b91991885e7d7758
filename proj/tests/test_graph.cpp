#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rfim/error.hpp"
#include "rfim/graph.hpp"

using namespace rfim;

namespace {

Graph p3() { return Graph::build(3, {{0, 1}, {1, 2}}); }
Graph k4() { return Graph::build(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}); }

bool induces_connected(const Graph& g, const std::vector<int>& vs) {
  if (vs.empty()) return true;
  return is_connected(induced_subgraph(g, vs));
}

}  // namespace

TEST(Graph, BuildExamples) {
  const Graph one = Graph::build(1, {});
  EXPECT_EQ(one.num_vertices(), 1);
  EXPECT_EQ(one.max_degree(), 0);
  const Graph p = p3();
  EXPECT_EQ(p.degree(0), 1);
  EXPECT_EQ(p.degree(1), 2);
  EXPECT_EQ(p.degree(2), 1);
  EXPECT_EQ(k4().max_degree(), 3);
  EXPECT_EQ(k4().num_edges(), 6);
}

TEST(Graph, RejectsBadInput) {
  EXPECT_THROW(Graph::build(2, {{0, 2}}), InputError);
  EXPECT_THROW(Graph::build(2, {{1, 1}}), InputError);
  EXPECT_THROW(Graph::build(2, {{-1, 0}}), InputError);
}

TEST(Graph, DeduplicatesEdges) {
  const Graph g = Graph::build(3, {{0, 1}, {1, 0}, {1, 2}, {0, 1}});
  EXPECT_EQ(g.num_edges(), 2);
  EXPECT_EQ(g.edge(0), (Edge{0, 1}));
  EXPECT_EQ(*g.edge_id(1, 0), 0);
}

TEST(Graph, AdjacencySymmetric) {
  const Graph g = gen::random_regular(20, 3, 5);
  for (int v = 0; v < g.num_vertices(); ++v) {
    EXPECT_EQ(g.degree(v), 3);
    for (int w : g.neighbors(v)) {
      const auto nw = g.neighbors(w);
      EXPECT_NE(std::find(nw.begin(), nw.end(), v), nw.end());
    }
  }
}

TEST(Ball, Examples) {
  const Graph p = p3();
  EXPECT_EQ(ball(p, 1, 0), (VertexSet{1}));
  EXPECT_EQ(ball(p, 1, 1), (VertexSet{0, 1, 2}));
  EXPECT_EQ(ball(p, 0, 1), (VertexSet{0, 1}));
  EXPECT_THROW(ball(p, 3, 1), InputError);
}

TEST(Ball, NestedAndExhaustive) {
  const Graph g = gen::grid(4, 5);
  for (int v = 0; v < g.num_vertices(); ++v) {
    VertexSet prev;
    for (int r = 0; r <= 8; ++r) {
      const VertexSet b = ball(g, v, r);
      EXPECT_TRUE(std::includes(b.begin(), b.end(), prev.begin(), prev.end()));
      prev = b;
    }
    EXPECT_EQ(static_cast<int>(prev.size()), g.num_vertices());
  }
}

TEST(Boundary, Examples) {
  EXPECT_EQ(boundary(p3(), {1}), (VertexSet{0, 2}));
  EXPECT_TRUE(boundary(p3(), {0, 1, 2}).empty());
  EXPECT_EQ(boundary(k4(), {0}), (VertexSet{1, 2, 3}));
}

TEST(Boundary, DisjointFromSet) {
  const Graph g = gen::torus(4, 4);
  for (int v = 0; v < g.num_vertices(); ++v) {
    const VertexSet a = ball(g, v, 1);
    for (int w : boundary(g, a)) EXPECT_FALSE(std::binary_search(a.begin(), a.end(), w));
  }
}

TEST(EdgeBall, Examples) {
  EXPECT_EQ(edge_ball(p3(), {0, 1}, 0), (VertexSet{0, 1}));
  EXPECT_EQ(edge_ball(p3(), {0, 1}, 1), (VertexSet{0, 1, 2}));
  EXPECT_EQ(edge_ball(k4(), {2, 3}, 1), (VertexSet{0, 1, 2, 3}));
  EXPECT_THROW(edge_ball(p3(), {0, 2}, 1), InputError);
}

TEST(GrowthProfile, Examples) {
  EXPECT_TRUE(growth_profile(Graph::build(1, {}), 0.5, 1.0).satisfied);
  EXPECT_TRUE(growth_profile(gen::path(100), 0.5, 5.0).satisfied);
  EXPECT_FALSE(growth_profile(gen::regular_tree(3, 6), 0.5, 1.0).satisfied);
  EXPECT_THROW(growth_profile(gen::path(3), 1.0, 1.0), InputError);
}

TEST(GrowthProfile, AgreesWithRecomputation) {
  const Graph g = gen::regular_tree(3, 4);
  const GrowthProfile gp = growth_profile(g, 0.5, 2.0);
  bool ok = true;
  for (const auto& [r, size] : gp.per_radius_max_ball) {
    std::int64_t mx = 0;
    for (int v = 0; v < g.num_vertices(); ++v) mx = std::max<std::int64_t>(mx, static_cast<std::int64_t>(ball(g, v, r).size()));
    EXPECT_EQ(mx, size);
    if (static_cast<double>(mx) > std::exp(2.0 * std::sqrt(static_cast<double>(r)))) ok = false;
  }
  EXPECT_EQ(ok, gp.satisfied);
}

TEST(ConnectedOrdering, Examples) {
  EXPECT_EQ(connected_ordering(p3(), 1, 0), (std::vector<int>{0, 1, 2}));
  const Graph two = Graph::build(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(connected_ordering(two, 1), InputError);
}

TEST(ConnectedOrdering, PrefixesConnected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const Graph& g : {k4(), gen::grid(4, 4), gen::random_regular(16, 3, seed), gen::regular_tree(3, 3)}) {
      const auto order = connected_ordering(g, seed);
      std::vector<int> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> all(static_cast<std::size_t>(g.num_vertices()));
      std::iota(all.begin(), all.end(), 0);
      ASSERT_EQ(sorted, all);
      for (std::size_t i = 1; i <= order.size(); ++i) {
        EXPECT_TRUE(induces_connected(g, std::vector<int>(order.begin(), order.begin() + static_cast<long>(i))));
      }
    }
  }
  EXPECT_EQ(connected_ordering(gen::grid(3, 3), 9), connected_ordering(gen::grid(3, 3), 9));
}

TEST(Distances, PathAndComponents) {
  const Graph g = gen::path(6);
  EXPECT_EQ(distance(g, 0, 5), 5);
  const Graph two = Graph::build(4, {{0, 1}, {2, 3}});
  EXPECT_EQ(distance(two, 0, 3), -1);
  EXPECT_EQ(connected_components(two).size(), 2u);
}

TEST(Generators, Shapes) {
  EXPECT_EQ(gen::cycle(5).num_edges(), 5);
  EXPECT_EQ(gen::complete(5).num_edges(), 10);
  EXPECT_EQ(gen::grid(3, 3).num_edges(), 12);
  EXPECT_EQ(gen::torus(3, 4).num_edges(), 24);
  EXPECT_EQ(gen::regular_tree(3, 2).num_vertices(), 10);
  const Graph g = gen::remove_vertex(gen::grid(3, 3), 4);
  EXPECT_EQ(g.num_vertices(), 8);
  EXPECT_EQ(g.num_edges(), 8);
}
