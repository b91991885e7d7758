#pragma once

// Finite simple graphs with dense 0-based vertex ids, BFS geometry and
// prefix-connected orderings.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rfim {

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sorted list of distinct vertex ids.
using VertexSet = std::vector<int>;

class Graph {
 public:
  Graph() = default;

  /// Validates endpoints, rejects self-loops, drops duplicate edges (first
  /// occurrence keeps its index). Edges are stored with u < v.
  static Graph build(int num_vertices, std::span<const Edge> edges);
  static Graph build(int num_vertices, std::initializer_list<Edge> edges) {
    return build(num_vertices, std::span<const Edge>(edges.begin(), edges.size()));
  }

  int num_vertices() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

  std::span<const int> neighbors(int v) const;
  /// Edge ids incident to v, aligned with neighbors(v).
  std::span<const int> incident_edges(int v) const;
  int degree(int v) const;
  int max_degree() const { return max_degree_; }

  std::optional<int> edge_id(int u, int v) const;
  bool has_vertex(int v) const { return v >= 0 && v < n_; }

 private:
  int n_ = 0;
  int max_degree_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<int> adj_;
  std::vector<int> adj_edge_;
};

/// Graph distances from v (-1 where unreachable).
std::vector<int> distances_from(const Graph& g, int v);
int distance(const Graph& g, int u, int v);

VertexSet ball(const Graph& g, int v, int r);
VertexSet boundary(const Graph& g, const VertexSet& a);
/// ball(u, l) ∪ ball(v, l) for an edge (u, v).
VertexSet edge_ball(const Graph& g, Edge e, int l);

struct GrowthProfile {
  double alpha = 0.5;
  double c_alpha = 1.0;
  /// (radius, max_v |B_r(v)|) for r = 1..diameter.
  std::vector<std::pair<int, std::int64_t>> per_radius_max_ball;
  bool satisfied = true;
};

GrowthProfile growth_profile(const Graph& g, double alpha, double c_alpha);

std::vector<VertexSet> connected_components(const Graph& g);
bool is_connected(const Graph& g);

/// Random frontier ordering: every prefix induces a connected subgraph.
/// The start vertex is drawn from the seed unless given.
std::vector<int> connected_ordering(const Graph& g, std::uint64_t seed,
                                    std::optional<int> start = std::nullopt);

/// BFS order starting with e.u, e.v; ties broken by vertex id. Unreachable
/// vertices follow in increasing id order.
std::vector<int> bfs_order_from_edge(const Graph& g, Edge e);

/// Induced subgraph on `vertices` (any order); returns the graph and the
/// map new id -> old id (which is `vertices` itself).
Graph induced_subgraph(const Graph& g, std::span<const int> vertices);

namespace gen {
Graph path(int n);
Graph cycle(int n);
Graph complete(int n);
Graph grid(int rows, int cols);
Graph torus(int rows, int cols);
/// Tree whose internal vertices all have degree `degree` (root has `degree`
/// children, others degree-1), `depth` levels below the root.
Graph regular_tree(int degree, int depth);
/// Uniform-ish random d-regular simple graph via the pairing model.
Graph random_regular(int n, int d, std::uint64_t seed);
/// Remove vertex v and relabel the rest in increasing order.
Graph remove_vertex(const Graph& g, int v);
}  // namespace gen

}  // namespace rfim
