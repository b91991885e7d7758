#include "rfim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "rfim/error.hpp"
#include "rfim/rng.hpp"

namespace rfim {

Graph Graph::build(int num_vertices, std::span<const Edge> edges) {
  if (num_vertices < 0) throw InputError("graph: negative vertex count");
  Graph g;
  g.n_ = num_vertices;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(num_vertices));
  for (const Edge& raw : edges) {
    if (!g.has_vertex(raw.u) || !g.has_vertex(raw.v)) {
      throw InputError("graph: edge (" + std::to_string(raw.u) + "," + std::to_string(raw.v) +
                       ") has an endpoint outside [0," + std::to_string(num_vertices) + ")");
    }
    if (raw.u == raw.v) throw InputError("graph: self-loop at vertex " + std::to_string(raw.u));
    const Edge e{std::min(raw.u, raw.v), std::max(raw.u, raw.v)};
    auto& nu = adj[static_cast<std::size_t>(e.u)];
    if (std::any_of(nu.begin(), nu.end(), [&](const auto& p) { return p.first == e.v; })) continue;
    const int id = static_cast<int>(g.edges_.size());
    g.edges_.push_back(e);
    nu.emplace_back(e.v, id);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, id);
  }
  g.offsets_.assign(static_cast<std::size_t>(num_vertices) + 1, 0);
  for (int v = 0; v < num_vertices; ++v) {
    auto& list = adj[static_cast<std::size_t>(v)];
    std::sort(list.begin(), list.end());
    g.offsets_[static_cast<std::size_t>(v) + 1] = g.offsets_[static_cast<std::size_t>(v)] + static_cast<int>(list.size());
    g.max_degree_ = std::max(g.max_degree_, static_cast<int>(list.size()));
    for (const auto& [w, id] : list) {
      g.adj_.push_back(w);
      g.adj_edge_.push_back(id);
    }
  }
  return g;
}

std::span<const int> Graph::neighbors(int v) const {
  const auto b = static_cast<std::size_t>(offsets_.at(static_cast<std::size_t>(v)));
  const auto e = static_cast<std::size_t>(offsets_.at(static_cast<std::size_t>(v) + 1));
  return std::span<const int>(adj_).subspan(b, e - b);
}

std::span<const int> Graph::incident_edges(int v) const {
  const auto b = static_cast<std::size_t>(offsets_.at(static_cast<std::size_t>(v)));
  const auto e = static_cast<std::size_t>(offsets_.at(static_cast<std::size_t>(v) + 1));
  return std::span<const int>(adj_edge_).subspan(b, e - b);
}

int Graph::degree(int v) const {
  return offsets_.at(static_cast<std::size_t>(v) + 1) - offsets_.at(static_cast<std::size_t>(v));
}

std::optional<int> Graph::edge_id(int u, int v) const {
  if (!has_vertex(u) || !has_vertex(v)) return std::nullopt;
  const auto nb = neighbors(u);
  const auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return incident_edges(u)[static_cast<std::size_t>(it - nb.begin())];
}

namespace {

void check_vertex(const Graph& g, int v, const char* what) {
  if (!g.has_vertex(v)) {
    throw InputError(std::string(what) + ": vertex " + std::to_string(v) + " out of range [0," +
                     std::to_string(g.num_vertices()) + ")");
  }
}

}  // namespace

std::vector<int> distances_from(const Graph& g, int v) {
  check_vertex(g, v, "distances_from");
  std::vector<int> dist(static_cast<std::size_t>(g.num_vertices()), -1);
  std::deque<int> queue{v};
  dist[static_cast<std::size_t>(v)] = 0;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int w : g.neighbors(x)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(x)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

int distance(const Graph& g, int u, int v) {
  check_vertex(g, v, "distance");
  return distances_from(g, u)[static_cast<std::size_t>(v)];
}

VertexSet ball(const Graph& g, int v, int r) {
  check_vertex(g, v, "ball");
  if (r < 0) throw InputError("ball: negative radius");
  // Truncated BFS so large graphs only pay for the ball.
  VertexSet out{v};
  std::vector<std::pair<int, int>> frontier{{v, 0}};
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
  seen[static_cast<std::size_t>(v)] = 1;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const auto [x, d] = frontier[head];
    if (d == r) continue;
    for (int w : g.neighbors(x)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        out.push_back(w);
        frontier.emplace_back(w, d + 1);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet boundary(const Graph& g, const VertexSet& a) {
  std::vector<char> in_a(static_cast<std::size_t>(g.num_vertices()), 0);
  for (int v : a) {
    check_vertex(g, v, "boundary");
    in_a[static_cast<std::size_t>(v)] = 1;
  }
  VertexSet out;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (in_a[static_cast<std::size_t>(v)]) continue;
    for (int w : g.neighbors(v)) {
      if (in_a[static_cast<std::size_t>(w)]) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

VertexSet edge_ball(const Graph& g, Edge e, int l) {
  if (!g.edge_id(e.u, e.v)) {
    throw InputError("edge_ball: (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") is not an edge");
  }
  VertexSet a = ball(g, e.u, l);
  VertexSet b = ball(g, e.v, l);
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

GrowthProfile growth_profile(const Graph& g, double alpha, double c_alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("growth_profile: alpha must lie in (0,1)");
  if (!(c_alpha > 0.0)) throw InputError("growth_profile: c_alpha must be positive");
  GrowthProfile prof;
  prof.alpha = alpha;
  prof.c_alpha = c_alpha;
  // counts[r] = max_v |B_r(v)|, accumulated from per-source distance histograms.
  std::vector<std::int64_t> best;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const auto dist = distances_from(g, v);
    std::vector<std::int64_t> hist;
    for (int d : dist) {
      if (d < 0) continue;
      if (static_cast<std::size_t>(d) >= hist.size()) hist.resize(static_cast<std::size_t>(d) + 1, 0);
      ++hist[static_cast<std::size_t>(d)];
    }
    std::partial_sum(hist.begin(), hist.end(), hist.begin());
    if (hist.size() > best.size()) best.resize(hist.size(), 0);
    for (std::size_t r = 0; r < best.size(); ++r) {
      const std::int64_t size = r < hist.size() ? hist[r] : hist.back();
      best[r] = std::max(best[r], size);
    }
  }
  for (std::size_t r = 1; r < best.size(); ++r) {
    prof.per_radius_max_ball.emplace_back(static_cast<int>(r), best[r]);
    const double bound = std::exp(c_alpha * std::pow(static_cast<double>(r), alpha));
    if (static_cast<double>(best[r]) > bound) prof.satisfied = false;
  }
  return prof;
}

std::vector<VertexSet> connected_components(const Graph& g) {
  std::vector<int> comp(static_cast<std::size_t>(g.num_vertices()), -1);
  std::vector<VertexSet> out;
  for (int s = 0; s < g.num_vertices(); ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    VertexSet members{s};
    comp[static_cast<std::size_t>(s)] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (int w : g.neighbors(members[head])) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = id;
          members.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

std::vector<int> connected_ordering(const Graph& g, std::uint64_t seed, std::optional<int> start) {
  const int n = g.num_vertices();
  if (n == 0) return {};
  RngStream rng(seed, stream_id(StreamKind::ordering, 0));
  const int first = start ? *start : static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  check_vertex(g, first, "connected_ordering");

  std::vector<char> state(static_cast<std::size_t>(n), 0);  // 0 unseen, 1 frontier, 2 placed
  std::vector<int> order;
  std::vector<int> frontier{first};
  state[static_cast<std::size_t>(first)] = 1;
  while (!frontier.empty()) {
    const auto pick = static_cast<std::size_t>(rng.below(frontier.size()));
    const int v = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    state[static_cast<std::size_t>(v)] = 2;
    order.push_back(v);
    for (int w : g.neighbors(v)) {
      if (state[static_cast<std::size_t>(w)] == 0) {
        state[static_cast<std::size_t>(w)] = 1;
        frontier.push_back(w);
      }
    }
  }
  if (static_cast<int>(order.size()) != n) {
    const auto it = std::find(state.begin(), state.end(), 0);
    throw InputError("connected_ordering: graph is disconnected; vertex " +
                     std::to_string(it - state.begin()) + " is unreachable from vertex " +
                     std::to_string(first));
  }
  return order;
}

std::vector<int> bfs_order_from_edge(const Graph& g, Edge e) {
  if (!g.edge_id(e.u, e.v)) throw InputError("bfs_order_from_edge: not an edge");
  std::vector<char> seen(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<int> order{e.u, e.v};
  seen[static_cast<std::size_t>(e.u)] = seen[static_cast<std::size_t>(e.v)] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (int w : g.neighbors(order[head])) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        order.push_back(w);
      }
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (!seen[static_cast<std::size_t>(v)]) order.push_back(v);
  }
  return order;
}

Graph induced_subgraph(const Graph& g, std::span<const int> vertices) {
  std::vector<int> local(static_cast<std::size_t>(g.num_vertices()), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    check_vertex(g, vertices[i], "induced_subgraph");
    if (local[static_cast<std::size_t>(vertices[i])] >= 0) throw InputError("induced_subgraph: repeated vertex");
    local[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    const int a = local[static_cast<std::size_t>(e.u)];
    const int b = local[static_cast<std::size_t>(e.v)];
    if (a >= 0 && b >= 0) edges.push_back({a, b});
  }
  return Graph::build(static_cast<int>(vertices.size()), edges);
}

namespace gen {

Graph path(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::build(n, edges);
}

Graph cycle(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  if (n >= 3) edges.push_back({n - 1, 0});
  return Graph::build(n, edges);
}

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph::build(n, edges);
}

Graph grid(int rows, int cols) {
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1});
      if (r + 1 < rows) edges.push_back({v, v + cols});
    }
  }
  return Graph::build(rows * cols, edges);
}

Graph torus(int rows, int cols) {
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      const int right = r * cols + (c + 1) % cols;
      const int down = ((r + 1) % rows) * cols + c;
      if (right != v) edges.push_back({v, right});
      if (down != v) edges.push_back({v, down});
    }
  }
  return Graph::build(rows * cols, edges);
}

Graph regular_tree(int degree, int depth) {
  if (degree < 2 || depth < 0) throw InputError("regular_tree: need degree >= 2 and depth >= 0");
  std::vector<Edge> edges;
  std::vector<int> level{0};
  int next = 1;
  for (int d = 0; d < depth; ++d) {
    std::vector<int> children;
    for (int parent : level) {
      const int k = parent == 0 ? degree : degree - 1;
      for (int c = 0; c < k; ++c) {
        edges.push_back({parent, next});
        children.push_back(next++);
      }
    }
    level = std::move(children);
  }
  return Graph::build(next, edges);
}

Graph random_regular(int n, int d, std::uint64_t seed) {
  if (n <= 0 || d < 0 || d >= n || (static_cast<long>(n) * d) % 2 != 0) {
    throw InputError("random_regular: need 0 <= d < n and n*d even");
  }
  RngStream rng(seed, stream_id(StreamKind::model_family, 0x7E6));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < d; ++k) stubs.push_back(v);
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::vector<Edge> edges;
    bool simple = true;
    for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
      const Edge e{std::min(stubs[i], stubs[i + 1]), std::max(stubs[i], stubs[i + 1])};
      if (e.u == e.v || std::find(edges.begin(), edges.end(), e) != edges.end()) simple = false;
      edges.push_back(e);
    }
    if (simple) return Graph::build(n, edges);
  }
  throw InputError("random_regular: pairing model failed to produce a simple graph");
}

Graph remove_vertex(const Graph& g, int v) {
  check_vertex(g, v, "remove_vertex");
  std::vector<int> keep;
  for (int w = 0; w < g.num_vertices(); ++w)
    if (w != v) keep.push_back(w);
  return induced_subgraph(g, keep);
}

}  // namespace gen

}  // namespace rfim
