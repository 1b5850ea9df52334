#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynsen {

/// Distance value for nodes not reachable from any source.
inline constexpr int kUnreachable = -1;

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Weighted undirected graph over nodes 0..N-1. Symmetry, nonnegative weights,
/// absence of self loops and connectivity are all checked at construction;
/// instances are immutable afterwards and safe to share across threads.
///
/// Adjacency is stored as sorted neighbor lists, so traversals cost O(N + |E|)
/// and never require the dense weight matrix. Dense views (weights, Laplacian)
/// are materialized on demand.
class Graph {
 public:
  struct Neighbor {
    int node;
    double weight;
  };

  static Graph from_edges(int n_nodes, const std::vector<WeightedEdge>& edges,
                          std::optional<Eigen::MatrixX2d> coordinates = std::nullopt) {
    if (n_nodes < 1) throw std::invalid_argument("Graph: need at least one node");
    Graph g;
    g.n_ = n_nodes;
    g.adjacency_.assign(n_nodes, {});
    for (const auto& e : edges) {
      if (e.u < 0 || e.u >= n_nodes || e.v < 0 || e.v >= n_nodes)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      if (e.u == e.v) throw std::invalid_argument("Graph: self loops are not allowed");
      if (!(e.weight > 0.0)) throw std::invalid_argument("Graph: edge weight must be positive");
      g.adjacency_[e.u].push_back({e.v, e.weight});
      g.adjacency_[e.v].push_back({e.u, e.weight});
    }
    for (int v = 0; v < n_nodes; ++v) {
      auto& nbrs = g.adjacency_[v];
      std::sort(nbrs.begin(), nbrs.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
      for (std::size_t i = 1; i < nbrs.size(); ++i)
        if (nbrs[i].node == nbrs[i - 1].node)
          throw std::invalid_argument("Graph: duplicate edge");
    }
    if (coordinates) {
      if (coordinates->rows() != n_nodes)
        throw std::invalid_argument("Graph: coordinate row count must equal node count");
      g.coordinates_ = std::move(coordinates);
    }
    g.require_connected();
    return g;
  }

  /// Builds from a dense symmetric weight matrix with zero diagonal; entries
  /// above zero become edges.
  static Graph from_weights(const Eigen::MatrixXd& w,
                            std::optional<Eigen::MatrixX2d> coordinates = std::nullopt) {
    const int n = static_cast<int>(w.rows());
    if (w.cols() != n) throw std::invalid_argument("Graph: weight matrix must be square");
    std::vector<WeightedEdge> edges;
    for (int i = 0; i < n; ++i) {
      if (w(i, i) != 0.0) throw std::invalid_argument("Graph: diagonal must be zero");
      for (int j = i + 1; j < n; ++j) {
        if (w(i, j) != w(j, i)) throw std::invalid_argument("Graph: weight matrix must be symmetric");
        if (w(i, j) < 0.0) throw std::invalid_argument("Graph: weights must be nonnegative");
        if (w(i, j) > 0.0) edges.push_back({i, j, w(i, j)});
      }
    }
    return from_edges(n, edges, std::move(coordinates));
  }

  int n_nodes() const { return n_; }

  int n_edges() const {
    int twice = 0;
    for (const auto& nbrs : adjacency_) twice += static_cast<int>(nbrs.size());
    return twice / 2;
  }

  const std::vector<Neighbor>& neighbors(int v) const { return adjacency_.at(v); }

  double weighted_degree(int v) const {
    double d = 0.0;
    for (const auto& nb : adjacency_.at(v)) d += nb.weight;
    return d;
  }

  bool has_coordinates() const { return coordinates_.has_value(); }
  const Eigen::MatrixX2d& coordinates() const {
    if (!coordinates_) throw std::logic_error("Graph: no coordinates stored");
    return *coordinates_;
  }

  /// Edge list with u < v, sorted lexicographically.
  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    for (int u = 0; u < n_; ++u)
      for (const auto& nb : adjacency_[u])
        if (u < nb.node) out.push_back({u, nb.node, nb.weight});
    return out;
  }

  Eigen::MatrixXd weights() const {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_, n_);
    for (int u = 0; u < n_; ++u)
      for (const auto& nb : adjacency_[u]) w(u, nb.node) = nb.weight;
    return w;
  }

  /// Combinatorial Laplacian: diag(degrees) - W.
  Eigen::MatrixXd laplacian() const {
    Eigen::MatrixXd l = -weights();
    for (int v = 0; v < n_; ++v) l(v, v) = weighted_degree(v);
    return l;
  }

  /// y = L x computed from adjacency, O(N + |E|). Exactly preserves zeros of x
  /// outside the one-hop neighborhood of its support.
  Eigen::VectorXd apply_laplacian(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("apply_laplacian: dimension mismatch");
    Eigen::VectorXd y(n_);
    for (int v = 0; v < n_; ++v) {
      double acc = weighted_degree(v) * x[v];
      for (const auto& nb : adjacency_[v]) acc -= nb.weight * x[nb.node];
      y[v] = acc;
    }
    return y;
  }

 private:
  Graph() = default;

  void require_connected() const {
    std::vector<char> seen(n_, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const auto& nb : adjacency_[u]) {
        if (!seen[nb.node]) {
          seen[nb.node] = 1;
          ++reached;
          q.push(nb.node);
        }
      }
    }
    if (reached != n_) throw std::invalid_argument("Graph: graph is disconnected");
  }

  int n_ = 0;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::optional<Eigen::MatrixX2d> coordinates_;
};

struct HopDistances {
  /// Per node: hop count to the nearest source (kUnreachable if none).
  std::vector<int> distance;
  /// Per node: index into the source list of the nearest source; ties go to
  /// the lowest source index. -1 where unreachable.
  std::vector<int> nearest_source;
};

/// Multi-source breadth-first search. Edge weights are ignored: distances are
/// hop counts. Sources are seeded in list order, which makes the propagated
/// nearest-source label the lowest source index among all equally near ones.
inline HopDistances hop_distances(const Graph& graph, const std::vector<int>& sources) {
  if (sources.empty()) throw std::invalid_argument("hop_distances: sources must be nonempty");
  const int n = graph.n_nodes();
  HopDistances out;
  out.distance.assign(n, kUnreachable);
  out.nearest_source.assign(n, -1);
  std::queue<int> q;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const int s = sources[i];
    if (s < 0 || s >= n) throw std::invalid_argument("hop_distances: source out of range");
    if (out.distance[s] == kUnreachable) {
      out.distance[s] = 0;
      out.nearest_source[s] = static_cast<int>(i);
      q.push(s);
    }
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const auto& nb : graph.neighbors(u)) {
      if (out.distance[nb.node] == kUnreachable) {
        out.distance[nb.node] = out.distance[u] + 1;
        out.nearest_source[nb.node] = out.nearest_source[u];
        q.push(nb.node);
      }
    }
  }
  return out;
}

/// Hop counts from a single node, truncated at max_depth (nodes farther away
/// keep kUnreachable).
inline std::vector<int> hop_distances_within(const Graph& graph, int source, int max_depth) {
  const int n = graph.n_nodes();
  if (source < 0 || source >= n) throw std::invalid_argument("hop_distances_within: source out of range");
  std::vector<int> dist(n, kUnreachable);
  dist[source] = 0;
  std::queue<int> q;
  q.push(source);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (dist[u] >= max_depth) continue;
    for (const auto& nb : graph.neighbors(u)) {
      if (dist[nb.node] == kUnreachable) {
        dist[nb.node] = dist[u] + 1;
        q.push(nb.node);
      }
    }
  }
  return dist;
}

/// Graph-Voronoi partition induced by hop distance to the generators.
struct VoronoiPartition {
  /// regions[i] lists the nodes assigned to generators[i], ascending.
  std::vector<std::vector<int>> regions;
  std::vector<int> generators;
};

/// Assigns every node to its nearest generator by hop distance; a node at
/// equal distance from several generators goes to the one with the lowest
/// sensor index, so the regions always partition the vertex set.
inline VoronoiPartition voronoi_partition(const Graph& graph, const std::vector<int>& sensors) {
  if (sensors.empty()) throw std::invalid_argument("voronoi_partition: need at least one sensor");
  std::vector<int> sorted = sensors;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("voronoi_partition: duplicate sensor positions");
  const HopDistances hd = hop_distances(graph, sensors);
  VoronoiPartition part;
  part.generators = sensors;
  part.regions.assign(sensors.size(), {});
  for (int v = 0; v < graph.n_nodes(); ++v) part.regions[hd.nearest_source[v]].push_back(v);
  return part;
}

namespace detail {

inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace detail

/// Writes the edge-list text format: a `nodes`/`edges` header, one `u v weight`
/// line per edge, and an optional `coords` block with one `x y` line per node.
inline void save_graph(const Graph& graph, std::ostream& os) {
  const auto edges = graph.edges();
  os << "nodes " << graph.n_nodes() << "\n";
  os << "edges " << edges.size() << "\n";
  for (const auto& e : edges)
    os << e.u << " " << e.v << " " << detail::format_double(e.weight) << "\n";
  if (graph.has_coordinates()) {
    os << "coords\n";
    const auto& c = graph.coordinates();
    for (int v = 0; v < graph.n_nodes(); ++v)
      os << detail::format_double(c(v, 0)) << " " << detail::format_double(c(v, 1)) << "\n";
  }
}

inline void save_graph(const Graph& graph, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_graph: cannot open " + path);
  save_graph(graph, os);
}

inline Graph load_graph(std::istream& is) {
  std::string keyword;
  int n = 0;
  std::size_t m = 0;
  if (!(is >> keyword) || keyword != "nodes" || !(is >> n))
    throw std::runtime_error("load_graph: expected 'nodes <N>'");
  if (!(is >> keyword) || keyword != "edges" || !(is >> m))
    throw std::runtime_error("load_graph: expected 'edges <E>'");
  std::vector<WeightedEdge> edges(m);
  for (auto& e : edges)
    if (!(is >> e.u >> e.v >> e.weight)) throw std::runtime_error("load_graph: bad edge line");
  std::optional<Eigen::MatrixX2d> coords;
  if (is >> keyword) {
    if (keyword != "coords") throw std::runtime_error("load_graph: unexpected trailing content");
    Eigen::MatrixX2d c(n, 2);
    for (int v = 0; v < n; ++v)
      if (!(is >> c(v, 0) >> c(v, 1))) throw std::runtime_error("load_graph: bad coords line");
    coords = std::move(c);
  }
  return Graph::from_edges(n, edges, std::move(coords));
}

inline Graph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_graph: cannot open " + path);
  return load_graph(is);
}

}  // namespace dynsen
