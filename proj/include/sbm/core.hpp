#pragma once

// Foundational types for the two-community stochastic block model: graphs,
// ±1 labelings, model parameters, the seeded sampler and partition metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sbm/error.hpp"
#include "sbm/rng.hpp"

namespace sbm {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// Undirected simple graph. Immutable after construction; edges are kept as a
/// sorted (u < v) list plus a sorted per-vertex neighbor index.
class Graph {
 public:
  Graph() = default;

  Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    require(n >= 1, "graph: vertex count must be positive");
    for (auto& [u, v] : edges_) {
      require(u >= 0 && u < n && v >= 0 && v < n,
              "graph: vertex index out of range in edge (" + std::to_string(u) + ", " +
                  std::to_string(v) + ")");
      require(u != v, "graph: self-loop at vertex " + std::to_string(u));
      if (u > v) std::swap(u, v);
    }
    std::sort(edges_.begin(), edges_.end());
    const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end())
      throw ValidationError("graph: duplicate edge (" + std::to_string(dup->first) + ", " +
                            std::to_string(dup->second) + ")");
    adjacency_.assign(static_cast<std::size_t>(n), {});
    for (const auto& [u, v] : edges_) {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  }

  static Graph empty(int n) { return Graph(n, {}); }

  static Graph complete(int n) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return Graph(n, std::move(edges));
  }

  int n() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_.at(v); }
  int degree(Vertex v) const { return static_cast<int>(adjacency_.at(v).size()); }

  bool has_edge(Vertex u, Vertex v) const {
    const auto& nb = adjacency_.at(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Vertex>> adjacency_;
};

/// Community assignment with entries in {+1, -1}. Identified with its global
/// flip only by the metrics below, never by equality.
class Labeling {
 public:
  Labeling() = default;

  explicit Labeling(std::vector<int> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i)
      require(values_[i] == 1 || values_[i] == -1,
              "labeling: entry " + std::to_string(i) + " is not +1 or -1");
  }

  /// (+1,...,+1,-1,...,-1) with n/2 of each.
  static Labeling planted(int n) {
    require(n > 0 && n % 2 == 0, "labeling: planted partition needs even n");
    std::vector<int> v(static_cast<std::size_t>(n), -1);
    std::fill(v.begin(), v.begin() + n / 2, 1);
    return Labeling(std::move(v));
  }

  int size() const noexcept { return static_cast<int>(values_.size()); }
  int operator[](Vertex i) const { return values_.at(static_cast<std::size_t>(i)); }
  std::span<const int> values() const noexcept { return values_; }

  int sum() const { return std::accumulate(values_.begin(), values_.end(), 0); }
  bool is_balanced() const { return !values_.empty() && sum() == 0; }

  Labeling negated() const {
    std::vector<int> v(values_);
    for (auto& x : v) x = -x;
    return Labeling(std::move(v));
  }

  Labeling with_flipped(std::span<const Vertex> vertices) const {
    std::vector<int> v(values_);
    for (Vertex i : vertices) v.at(static_cast<std::size_t>(i)) *= -1;
    return Labeling(std::move(v));
  }

  /// Vertices carrying `label`, in increasing order.
  std::vector<Vertex> community(int label) const {
    std::vector<Vertex> out;
    for (int i = 0; i < size(); ++i)
      if (values_[static_cast<std::size_t>(i)] == label) out.push_back(i);
    return out;
  }

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::vector<int> values_;
};

/// Model parameters with p = alpha log(n)/n and q = beta log(n)/n.
struct SbmParams {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;

  double p() const { return alpha * std::log(static_cast<double>(n)) / n; }
  double q() const { return beta * std::log(static_cast<double>(n)) / n; }

  void validate() const {
    require(n >= 4 && n % 2 == 0, "params: n must be even and >= 4 (got " + std::to_string(n) + ")");
    require(alpha >= 0.0 && beta >= 0.0, "params: alpha and beta must be nonnegative");
    require(p() <= 1.0, "params: p = alpha*log(n)/n exceeds 1");
    require(q() <= 1.0, "params: q = beta*log(n)/n exceeds 1");
  }

  static SbmParams make(int n, double alpha, double beta) {
    SbmParams params{n, alpha, beta};
    params.validate();
    return params;
  }
};

struct SbmSample {
  Graph graph;
  Labeling truth;
};

/// Draws a uniformly random balanced labeling, then every pair i < j (in
/// lexicographic order, one uniform variate per pair) is an edge with
/// probability p within communities and q across.
inline SbmSample generate_sbm(const SbmParams& params, std::uint64_t seed) {
  params.validate();
  const int n = params.n;
  Rng rng(seed);

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::fill(labels.begin(), labels.begin() + n / 2, 1);
  rng.shuffle(std::span<int>(labels));

  const double p = params.p();
  const double q = params.q();
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double prob = labels[i] == labels[j] ? p : q;
      if (rng.uniform() < prob) edges.emplace_back(i, j);
    }
  }
  return {Graph(n, std::move(edges)), Labeling(std::move(labels))};
}

/// Fraction of vertices on which x and y agree, maximized over the global flip.
inline double agreement(const Labeling& x, const Labeling& y) {
  require(x.size() == y.size(), "agreement: length mismatch");
  require(x.size() > 0, "agreement: empty labelings");
  int matches = 0;
  for (int i = 0; i < x.size(); ++i) matches += x[i] == y[i];
  return static_cast<double>(std::max(matches, x.size() - matches)) / x.size();
}

inline bool same_partition(const Labeling& x, const Labeling& y) {
  return agreement(x, y) == 1.0;
}

/// Number of edges with one endpoint in S and the other in T. An edge with both
/// endpoints in S ∩ T counts once.
inline std::int64_t count_edges_between(const Graph& g, std::span<const Vertex> s,
                                        std::span<const Vertex> t) {
  std::vector<char> in_s(static_cast<std::size_t>(g.n()), 0), in_t(in_s);
  for (Vertex v : s) {
    require(v >= 0 && v < g.n(), "count_edges_between: vertex out of range");
    in_s[v] = 1;
  }
  for (Vertex v : t) {
    require(v >= 0 && v < g.n(), "count_edges_between: vertex out of range");
    in_t[v] = 1;
  }
  if (s.empty() || t.empty()) return 0;
  std::int64_t count = 0;
  for (const auto& [u, v] : g.edges())
    if ((in_s[u] && in_t[v]) || (in_t[u] && in_s[v])) ++count;
  return count;
}

/// Edges crossing the bisection defined by a balanced labeling.
inline std::int64_t cut_size(const Graph& g, const Labeling& x) {
  require(x.size() == g.n(), "cut_size: labeling length differs from graph size");
  require(x.is_balanced(), "cut_size: labeling is not balanced");
  std::int64_t cut = 0;
  for (const auto& [u, v] : g.edges()) cut += x[u] != x[v];
  return cut;
}

}  // namespace sbm
