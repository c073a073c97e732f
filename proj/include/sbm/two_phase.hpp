#pragma once

// Exact recovery from partial recovery plus one round of local improvement.
//
//   1. Split the pairs of K_n: each pair joins H1 with probability C / log n,
//      independently of the observed graph. G1 = H1 ∩ G, G2 = G \ G1.
//   2. Run a partial-recovery oracle on G1.
//   3. Simultaneously flip every vertex with strictly more G2-edges into the
//      opposite community than into its own; apply only if both sides flip the
//      same number of vertices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbm/core.hpp"
#include "sbm/linalg.hpp"
#include "sbm/rng.hpp"

namespace sbm {

struct SplitConfig {
  double c = 8.0;
  std::uint64_t seed = 0;

  double pair_probability(int n) const {
    const double prob = c / std::log(static_cast<double>(n));
    require(c >= 0.0 && prob <= 1.0,
            "split: C / log(n) = " + std::to_string(prob) + " is outside [0, 1]");
    return prob;
  }
};

/// The random pair set H1 itself (an Erdos-Renyi graph with edge probability
/// C / log n), one uniform draw per pair in lexicographic order.
inline Graph sample_h1(int n, const SplitConfig& cfg) {
  require(n >= 2, "sample_h1: need at least two vertices");
  const double prob = cfg.pair_probability(n);
  Rng rng(cfg.seed);
  std::vector<Edge> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < prob) pairs.emplace_back(i, j);
  return Graph(n, std::move(pairs));
}

struct GraphSplit {
  Graph g1;
  Graph g2;
};

inline GraphSplit split_graph(const Graph& g, const SplitConfig& cfg) {
  const Graph h1 = sample_h1(g.n(), cfg);
  std::vector<Edge> e1, e2;
  for (const auto& e : g.edges()) (h1.has_edge(e.first, e.second) ? e1 : e2).push_back(e);
  return {Graph(g.n(), std::move(e1)), Graph(g.n(), std::move(e2))};
}

enum class OracleKind { spectral, cheating };

struct PartialOracle {
  OracleKind kind = OracleKind::spectral;
  double delta_c = 0.0;           // cheating: corrupted fraction per side, in [0, 1/2)
  std::uint64_t oracle_seed = 0;  // cheating: which labels get corrupted
  bool trim = false;              // spectral: drop degree > 10x average before solving

  static PartialOracle spectral(bool trim = false) {
    PartialOracle o;
    o.trim = trim;
    return o;
  }
  static PartialOracle cheating(double delta_c, std::uint64_t seed) {
    require(delta_c >= 0.0 && delta_c < 0.5, "cheating oracle: deltaC must lie in [0, 1/2)");
    PartialOracle o;
    o.kind = OracleKind::cheating;
    o.delta_c = delta_c;
    o.oracle_seed = seed;
    return o;
  }
};

namespace detail {

// Truth with exactly floor(deltaC n/2) seed-chosen flips on each side.
inline Labeling corrupt_labels(const Labeling& truth, const PartialOracle& oracle) {
  require(truth.is_balanced(), "cheating oracle: truth must be balanced");
  const int per_side = static_cast<int>(std::floor(oracle.delta_c * truth.size() / 2.0));
  Rng rng(oracle.oracle_seed);
  std::vector<Vertex> flips;
  for (int label : {1, -1}) {
    auto side = truth.community(label);
    rng.shuffle(std::span<Vertex>(side));
    flips.insert(flips.end(), side.begin(), side.begin() + per_side);
  }
  return truth.with_flipped(flips);
}

// Top eigenvector of the centered adjacency A - (2m/n^2) 11^T of the kept
// vertices; trimmed vertices take their neighbours' majority sign and sit at
// coordinate magnitude 0 so balance repair moves them first.
inline Labeling spectral_partition(const Graph& g, bool trim) {
  const int n = g.n();
  require(g.edge_count() > 0, "spectral oracle: graph has no edges");
  std::vector<char> kept(static_cast<std::size_t>(n), 1);
  if (trim) {
    const double avg = 2.0 * static_cast<double>(g.edge_count()) / n;
    for (int v = 0; v < n; ++v)
      if (g.degree(v) > 10.0 * avg) kept[v] = 0;
  }
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  int k = 0;
  for (int v = 0; v < n; ++v)
    if (kept[v]) index[v] = k++;

  std::int64_t m = 0;
  for (const auto& [u, v] : g.edges()) m += kept[u] && kept[v];
  require(m > 0, "spectral oracle: no edges left after trimming");
  const double center = 2.0 * static_cast<double>(m) / (static_cast<double>(k) * k);
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(k, k, -center);
  for (const auto& [u, v] : g.edges()) {
    if (!(kept[u] && kept[v])) continue;
    a(index[u], index[v]) += 1.0;
    a(index[v], index[u]) += 1.0;
  }
  const Eigen::VectorXd vec = top_eigenvector(SymMatrix::from_dense(std::move(a)));

  std::vector<double> coords(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v)
    if (kept[v]) coords[v] = vec(index[v]);
  for (int v = 0; v < n; ++v) {
    if (kept[v]) continue;
    int vote = 0;
    for (Vertex u : g.neighbors(v))
      if (kept[u]) vote += coords[u] >= 0.0 ? 1 : -1;
    coords[v] = vote >= 0 ? 0.0 : -0.0;
  }
  // -0.0 compares >= 0; give trimmed negatives the tiniest negative magnitude.
  for (int v = 0; v < n; ++v)
    if (!kept[v] && std::signbit(coords[v])) coords[v] = -std::numeric_limits<double>::denorm_min();
  return sign_with_balance_repair(coords);
}

}  // namespace detail

/// Balanced labeling agreeing with the truth on most vertices. The spectral
/// kind stands in for a real partial-recovery algorithm; the cheating kind
/// corrupts the truth by an exact fraction so local improvement can be tested
/// against a known error rate.
inline Labeling partial_recovery(const Graph& g1, const PartialOracle& oracle,
                                 const Labeling* truth = nullptr) {
  if (oracle.kind == OracleKind::cheating) {
    require(truth != nullptr, "cheating oracle requires the ground truth");
    require(truth->size() == g1.n(), "cheating oracle: truth length mismatch");
    return detail::corrupt_labels(*truth, oracle);
  }
  return detail::spectral_partition(g1, oracle.trim);
}

struct ImprovementOptions {
  /// Off by default: when the per-side flip counts differ, apply the
  /// min(count) strongest flips on each side instead of discarding all.
  bool balanced_subset = false;
};

struct ImprovementResult {
  Labeling labels;
  int marked_plus = 0;
  int marked_minus = 0;
  int flips_applied = 0;
};

inline ImprovementResult improve_once(const Graph& g2, const Labeling& labels,
                                      const ImprovementOptions& opts = {}) {
  require(labels.size() == g2.n(), "local_improvement: labeling length mismatch");
  require(labels.is_balanced(), "local_improvement: labeling is not balanced");
  const int n = g2.n();
  std::vector<int> margin(static_cast<std::size_t>(n), 0);  // cross - own
  std::vector<Vertex> plus, minus;
  for (int v = 0; v < n; ++v) {
    for (Vertex u : g2.neighbors(v)) margin[v] += labels[u] == labels[v] ? -1 : 1;
    if (margin[v] > 0) (labels[v] > 0 ? plus : minus).push_back(v);
  }
  ImprovementResult r{labels, static_cast<int>(plus.size()), static_cast<int>(minus.size()), 0};
  if (plus.size() == minus.size()) {
    std::vector<Vertex> flips(plus);
    flips.insert(flips.end(), minus.begin(), minus.end());
    r.labels = labels.with_flipped(flips);
    r.flips_applied = static_cast<int>(flips.size());
  } else if (opts.balanced_subset) {
    const std::size_t keep = std::min(plus.size(), minus.size());
    auto strongest = [&](std::vector<Vertex>& side) {
      std::stable_sort(side.begin(), side.end(),
                       [&](Vertex a, Vertex b) { return margin[a] > margin[b]; });
      side.resize(keep);
    };
    strongest(plus);
    strongest(minus);
    std::vector<Vertex> flips(plus);
    flips.insert(flips.end(), minus.begin(), minus.end());
    r.labels = labels.with_flipped(flips);
    r.flips_applied = static_cast<int>(flips.size());
  }
  return r;
}

inline Labeling local_improvement(const Graph& g2, const Labeling& labels,
                                  const ImprovementOptions& opts = {}) {
  return improve_once(g2, labels, opts).labels;
}

struct TwoPhaseResult {
  Labeling partial;
  Labeling labels;
  int g1_edges = 0;
  int g2_edges = 0;
  int flips_applied = 0;
};

/// rounds > 1 iterates the improvement step on G2, which goes beyond the
/// single-round procedure whose guarantee is known.
inline TwoPhaseResult two_phase_recover(const Graph& g, const SplitConfig& cfg,
                                        const PartialOracle& oracle,
                                        const Labeling* truth = nullptr, int rounds = 1,
                                        const ImprovementOptions& opts = {}) {
  require(rounds >= 1, "two_phase_recover: rounds must be >= 1");
  const auto [g1, g2] = split_graph(g, cfg);
  TwoPhaseResult r;
  r.g1_edges = static_cast<int>(g1.edge_count());
  r.g2_edges = static_cast<int>(g2.edge_count());
  r.partial = partial_recovery(g1, oracle, truth);
  r.labels = r.partial;
  for (int k = 0; k < rounds; ++k) {
    auto step = improve_once(g2, r.labels, opts);
    r.flips_applied += step.flips_applied;
    r.labels = std::move(step.labels);
  }
  return r;
}

}  // namespace sbm
