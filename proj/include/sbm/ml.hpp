#pragma once

// Exhaustive maximum likelihood (min-bisection) for small graphs, and checkers
// for the events used in the impossibility argument:
//
//   F_A      some i in A has more neighbours in B than in A
//   Delta    no vertex of H has delta or more neighbours inside H
//   F_H^(j)  E(j, A \ H) + delta <= E(j, B)
//
// Delta and F_H^(j) together force j to be majority-failed, hence F_A.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "sbm/core.hpp"
#include "sbm/rng.hpp"
#include "sbm/tail.hpp"

namespace sbm {

struct MlResult {
  Labeling best;
  std::int64_t min_cut = 0;
  bool unique = false;
  std::int64_t optima_count = 0;
};

inline constexpr int kMlMaxVertices = 24;

/// Enumerates every balanced partition with vertex 0 on the +1 side (one
/// representative per global flip). Ties go to the lexicographically smallest
/// +1 set.
inline MlResult ml_bisection(const Graph& g) {
  const int n = g.n();
  require(n % 2 == 0, "ml_bisection: n must be even");
  require(n <= kMlMaxVertices, "ml_bisection: n exceeds the enumeration budget of " +
                                   std::to_string(kMlMaxVertices));
  const std::uint32_t full = (1u << n) - 1u;
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : g.edges()) {
    adj[u] |= 1u << v;
    adj[v] |= 1u << u;
  }

  const int free_bits = n - 1;
  const int choose = n / 2 - 1;
  std::int64_t best_cut = INT64_MAX;
  std::int64_t count = 0;
  std::uint32_t best_set = 0;

  auto visit = [&](std::uint32_t rest) {
    const std::uint32_t set = 1u | (rest << 1);
    const std::uint32_t other = full & ~set;
    std::int64_t cut = 0;
    for (std::uint32_t bits = set; bits != 0; bits &= bits - 1)
      cut += std::popcount(adj[std::countr_zero(bits)] & other);
    if (cut < best_cut) {
      best_cut = cut;
      best_set = set;
      count = 1;
    } else if (cut == best_cut) {
      ++count;
      // The lexicographically smaller sorted vertex list owns the lowest
      // differing vertex.
      const std::uint32_t diff = set ^ best_set;
      if (set & diff & (~diff + 1)) best_set = set;
    }
  };

  if (choose == 0) {
    visit(0);
  } else {
    // Gosper's hack over (n-1)-bit masks with `choose` bits set.
    std::uint32_t rest = (1u << choose) - 1u;
    const std::uint32_t limit = 1u << free_bits;
    while (rest < limit) {
      visit(rest);
      const std::uint32_t c = rest & (~rest + 1);
      const std::uint32_t r = rest + c;
      rest = (((r ^ rest) >> 2) / c) | r;
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    if (best_set & (1u << i)) labels[i] = 1;
  return {Labeling(std::move(labels)), best_cut, count == 1, count};
}

/// True iff i has strictly more neighbours in the opposite community than in its own.
inline bool node_majority_failure(const Graph& g, const Labeling& truth, Vertex i) {
  require(i >= 0 && i < g.n(), "node_majority_failure: vertex out of range");
  require(truth.size() == g.n(), "node_majority_failure: labeling length mismatch");
  int own = 0, cross = 0;
  for (Vertex j : g.neighbors(i)) (truth[j] == truth[i] ? own : cross) += 1;
  return cross > own;
}

/// Change in cut size when i and j (on opposite sides) trade places. A
/// two-sided majority failure makes this <= 0, so the planted bisection is not
/// the unique minimizer.
inline std::int64_t cut_change_after_swap(const Graph& g, const Labeling& x, Vertex i, Vertex j) {
  require(x.size() == g.n(), "cut_change_after_swap: labeling length mismatch");
  require(i >= 0 && i < g.n() && j >= 0 && j < g.n(), "cut_change_after_swap: vertex out of range");
  require(x[i] != x[j], "cut_change_after_swap: i and j must be on opposite sides");
  std::int64_t change = 0;
  for (Vertex v : {i, j}) {
    for (Vertex u : g.neighbors(v)) {
      if (u == i || u == j) continue;  // the i-j edge stays cut
      change += x[u] == x[v] ? 1 : -1;
    }
  }
  return change;
}

/// True iff every j in H has strictly fewer than `delta` neighbours inside H.
inline bool event_delta_holds(const Graph& g, std::span<const Vertex> h, int delta) {
  std::vector<char> in_h(static_cast<std::size_t>(g.n()), 0);
  for (Vertex v : h) {
    require(v >= 0 && v < g.n(), "event_delta_holds: vertex out of range");
    in_h[v] = 1;
  }
  for (Vertex j : h) {
    int inside = 0;
    for (Vertex k : g.neighbors(j)) inside += in_h[k];
    if (inside >= delta) return false;
  }
  return true;
}

/// E(j, A \ H) + delta <= E(j, B), with A the community of j.
inline bool event_FH_holds(const Graph& g, const Labeling& truth, std::span<const Vertex> h,
                           Vertex j, int delta) {
  require(truth.size() == g.n(), "event_FH_holds: labeling length mismatch");
  require(std::find(h.begin(), h.end(), j) != h.end(), "event_FH_holds: j is not in H");
  std::vector<char> in_h(static_cast<std::size_t>(g.n()), 0);
  for (Vertex v : h) in_h[v] = 1;
  std::int64_t to_a_minus_h = 0, to_b = 0;
  for (Vertex k : g.neighbors(j)) {
    if (truth[k] != truth[j])
      ++to_b;
    else if (!in_h[k])
      ++to_a_minus_h;
  }
  return to_a_minus_h + delta <= to_b;
}

struct EventRates {
  int trials = 0;
  std::optional<double> f_rate;  // ML failure; only when n is within the ML budget
  double fa_rate = 0.0;
  double delta_rate = 0.0;
  double fh_rate = 0.0;
  int implication_violations = 0;  // trials with Delta and F_H but not F_A
  bool desk_scale_fallback = false;
  int h_size = 0;
  int delta = 0;
};

/// Monte Carlo rates of F, F_A, Delta and F_H. H is the lowest-indexed |H|
/// vertices of the +1 community (any fixed subset is exchangeable). When the
/// asymptotic schedule is unusable (n < 16 or |H| = 0) H is the first
/// ceil(n/4) vertices of A and delta = 2, flagged as desk-scale fallback.
inline EventRates estimate_event_probabilities(const SbmParams& params, int trials,
                                               std::uint64_t seed) {
  require(trials > 0, "estimate_event_probabilities: trials must be positive");
  params.validate();
  EventRates rates;
  rates.trials = trials;
  int h_size = (params.n + 3) / 4;
  int delta = 2;
  rates.desk_scale_fallback = true;
  if (params.n >= 16) {
    const auto sched = LowerBoundSchedule::make(params.n);
    if (!sched.degenerate()) {
      h_size = sched.h_size;
      delta = sched.delta_n;
      rates.desk_scale_fallback = false;
    }
  }
  rates.h_size = h_size;
  rates.delta = delta;

  const bool run_ml = params.n <= kMlMaxVertices;
  int f = 0, fa = 0, dl = 0, fh = 0;
  for (int t = 0; t < trials; ++t) {
    const auto [g, truth] = generate_sbm(params, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto a = truth.community(1);
    const std::vector<Vertex> h(a.begin(), a.begin() + h_size);

    bool fail_a = false;
    for (Vertex i : a) fail_a = fail_a || node_majority_failure(g, truth, i);
    const bool delta_ok = event_delta_holds(g, h, delta);
    bool fail_h = false;
    for (Vertex j : h) fail_h = fail_h || event_FH_holds(g, truth, h, j, delta);

    fa += fail_a;
    dl += delta_ok;
    fh += fail_h;
    if (delta_ok && fail_h && !fail_a) ++rates.implication_violations;
    if (run_ml) {
      const auto ml = ml_bisection(g);
      f += !(ml.unique && same_partition(ml.best, truth));
    }
  }
  const double denom = trials;
  if (run_ml) rates.f_rate = f / denom;
  rates.fa_rate = fa / denom;
  rates.delta_rate = dl / denom;
  rates.fh_rate = fh / denom;
  return rates;
}

}  // namespace sbm
