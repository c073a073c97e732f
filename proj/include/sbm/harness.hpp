#pragma once

// Seeded trials, the phase-diagram sweep and the threshold boundary curves.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "sbm/core.hpp"
#include "sbm/ml.hpp"
#include "sbm/rng.hpp"
#include "sbm/sdp.hpp"
#include "sbm/tail.hpp"
#include "sbm/two_phase.hpp"

namespace sbm {

using json = nlohmann::ordered_json;

enum class Method { ml, sdp, certificate, two_phase };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ml: return "ml";
    case Method::sdp: return "sdp";
    case Method::certificate: return "certificate";
    case Method::two_phase: return "two-phase";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "ml") return Method::ml;
  if (s == "sdp") return Method::sdp;
  if (s == "certificate") return Method::certificate;
  if (s == "two-phase") return Method::two_phase;
  throw ValidationError("unknown method '" + std::string(s) + "'");
}

struct TrialOptions {
  SdpConfig sdp;
  SplitConfig split;  // seed is overridden per trial
  PartialOracle oracle;
  int rounds = 1;
};

struct TrialRecord {
  Method method = Method::certificate;
  int n = 0;
  std::optional<SbmParams> params;  // absent when the graph came from a file
  std::uint64_t seed = 0;
  bool success = false;
  std::optional<double> agreement;  // absent for certificate, or when no truth is known
  json diagnostics = json::object();
};

namespace detail {

inline json certificate_json(const CertificateReport& r) {
  return {{"lambda_min", r.lambda_min},
          {"lambda_2", r.lambda_2},
          {"g_residual", r.g_residual},
          {"certified", r.certified}};
}

}  // namespace detail

/// Runs `method` on a given graph. `truth` may be null except for the
/// certificate method and the cheating oracle. `seed` feeds the solver
/// restarts and the edge split.
inline TrialRecord evaluate_method(Method method, const Graph& g, const Labeling* truth,
                                   std::uint64_t seed, const TrialOptions& opts = {}) {
  TrialRecord rec;
  rec.method = method;
  rec.n = g.n();
  rec.seed = seed;
  std::optional<Labeling> answer;
  switch (method) {
    case Method::ml: {
      const auto r = ml_bisection(g);
      rec.diagnostics = {{"min_cut", r.min_cut},
                         {"unique", r.unique},
                         {"optima_count", r.optima_count}};
      if (r.unique) answer = r.best;
      break;
    }
    case Method::sdp: {
      auto cfg = opts.sdp;
      cfg.seed = derive_seed(seed, 0x5d9);
      const auto sol = sdp_solve(build_B(g), cfg);
      rec.diagnostics = {{"objective", sol.objective},
                         {"iterations", sol.rounds_used},
                         {"restart", sol.restart_index},
                         {"converged", sol.converged}};
      answer = sol.rounded;
      break;
    }
    case Method::certificate: {
      require(truth != nullptr, "certificate method requires the truth labeling");
      const auto r = certificate_check(g, *truth);
      rec.diagnostics = detail::certificate_json(r);
      rec.success = r.certified;
      return rec;
    }
    case Method::two_phase: {
      auto split = opts.split;
      split.seed = derive_seed(seed, 0x2f4);
      const auto r = two_phase_recover(g, split, opts.oracle, truth, opts.rounds);
      rec.diagnostics = {{"g1_edges", r.g1_edges},
                         {"g2_edges", r.g2_edges},
                         {"flips_applied", r.flips_applied},
                         {"rounds", opts.rounds}};
      if (truth) rec.diagnostics["partial_agreement"] = agreement(r.partial, *truth);
      answer = r.labels;
      break;
    }
  }
  if (answer) rec.diagnostics["labels"] = answer->values();
  if (truth) {
    rec.agreement = answer ? agreement(*answer, *truth) : 0.5;
    rec.success = answer && same_partition(*answer, *truth);
  }
  return rec;
}

/// Generates an instance from derive_seed(base_seed, index) and runs `method` on it.
inline TrialRecord run_trial(Method method, const SbmParams& params, std::uint64_t base_seed,
                             std::uint64_t index, const TrialOptions& opts = {}) {
  const std::uint64_t seed = derive_seed(base_seed, index);
  auto [g, truth] = generate_sbm(params, seed);
  auto local = opts;
  if (method == Method::two_phase && local.oracle.kind == OracleKind::cheating)
    local.oracle.oracle_seed = derive_seed(seed, 0xc4ea7);
  auto rec = evaluate_method(method, g, &truth, seed, local);
  rec.params = params;
  return rec;
}

inline json to_json(const TrialRecord& r) {
  json j;
  j["method"] = to_string(r.method);
  j["n"] = r.n;
  j["params"] = r.params ? json{{"n", r.params->n}, {"alpha", r.params->alpha}, {"beta", r.params->beta}}
                         : json(nullptr);
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["agreement"] = r.agreement ? json(*r.agreement) : json(nullptr);
  j["diagnostics"] = r.diagnostics;
  return j;
}

// ---------------------------------------------------------------------------
// Phase diagram

struct PhasePoint {
  double alpha = 0.0;
  double beta = 0.0;
  int trials = 0;
  int successes = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

/// One point per (alpha, beta), alpha-major. Trial t of grid point k uses
/// base seed derive_seed(base_seed, k); results do not depend on `threads`.
inline std::vector<PhasePoint> phase_diagram(Method method, int n,
                                             const std::vector<double>& alphas,
                                             const std::vector<double>& betas, int trials,
                                             std::uint64_t base_seed, unsigned threads = 1,
                                             const TrialOptions& opts = {}) {
  require(!alphas.empty() && !betas.empty(), "phase_diagram: grids must be nonempty");
  require(trials > 0, "phase_diagram: trials must be positive");
  std::vector<PhasePoint> points;
  std::vector<SbmParams> params;
  for (double a : alphas)
    for (double b : betas) {
      points.push_back({a, b, trials, 0});
      params.push_back(SbmParams::make(n, a, b));
    }

  const std::size_t total = points.size() * static_cast<std::size_t>(trials);
  std::vector<char> outcome(total, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t task; (task = next.fetch_add(1)) < total && !failed;) {
      const std::size_t k = task / trials;
      const std::uint64_t t = task % trials;
      try {
        outcome[task] = run_trial(method, params[k], derive_seed(base_seed, k), t, opts).success;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  for (std::size_t task = 0; task < total; ++task) points[task / trials].successes += outcome[task];
  return points;
}

// ---------------------------------------------------------------------------
// Boundary curves

struct CurvePoint {
  double beta = 0.0;
  std::optional<double> alpha_red;    // (alpha - beta)^2 = 4(alpha + beta) - 4
  std::optional<double> alpha_green;  // (alpha - beta)^2 = 8(alpha + beta) + 8/3 (alpha - beta)
};

/// Larger root in alpha of each boundary; absent unless it exceeds beta.
inline CurvePoint boundary_curves(double beta) {
  require(beta >= 0.0, "boundary_curves: beta must be nonnegative");
  CurvePoint c;
  c.beta = beta;
  // With x = alpha - beta: x^2 - 4x - 8 beta + 4 = 0 and x^2 - (32/3) x - 16 beta = 0.
  const double red = beta + 2.0 + 2.0 * std::sqrt(2.0 * beta);
  const double green = beta + 16.0 / 3.0 + std::sqrt(256.0 / 9.0 + 16.0 * beta);
  if (red > beta) c.alpha_red = red;
  if (green > beta) c.alpha_green = green;
  return c;
}

inline std::vector<CurvePoint> boundary_curves(const std::vector<double>& betas) {
  std::vector<CurvePoint> out;
  for (double b : betas) out.push_back(boundary_curves(b));
  return out;
}

/// (alpha, beta) strictly beyond the red curve on the alpha > beta side.
inline bool above_red_curve(double alpha, double beta) {
  const auto c = boundary_curves(beta);
  return c.alpha_red && alpha > *c.alpha_red;
}

// ---------------------------------------------------------------------------
// Grids and CSV

/// "A0:A1:STEP" inclusive of A1 up to 1e-9 slack, or a single number.
inline std::vector<double> parse_range(std::string_view text) {
  auto number = [&](std::string_view part) {
    try {
      std::size_t used = 0;
      const std::string s(part);
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad range '" + std::string(text) + "'");
    }
  };
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(':', start)) != std::string_view::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  if (parts.size() == 1) return {number(parts[0])};
  require(parts.size() == 3, "range must be A0:A1:STEP");
  const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
  require(step > 0.0 && hi >= lo, "range needs STEP > 0 and A1 >= A0");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

inline std::string phase_csv(const std::vector<PhasePoint>& points) {
  std::ostringstream out;
  out.precision(17);
  out << "alpha,beta,trials,successes,rate\n";
  for (const auto& p : points)
    out << p.alpha << ',' << p.beta << ',' << p.trials << ',' << p.successes << ',' << p.rate()
        << '\n';
  return out.str();
}

inline std::string curves_csv(const std::vector<CurvePoint>& curves) {
  std::ostringstream out;
  out.precision(17);
  out << "beta,alpha_red,alpha_green\n";
  for (const auto& c : curves) {
    out << c.beta << ',';
    if (c.alpha_red) out << *c.alpha_red;
    out << ',';
    if (c.alpha_green) out << *c.alpha_green;
    out << '\n';
  }
  return out.str();
}

}  // namespace sbm
