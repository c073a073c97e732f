#pragma once

// SDP relaxation of min-bisection:
//
//   max Tr(B X)  s.t.  X_ii = 1,  X PSD,
//
// with B_ij = +1 on edges, -1 on non-edges, 0 on the diagonal. The planted
// partition g is certified as the unique optimum by the diagonal dual
// Y = 2(D+ - D-) + I whenever M = Y - B = 2 L_SBM + 11^T is PSD with
// lambda_2(M) > 0 (g spans the null space of M).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sbm/core.hpp"
#include "sbm/linalg.hpp"
#include "sbm/rng.hpp"

namespace sbm {

inline SymMatrix build_B(const Graph& g) {
  const int n = g.n();
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n, n, -1.0);
  b.diagonal().setZero();
  for (const auto& [u, v] : g.edges()) {
    b(u, v) = 1.0;
    b(v, u) = 1.0;
  }
  return SymMatrix::from_dense(std::move(b));
}

/// Within-community (D+) and cross-community (D-) degrees.
struct SignedDegrees {
  std::vector<int> within;
  std::vector<int> cross;
};

inline SignedDegrees signed_degrees(const Graph& g, const Labeling& truth) {
  require(truth.size() == g.n(), "signed_degrees: labeling length differs from graph size");
  SignedDegrees d{std::vector<int>(static_cast<std::size_t>(g.n()), 0),
                  std::vector<int>(static_cast<std::size_t>(g.n()), 0)};
  for (const auto& [u, v] : g.edges()) {
    auto& bucket = truth[u] == truth[v] ? d.within : d.cross;
    ++bucket[u];
    ++bucket[v];
  }
  return d;
}

/// L_SBM = D+ - D- - A.
inline SymMatrix sbm_laplacian(const Graph& g, const Labeling& truth) {
  require(truth.is_balanced(), "sbm_laplacian: truth labeling is not balanced");
  const auto deg = signed_degrees(g, truth);
  SymMatrix l(g.n());
  for (int i = 0; i < g.n(); ++i) l.set(i, i, deg.within[i] - deg.cross[i]);
  for (const auto& [u, v] : g.edges()) l.set(u, v, -1.0);
  return l;
}

/// M = Y - B = 2 L_SBM + 11^T.
inline SymMatrix certificate_matrix(const Graph& g, const Labeling& truth) {
  Eigen::MatrixXd m = 2.0 * sbm_laplacian(g, truth).dense();
  m.array() += 1.0;
  return SymMatrix::from_dense(std::move(m));
}

struct CertificateReport {
  double lambda_min = 0.0;
  double lambda_2 = 0.0;
  double g_residual = 0.0;
  bool certified = false;
};

inline constexpr double kPsdTolerance = 1e-8;  // relative to ||M||_F
inline constexpr double kGapTolerance = 1e-6;  // relative to ||M||_F

inline CertificateReport certificate_check(const Graph& g, const Labeling& truth) {
  require(truth.is_balanced(), "certificate_check: truth labeling is not balanced");
  require(g.n() >= 2, "certificate_check: need at least two vertices");
  const auto m = certificate_matrix(g, truth);

  // M g in integer arithmetic: 2 (L g)_i + 1^T g.
  const auto deg = signed_degrees(g, truth);
  const std::int64_t total = truth.sum();
  std::int64_t worst = 0;
  for (int i = 0; i < g.n(); ++i) {
    std::int64_t lg = static_cast<std::int64_t>(deg.within[i] - deg.cross[i]) * truth[i];
    for (Vertex j : g.neighbors(i)) lg -= truth[j];
    worst = std::max(worst, std::abs(2 * lg + total));
  }

  const auto eig = eig_extremes(m, 2);
  const double fro = m.frobenius_norm();
  CertificateReport r;
  r.lambda_min = eig.values[0];
  r.lambda_2 = eig.values[1];
  r.g_residual = static_cast<double>(worst);
  r.certified = r.lambda_min >= -kPsdTolerance * fro && r.lambda_2 > kGapTolerance * fro &&
                r.g_residual <= kPsdTolerance * fro;
  return r;
}

/// E[2 L_SBM + 11^T] for the planted labeling (+1 on the first n/2 vertices):
/// diagonal d, within-block a, cross-block b.
inline SymMatrix expected_certificate_matrix(const SbmParams& params) {
  params.validate();
  const int n = params.n;
  const double ln = std::log(static_cast<double>(n));
  const double a = 1.0 - 2.0 * params.alpha * ln / n;
  const double b = 1.0 - 2.0 * params.beta * ln / n;
  const double d = (params.alpha - params.beta) * ln - 2.0 * params.alpha * ln / n + 1.0;
  SymMatrix c(n);
  const int half = n / 2;
  for (int i = 0; i < n; ++i) {
    c.set(i, i, d);
    for (int j = i + 1; j < n; ++j) c.set(i, j, (i < half) == (j < half) ? a : b);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Low-rank solver

struct SdpConfig {
  int rank = 0;  // 0 selects max(2, ceil(sqrt(2n)))
  int restarts = 5;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;  // relative to ||B||_F
  std::uint64_t seed = 0;
  bool record_trace = false;  // objective after every accepted step (restart 0)
};

struct SdpSolution {
  Eigen::MatrixXd factor;  // n x r, unit-norm rows; X = F F^T
  double objective = 0.0;
  double initial_objective = 0.0;
  Labeling rounded;
  int rounds_used = 0;  // iterations taken by the returned restart
  int restart_index = 0;
  bool converged = false;
  std::vector<double> trace;
};

inline int default_sdp_rank(int n) {
  return std::max(2, static_cast<int>(std::ceil(std::sqrt(2.0 * n))));
}

namespace detail {

inline void normalize_rows(Eigen::MatrixXd& f) {
  for (Eigen::Index i = 0; i < f.rows(); ++i) f.row(i).normalize();
}

inline double sdp_objective(const Eigen::MatrixXd& b, const Eigen::MatrixXd& f) {
  return (b * f).cwiseProduct(f).sum();
}

struct AscentRun {
  Eigen::MatrixXd factor;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Riemannian gradient ascent on the product of unit spheres with an Armijo
// backtracking line search. Every accepted step strictly increases Tr(B F F^T).
inline AscentRun ascend(const Eigen::MatrixXd& b, Eigen::MatrixXd f, const SdpConfig& cfg,
                        bool trace) {
  const double bnorm = b.norm();
  AscentRun run;
  double obj = sdp_objective(b, f);
  run.initial_objective = obj;
  if (trace) run.trace.push_back(obj);
  double step = 1.0 / std::max(bnorm, 1.0);
  Eigen::MatrixXd grad, candidate;
  for (; run.iterations < cfg.max_iterations; ++run.iterations) {
    grad.noalias() = 2.0 * (b * f);
    const Eigen::VectorXd radial = grad.cwiseProduct(f).rowwise().sum();
    grad -= radial.asDiagonal() * f;
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) < cfg.gradient_tolerance * bnorm) {
      run.converged = true;
      break;
    }
    bool accepted = false;
    while (step > 1e-18) {
      candidate = f + step * grad;
      normalize_rows(candidate);
      const double next = sdp_objective(b, candidate);
      if (next >= obj + 1e-4 * step * gnorm2 && next > obj) {
        f.swap(candidate);
        obj = next;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent possible at machine precision
    if (trace) run.trace.push_back(obj);
  }
  run.factor = std::move(f);
  run.objective = obj;
  return run;
}

}  // namespace detail

inline Labeling round_solution(const Eigen::MatrixXd& factor);

/// Best of `restarts` seeded ascents (highest objective, lowest restart index on
/// ties), rounded to a balanced labeling. Optimality is only ever certified
/// through certificate_check.
inline SdpSolution sdp_solve(const SymMatrix& b, const SdpConfig& cfg = {}) {
  const int n = b.n();
  require(n >= 2 && n % 2 == 0, "sdp_solve: dimension must be even and >= 2");
  require(b.dense().diagonal().isZero(0.0), "sdp_solve: B must have a zero diagonal");
  require(cfg.restarts >= 1 && cfg.max_iterations >= 0, "sdp_solve: bad configuration");
  const int rank = std::min(n, cfg.rank > 0 ? cfg.rank : default_sdp_rank(n));

  SdpSolution best;
  bool have = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    Eigen::MatrixXd f(n, rank);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) f(i, j) = rng.normal();
    detail::normalize_rows(f);
    auto run = detail::ascend(b.dense(), std::move(f), cfg, cfg.record_trace && r == 0);
    if (cfg.record_trace && r == 0) best.trace = run.trace;
    if (!have || run.objective > best.objective) {
      have = true;
      best.factor = std::move(run.factor);
      best.objective = run.objective;
      best.initial_objective = run.initial_objective;
      best.rounds_used = run.iterations;
      best.restart_index = r;
      best.converged = run.converged;
    }
  }
  best.rounded = round_solution(best.factor);
  return best;
}

/// Sign of the leading eigenvector of X = F F^T, balance-repaired.
inline Labeling round_solution(const Eigen::MatrixXd& factor) {
  // Leading left singular vector of F via the r x r Gram matrix F^T F.
  const Eigen::MatrixXd gram = factor.transpose() * factor;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("round_solution: eigensolver did not converge");
  Eigen::VectorXd u = factor * solver.eigenvectors().col(gram.rows() - 1);
  return sign_with_balance_repair(std::span<const double>(u.data(), u.size()));
}

inline Labeling round_solution(const SdpSolution& sol) { return round_solution(sol.factor); }

inline Labeling round_solution(const SymMatrix& x) {
  const Eigen::VectorXd v = top_eigenvector(x);
  return sign_with_balance_repair(std::span<const double>(v.data(), v.size()));
}

}  // namespace sbm
