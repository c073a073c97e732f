#pragma once

// Exact and closed-form numerics for the recovery threshold: the threshold
// function, exact tails of a difference of independent binomials, the exponent
// functions of the dominant-term analysis, and scalar concentration bounds.
//
// All pmfs are evaluated in natural-log space. Binomial log-pmfs use Loader's
// saddle-point decomposition (stirlerr/bd0), which stays accurate to ~1e-14
// relative at m ~ 1e6 where naive lgamma differences lose ~7 digits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "sbm/core.hpp"
#include "sbm/error.hpp"

namespace sbm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Threshold

struct ThresholdVerdict {
  double f_value = 0.0;
  bool recoverable = false;
  bool connectivity_ok = false;
  bool equivalent_form_ok = false;
};

/// f(alpha, beta) = (alpha + beta)/2 - sqrt(alpha beta); exact recovery is
/// possible iff f > 1.
inline ThresholdVerdict threshold_f(double alpha, double beta) {
  require(alpha >= 0.0 && beta >= 0.0, "threshold_f: alpha and beta must be nonnegative");
  ThresholdVerdict v;
  v.f_value = (alpha + beta) / 2.0 - std::sqrt(alpha * beta);
  v.recoverable = v.f_value > 1.0;
  v.connectivity_ok = (alpha + beta) / 2.0 > 1.0;
  const double diff = alpha - beta;
  v.equivalent_form_ok = diff * diff > 4.0 * (alpha + beta) - 4.0 && alpha + beta > 2.0;
  return v;
}

// ---------------------------------------------------------------------------
// Binomial log-pmf

namespace detail {

// lgamma(x + 1) - (x + 1/2) log(x) + x - log(sqrt(2 pi))
inline double stirlerr(double x) {
  constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;
  if (x <= 15.0) {
    return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - kLnSqrt2Pi;
  }
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                   s4 = 1.0 / 1188;
  const double xx = x * x;
  if (x > 500) return (s0 - s1 / xx) / x;
  if (x > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (x > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// x log(x / np) + np - x, evaluated without cancellation near x = np.
inline double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

inline double log_sum_exp(const std::vector<double>& terms) {
  double mx = kNegInf;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - mx);
  return mx + std::log(acc);
}

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace detail

/// log P(Bin(m, p) = k).
inline double log_binomial_pmf(std::int64_t k, std::int64_t m, double p) {
  if (k < 0 || k > m) return kNegInf;
  const double q = 1.0 - p;
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (p == 1.0) return k == m ? 0.0 : kNegInf;
  const auto x = static_cast<double>(k);
  const auto n = static_cast<double>(m);
  if (k == 0) return n * std::log1p(-p);
  if (k == m) return n * std::log(p);
  const double lc = detail::stirlerr(n) - detail::stirlerr(x) - detail::stirlerr(n - x) -
                    detail::bd0(x, n * p) - detail::bd0(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

/// Real-valued log binomial coefficient via log-gamma; k may be non-integer.
inline double log_choose(double m, double k) {
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

// ---------------------------------------------------------------------------
// Scalar concentration bounds

/// Multiplicative Chernoff: P(X >= t mu) <= (e^{t-1} / t^t)^mu for t >= 1.
inline double chernoff_multiplicative_upper(double mu, double t) {
  require(mu > 0.0, "chernoff: mu must be positive");
  require(t >= 1.0, "chernoff: t must be >= 1");
  return std::exp(mu * (t - 1.0) - mu * t * std::log(t));
}

/// The weaker form (t/e)^{-t mu}.
inline double chernoff_weak_upper(double mu, double t) {
  require(mu > 0.0, "chernoff: mu must be positive");
  require(t >= 1.0, "chernoff: t must be >= 1");
  return std::min(1.0, std::exp(-t * mu * (std::log(t) - 1.0)));
}

/// exp(-(t^2/2) / (sigma^2 + R t / 3)).
inline double bernstein_scalar_upper(double sigma2, double range, double t) {
  require(sigma2 >= 0.0 && range > 0.0 && t >= 0.0, "bernstein: domain violation");
  if (t == 0.0) return 1.0;
  return std::exp(-(0.5 * t * t) / (sigma2 + range * t / 3.0));
}

// ---------------------------------------------------------------------------
// Tail of Z - W

enum class TailMethod { full_convolution, truncated_convolution };

inline const char* to_string(TailMethod m) {
  return m == TailMethod::full_convolution ? "full-convolution" : "truncated-convolution";
}

struct TailResult {
  double probability = 0.0;
  double log_probability = kNegInf;
  double truncation_error_bound = 0.0;
  TailMethod method = TailMethod::full_convolution;
};

/// Counts above which the support of each binomial is truncated.
inline constexpr std::int64_t kFullConvolutionLimit = 2000;
/// Each discarded binomial tail is certified below this by Chernoff.
inline constexpr double kTailDiscardBudget = 5e-16;

namespace detail {

struct Truncation {
  std::int64_t hi = 0;        // keep support [0, hi]
  double discarded = 0.0;     // certified bound on P(X > hi)
};

inline Truncation truncate_binomial(std::int64_t m, double p) {
  const double mu = static_cast<double>(m) * p;
  if (mu <= 0.0) return {0, 0.0};
  const double sd = std::sqrt(mu * (1.0 - p));
  const double step = std::max(1.0, sd);
  for (int k_sd = 1;; ++k_sd) {
    const auto hi = static_cast<std::int64_t>(std::ceil(mu + k_sd * step));
    if (hi >= m) return {m, 0.0};
    const double bound = chernoff_multiplicative_upper(mu, static_cast<double>(hi + 1) / mu);
    if (bound < kTailDiscardBudget) return {hi, bound};
  }
}

}  // namespace detail

/// P(Z - W >= s) for independent Z ~ Bin(mz, q), W ~ Bin(mw, p).
///
/// Computed as sum_w P(W = w) P(Z >= w + s) with the survival function of Z
/// accumulated in log space. Above kFullConvolutionLimit each binomial is cut at
/// mean + K sd with the discarded mass certified by Chernoff; that mass is
/// reported as an absolute error bound.
inline TailResult diff_binomial_tail(std::int64_t mz, std::int64_t mw, double p, double q,
                                     std::int64_t s) {
  require(mz >= 0 && mw >= 0, "diff_binomial_tail: counts must be nonnegative");
  require(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0,
          "diff_binomial_tail: probabilities must lie in [0, 1]");
  TailResult r;
  if (s <= -mw) {
    r.probability = 1.0;
    r.log_probability = 0.0;
    return r;
  }
  if (s > mz) return r;

  detail::Truncation tz{mz, 0.0}, tw{mw, 0.0};
  if (mz > kFullConvolutionLimit || mw > kFullConvolutionLimit) {
    r.method = TailMethod::truncated_convolution;
    tz = detail::truncate_binomial(mz, q);
    tw = detail::truncate_binomial(mw, p);
    r.truncation_error_bound = tz.discarded + tw.discarded;
  }

  // log P(Z >= k) restricted to the kept support, k in [0, tz.hi].
  std::vector<double> log_surv(static_cast<std::size_t>(tz.hi) + 1, kNegInf);
  double acc = kNegInf;
  for (std::int64_t k = tz.hi; k >= 0; --k) {
    acc = detail::log_add_exp(acc, log_binomial_pmf(k, mz, q));
    log_surv[static_cast<std::size_t>(k)] = acc;
  }

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(tw.hi) + 1);
  for (std::int64_t w = 0; w <= tw.hi; ++w) {
    const std::int64_t k = w + s;
    if (k > tz.hi) break;
    const double lw = log_binomial_pmf(w, mw, p);
    terms.push_back(k <= 0 ? lw : lw + log_surv[static_cast<std::size_t>(k)]);
  }
  r.log_probability = std::min(0.0, detail::log_sum_exp(terms));
  r.probability = std::exp(r.log_probability);
  return r;
}

// ---------------------------------------------------------------------------
// Lower-bound schedule and rho(n)

/// gamma(n) = log^3 n, delta(n) = ceil(log n / log log n), |H| = floor(n / gamma(n)).
struct LowerBoundSchedule {
  int n = 0;
  double gamma_n = 0.0;
  int delta_n = 0;
  int h_size = 0;

  /// The schedule is only asymptotically meaningful; for 16 <= n < ~94 the set
  /// H is empty.
  bool degenerate() const { return h_size < 1; }

  static LowerBoundSchedule make(int n) {
    require(n >= 16 && n % 2 == 0, "schedule: n must be even and >= 16");
    const double ln = std::log(static_cast<double>(n));
    LowerBoundSchedule s;
    s.n = n;
    s.gamma_n = ln * ln * ln;
    s.delta_n = static_cast<int>(std::ceil(ln / std::log(ln)));
    s.h_size = static_cast<int>(std::floor(n / s.gamma_n));
    return s;
  }
};

/// rho(n): probability that a fixed vertex j of H has
/// E(j, A \ H) + delta(n) <= E(j, B).
inline TailResult rho_exact(int n, double alpha, double beta) {
  const auto params = SbmParams::make(n, alpha, beta);
  const auto sched = LowerBoundSchedule::make(n);
  return diff_binomial_tail(n / 2, n / 2 - sched.h_size, params.p(), params.q(), sched.delta_n);
}

// ---------------------------------------------------------------------------
// Dominant-term exponents

struct ExponentInputs {
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  std::int64_t m = 0;
  std::int64_t n = 0;
};

namespace detail {
inline double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }
inline double xlog1py(double x, double y) { return x == 0.0 ? 0.0 : x * std::log1p(y); }
}  // namespace detail

/// log V(m, p, q, tau, eps): the single-term dominant contribution with
/// (tau + eps)(m/n) log n cross successes and tau (m/n) log n within successes.
/// Counts may be non-integer; binomials use the log-gamma generalization.
inline double log_V(const ExponentInputs& in) {
  require(in.m > 0 && in.n > 1, "log_V: m and n must be positive");
  require(in.alpha >= 0.0 && in.beta >= 0.0, "log_V: alpha, beta must be nonnegative");
  const double m = static_cast<double>(in.m);
  const double n = static_cast<double>(in.n);
  const double scale = (m / n) * std::log(n);
  const double k_cross = (in.tau + in.epsilon) * scale;
  const double k_within = in.tau * scale;
  require(k_within >= 0.0 && k_within <= m, "log_V: tau (m/n) log n must lie in [0, m]");
  require(k_cross >= 0.0 && k_cross <= m, "log_V: (tau + eps)(m/n) log n must lie in [0, m]");
  const double p = in.alpha * std::log(n) / n;
  const double q = in.beta * std::log(n) / n;
  require(p <= 1.0 && q <= 1.0, "log_V: p or q exceeds 1");
  return log_choose(m, k_cross) + log_choose(m, k_within) + detail::xlogy(k_within, p) +
         detail::xlogy(k_cross, q) + detail::xlog1py(m - k_within, -p) +
         detail::xlog1py(m - k_cross, -q);
}

/// Minimizer of h in tau: tau* (tau* + eps) = alpha beta.
inline double tau_star(double alpha, double beta, double epsilon) {
  require(alpha > 0.0 && beta > 0.0, "tau_star: alpha and beta must be positive");
  const double ab = alpha * beta;
  const double half = epsilon / 2.0;
  const double root = std::sqrt(half * half + ab);
  // For eps > 0 the textbook form -eps/2 + root cancels; use ab / (eps/2 + root).
  return epsilon > 0.0 ? ab / (half + root) : root - half;
}

/// h(alpha, beta, tau, eps) = (tau+eps) log((tau+eps)/e) + tau log(tau/e)
///                            - tau log(alpha beta) - eps log(beta) + alpha + beta.
inline double h_function(double alpha, double beta, double tau, double epsilon) {
  require(tau > 0.0 && tau + epsilon > 0.0, "h_function: tau and tau + eps must be positive");
  const double te = tau + epsilon;
  return te * (std::log(te) - 1.0) + tau * (std::log(tau) - 1.0) - tau * std::log(alpha * beta) -
         epsilon * std::log(beta) + alpha + beta;
}

/// g(alpha, beta, eps) = min_tau h. Accepts negative eps.
inline double g_exponent(double alpha, double beta, double epsilon) {
  require(alpha > 0.0 && beta > 0.0, "g_exponent: alpha and beta must be positive");
  const double ab = alpha * beta;
  const double half = epsilon / 2.0;
  const double root = std::sqrt(half * half + ab);
  // ratio = (root + eps/2) / (root - eps/2), rewritten to avoid cancellation.
  const double ratio =
      epsilon >= 0.0 ? (root + half) * (root + half) / ab : ab / ((root - half) * (root - half));
  require(std::isfinite(ratio) && ratio > 0.0, "g_exponent: domain violation");
  return (alpha + beta) - epsilon * std::log(beta) - 2.0 * root + half * std::log(ab * ratio);
}

/// The sandwich bounds on T* were only established for cn <= m < c' n^{3/2};
/// we only validate them at m = n/2.
inline bool t_star_window_validated(std::int64_t m, std::int64_t n) { return 2 * m == n; }

/// log T*(m, p, q, eps) = max_tau log V. The real-count V is not exactly
/// maximized by tau* at finite n, so the maximum is searched over a +-10%
/// window around tau*: a grid pass, then golden-section refinement.
inline double log_T_star(std::int64_t m, std::int64_t n, double alpha, double beta,
                         double epsilon) {
  const double t0 = tau_star(alpha, beta, epsilon);
  const double scale = (static_cast<double>(m) / n) * std::log(static_cast<double>(n));
  auto value = [&](double tau) {
    const double kw = tau * scale, kc = (tau + epsilon) * scale;
    if (tau < 0.0 || kc < 0.0 || kc > m || kw > m) return kNegInf;
    return log_V({alpha, beta, epsilon, tau, m, n});
  };
  double best = log_V({alpha, beta, epsilon, t0, m, n});
  double arg = t0;
  constexpr int kGrid = 200;
  const double step = 0.2 * t0 / kGrid;
  for (int i = 0; i <= kGrid; ++i) {
    const double tau = t0 * 0.9 + i * step;
    if (const double v = value(tau); v > best) best = v, arg = tau;
  }
  // log V is unimodal near its peak; refine within one grid step either side.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(arg - step, 0.9 * t0), hi = std::min(arg + step, 1.1 * t0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1, x1 = x2, f1 = f2, x2 = lo + phi * (hi - lo), f2 = value(x2);
    } else {
      hi = x2, x2 = x1, f2 = f1, x1 = hi - phi * (hi - lo), f1 = value(x1);
    }
  }
  return std::max({best, f1, f2});
}

// ---------------------------------------------------------------------------
// ML union bound and the two-phase exponent

/// sum_{k=1}^{n/4} C(n/2, k)^2 T(2k(n/2 - k), p, q, 0). A bound, may exceed 1.
inline double ml_failure_upper_bound(int n, double alpha, double beta) {
  const auto params = SbmParams::make(n, alpha, beta);
  const int half = n / 2;
  double total = 0.0;
  for (int k = 1; k <= n / 4; ++k) {
    const std::int64_t m = 2LL * k * (half - k);
    const auto t = diff_binomial_tail(m, m, params.p(), params.q(), 0);
    total += std::exp(2.0 * log_choose(half, k) + t.log_probability);
  }
  return total;
}

/// g(alpha, beta, -gamma deltaC) with gamma = 1 / (deltaC sqrt(log(1/deltaC))):
/// the per-vertex mislabel exponent after local improvement from a partial
/// recovery that is wrong on a deltaC fraction of vertices.
inline double mislabel_exponent(double alpha, double beta, double delta_c) {
  require(delta_c > 0.0 && delta_c < 1.0, "mislabel_exponent: deltaC must lie in (0, 1)");
  const double gamma = 1.0 / (delta_c * std::sqrt(std::log(1.0 / delta_c)));
  return g_exponent(alpha, beta, -gamma * delta_c);
}

}  // namespace sbm
