#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbm/core.hpp"
#include "sbm/error.hpp"

namespace sbm {

/// Dense symmetric matrix. Writes go through set()/add(), which mirror across
/// the diagonal, so symmetry holds exactly by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : data_(Eigen::MatrixXd::Zero(n, n)) {}

  /// Wraps an existing matrix; rejects anything that is not exactly symmetric.
  static SymMatrix from_dense(Eigen::MatrixXd m) {
    require(m.rows() == m.cols(), "SymMatrix: matrix is not square");
    require(m == m.transpose(), "SymMatrix: matrix is not symmetric");
    SymMatrix s;
    s.data_ = std::move(m);
    return s;
  }

  int n() const noexcept { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }

  void set(int i, int j, double v) {
    data_(i, j) = v;
    data_(j, i) = v;
  }
  void add(int i, int j, double v) {
    data_(i, j) += v;
    if (i != j) data_(j, i) += v;
  }

  const Eigen::MatrixXd& dense() const noexcept { return data_; }
  double frobenius_norm() const { return data_.norm(); }

 private:
  Eigen::MatrixXd data_;
};

struct EigenExtremes {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // ||M v - lambda v||_2 per eigenpair
  Eigen::MatrixXd vectors;        // columns match `values`
};

/// The k smallest eigenpairs of a symmetric matrix, ascending, with residuals.
/// Throws ConvergenceError if the decomposition fails or any residual exceeds
/// tol * ||M||_F. Deterministic: no random starting vectors are involved.
inline EigenExtremes eig_extremes(const SymMatrix& m, int k, double tol = 1e-10) {
  require(k >= 0 && k <= m.n(), "eig_extremes: k must lie in [0, n]");
  EigenExtremes out;
  if (k == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense());
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("eig_extremes: symmetric eigensolver did not converge");
  const double fro = m.frobenius_norm();
  out.vectors = solver.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    const double lambda = solver.eigenvalues()(i);
    const auto v = out.vectors.col(i);
    const double res = (m.dense() * v - lambda * v).norm();
    if (res > tol * std::max(fro, 1.0))
      throw ConvergenceError("eig_extremes: residual " + std::to_string(res) +
                             " above tolerance for eigenvalue " + std::to_string(i));
    out.values.push_back(lambda);
    out.residuals.push_back(res);
  }
  return out;
}

/// Eigenvector of the largest eigenvalue, sign-normalized so that its
/// largest-magnitude coordinate (lowest index on ties) is positive.
inline Eigen::VectorXd top_eigenvector(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.dense());
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("top_eigenvector: symmetric eigensolver did not converge");
  Eigen::VectorXd v = solver.eigenvectors().col(m.n() - 1);
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
  return v;
}

/// Signs of `coords` (zero counts as +1), then balance repair: entries on the
/// larger side with the smallest |coordinate| are moved over until both sides
/// have n/2 vertices. Ties go to the lower vertex index.
inline Labeling sign_with_balance_repair(std::span<const double> coords) {
  const int n = static_cast<int>(coords.size());
  require(n > 0 && n % 2 == 0, "balance repair: needs an even, nonzero dimension");
  const bool degenerate =
      std::all_of(coords.begin(), coords.end(), [](double c) { return c == 0.0; });
  if (degenerate) throw ConvergenceError("rounding: leading eigenvector is zero");

  std::vector<int> signs(static_cast<std::size_t>(n));
  int sum = 0;
  for (int i = 0; i < n; ++i) {
    signs[i] = coords[i] >= 0.0 ? 1 : -1;
    sum += signs[i];
  }
  if (sum != 0) {
    const int excess_label = sum > 0 ? 1 : -1;
    std::vector<int> side;
    for (int i = 0; i < n; ++i)
      if (signs[i] == excess_label) side.push_back(i);
    std::stable_sort(side.begin(), side.end(), [&](int a, int b) {
      return std::abs(coords[a]) < std::abs(coords[b]);
    });
    const int flips = std::abs(sum) / 2;
    for (int k = 0; k < flips; ++k) signs[side[k]] = -excess_label;
  }
  return Labeling(std::move(signs));
}

}  // namespace sbm
