#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace egt {

// Dense row-major matrix just big enough for the tiny systems this project
// solves (stationary vectors of n-state chains, indifference systems,
// Hurwitz minors). All dimensions are single digits.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns nullopt when the system is singular relative to its scale.
inline std::optional<std::vector<double>> solve_linear(Matrix A,
                                                       std::vector<double> b) {
  const std::size_t n = A.rows;
  if (A.cols != n || b.size() != n) throw NumericalError("solve_linear: shape mismatch");

  double scale = 0.0;
  for (double v : A.a) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return std::nullopt;
  const double tol = scale * 1e-13 * static_cast<double>(n);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (std::fabs(A(piv, col)) <= tol) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(piv, j), A(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A(r, col) / A(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) A(r, j) -= f * A(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

// Like solve_linear, but a rank-deficient system is classified: no
// solution at all versus a solution continuum. Callers that must tell a
// dominated game (inconsistent indifference, hence no equilibrium) from a
// genuinely degenerate draw need the distinction.
enum class LinearSolveStatus { Unique, Inconsistent, Underdetermined };

inline std::pair<LinearSolveStatus, std::vector<double>> solve_linear_classified(
    Matrix A, std::vector<double> b) {
  const std::size_t n = A.rows;
  if (A.cols != n || b.size() != n)
    throw NumericalError("solve_linear_classified: shape mismatch");

  double scale = 0.0;
  for (double v : A.a) scale = std::max(scale, std::fabs(v));
  double bscale = 0.0;
  for (double v : b) bscale = std::max(bscale, std::fabs(v));
  const double tol = scale * 1e-13 * static_cast<double>(n);
  const double btol = std::max(scale, bscale) * 1e-13 * static_cast<double>(n);

  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < n; ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (std::fabs(A(piv, col)) <= tol) continue;  // no pivot in this column
    if (piv != rank) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(piv, j), A(rank, j));
      std::swap(b[piv], b[rank]);
    }
    for (std::size_t r = rank + 1; r < n; ++r) {
      const double f = A(r, col) / A(rank, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) A(r, j) -= f * A(rank, j);
      b[r] -= f * b[rank];
    }
    ++rank;
  }
  if (rank < n) {
    for (std::size_t r = rank; r < n; ++r)
      if (std::fabs(b[r]) > btol) return {LinearSolveStatus::Inconsistent, {}};
    return {LinearSolveStatus::Underdetermined, {}};
  }
  // full rank: every column holds a pivot, so plain back-substitution works
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return {LinearSolveStatus::Unique, std::move(x)};
}

inline double determinant(Matrix A) {
  const std::size_t n = A.rows;
  if (A.cols != n) throw NumericalError("determinant: not square");
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A(r, col)) > std::fabs(A(piv, col))) piv = r;
    if (A(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(piv, j), A(col, j));
      det = -det;
    }
    det *= A(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A(r, col) / A(col, col);
      for (std::size_t j = col; j < n; ++j) A(r, j) -= f * A(col, j);
    }
  }
  return det;
}

namespace detail {

// Direct solve of pi P = pi, sum(pi) = 1: rows 0..n-2 hold (P^T - I),
// the last row is the normalization. Handles absorbing structures but
// trips over extreme rate-scale disparities.
inline std::optional<std::vector<double>> stationary_by_elimination(const Matrix& P) {
  const std::size_t n = P.rows;
  Matrix A(n, n);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A(i, j) = P(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = 1.0;
  b[n - 1] = 1.0;
  auto x = solve_linear(std::move(A), std::move(b));
  if (!x) return std::nullopt;
  double s = 0.0;
  for (double& v : *x) {
    if (v < 0.0 && v > -1e-12) v = 0.0;  // clip solver noise
    s += v;
  }
  if (!(std::fabs(s - 1.0) < 1e-9)) return std::nullopt;
  for (double& v : *x) v /= s;
  return x;
}

// Grassmann-Taksar-Heyman state reduction: eliminates states from the
// highest index down using only additions, multiplications and divisions
// of nonnegative numbers. Free of cancellation, it stays exact-to-rounding
// even when transition rates span hundreds of orders of magnitude, where
// pivoted elimination misreads the chain as singular. Returns nullopt only
// when some state cannot reach the surviving block at all (S = 0) or the
// unnormalized masses overflow.
inline std::optional<std::vector<double>> stationary_by_gth(Matrix A) {
  const std::size_t n = A.rows;
  for (std::size_t k = n - 1; k >= 1; --k) {
    double S = 0.0;
    for (std::size_t j = 0; j < k; ++j) S += A(k, j);
    if (!(S > 0.0)) return std::nullopt;  // reducible at machine precision
    for (std::size_t i = 0; i < k; ++i) A(i, k) /= S;
    for (std::size_t i = 0; i < k; ++i) {
      if (A(i, k) == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) A(i, j) += A(i, k) * A(k, j);
    }
  }
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += x[i] * A(i, k);
    x[k] = s;
    if (s > 1e300) {  // keep the running masses in range; ratios survive
      for (std::size_t i = 0; i <= k; ++i) x[i] /= s;
    }
  }
  double total = 0.0;
  for (double v : x) total += v;
  if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
  for (double& v : x) v /= total;
  return x;
}

}  // namespace detail

// Stationary vector of a row-stochastic matrix P with the normalization
// sum(pi) = 1. GTH state reduction first (robust to wildly uneven rates);
// chains that have already collapsed to an absorbing structure in double
// precision fall back to the direct solve. Throws when both fail.
inline std::vector<double> stationary_distribution(const Matrix& P) {
  const std::size_t n = P.rows;
  if (P.cols != n || n == 0) throw NumericalError("stationary_distribution: shape");
  if (n == 1) return {1.0};
  if (auto x = detail::stationary_by_gth(P)) return *x;
  if (auto x = detail::stationary_by_elimination(P)) return *x;
  throw NumericalError("stationary_distribution: singular chain (not irreducible?)");
}

}  // namespace egt
