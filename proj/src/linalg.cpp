#include "lexidiff/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexidiff/errors.hpp"

namespace lexidiff::linalg {

namespace {

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
};

LuFactors lu_factor(Matrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw SolverError("LU needs a square matrix");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double pivot_mag = std::abs(a(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      const double mag = std::abs(a(r, k));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot = r;
      }
    }
    if (pivot_mag < 1e-300) {
      throw SolverError("singular system (pivot ~ 0 at column " +
                        std::to_string(k) + ")");
    }
    if (pivot != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
      std::swap(perm[k], perm[pivot]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = a(r, k) / a(k, k);
      a(r, k) = factor;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
    }
  }
  return {std::move(a), std::move(perm)};
}

Matrix lu_solve(const LuFactors& f, const Matrix& b) {
  const std::size_t n = f.lu.rows();
  Matrix x(n, b.cols());
  for (std::size_t col = 0; col < b.cols(); ++col) {
    // forward substitution with permuted rows
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double v = b(f.perm[i], col);
      for (std::size_t j = 0; j < i; ++j) v -= f.lu(i, j) * y[j];
      y[i] = v;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double v = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) v -= f.lu(ii, j) * x(j, col);
      x(ii, col) = v / f.lu(ii, ii);
    }
  }
  return x;
}

}  // namespace

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw SolverError("right-hand side row count does not match the matrix");
  }
  const LuFactors factors = lu_factor(a);
  Matrix x = lu_solve(factors, b);

  // one step of iterative refinement
  Matrix residual(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double acc = b(i, c);
      for (std::size_t j = 0; j < a.cols(); ++j) acc -= a(i, j) * x(j, c);
      residual(i, c) = acc;
    }
  }
  const Matrix correction = lu_solve(factors, residual);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(i, c) += correction(i, c);
  }
  return x;
}

EigenDecomposition symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw SolverError("eigendecomposition needs a square matrix");
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_diagonal = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    }
    return std::sqrt(s);
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  scale = std::max(scale, off_diagonal());
  const double tol = std::max(1e-14 * scale, 1e-300);

  for (int sweep = 0; sweep < 200 && off_diagonal() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= tol * 1e-3) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cos = 1.0 / std::sqrt(t * t + 1.0);
        const double sin = t * cos;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = cos * akp - sin * akq;
          a(k, q) = sin * akp + cos * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = cos * apk - sin * aqk;
          a(q, k) = sin * apk + cos * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = cos * vkp - sin * vkq;
          v(k, q) = sin * vkp + cos * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace lexidiff::linalg
