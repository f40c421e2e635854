#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ctql {

/// Dense row-major matrix of doubles. Sizes here are small (at most a few
/// hundred per side), so plain loops are all we need.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  static Matrix identity(int n) {
    Matrix eye(n, n);
    for (int i = 0; i < n; ++i) eye(i, i) = 1.0;
    return eye;
  }
};

/// y += A * x. Caller guarantees x has A.cols entries and y has A.rows.
inline void matvec_add(const Matrix& A, const double* x, double* y) {
  const double* a = A.data.data();
  for (int r = 0; r < A.rows; ++r) {
    double acc = 0.0;
    for (int c = 0; c < A.cols; ++c) acc += a[c] * x[c];
    y[r] += acc;
    a += A.cols;
  }
}

/// x += A^T * y. Caller guarantees y has A.rows entries and x has A.cols.
inline void matvec_transpose_add(const Matrix& A, const double* y, double* x) {
  const double* a = A.data.data();
  for (int r = 0; r < A.rows; ++r) {
    const double yr = y[r];
    for (int c = 0; c < A.cols; ++c) x[c] += a[c] * yr;
    a += A.cols;
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Euclidean norm.
inline double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline double max_abs(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc = std::max(acc, std::abs(x));
  return acc;
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace ctql
