#pragma once

#include <cstddef>
#include <vector>

namespace dialogsynth::kernels {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Row-wise L2 normalization in place. Zero rows stay zero.
void normalize_rows(Matrix& m);

/// C(i, j) = cosine of row i of `a` and row j of `b`, clamped to [-1, 1];
/// 0 when either row is zero. Requires a.cols == b.cols.
Matrix cosine_matrix(const Matrix& a, const Matrix& b);
Matrix cosine_matrix_serial(const Matrix& a, const Matrix& b);

}  // namespace dialogsynth::kernels
