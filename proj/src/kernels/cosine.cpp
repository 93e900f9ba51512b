#include "dialogsynth/kernels/cosine.hpp"

#include <algorithm>
#include <cmath>

#include "dialogsynth/util/errors.hpp"

namespace dialogsynth::kernels {

namespace {

double row_norm(const Matrix& m, std::size_t i) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.cols; ++k) s += m.at(i, k) * m.at(i, k);
  return std::sqrt(s);
}

double cell(const Matrix& a, const std::vector<double>& na, std::size_t i, const Matrix& b,
            const std::vector<double>& nb, std::size_t j) {
  if (na[i] == 0.0 || nb[j] == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t k = 0; k < a.cols; ++k) dot += a.at(i, k) * b.at(j, k);
  return std::clamp(dot / (na[i] * nb[j]), -1.0, 1.0);
}

std::vector<double> norms(const Matrix& m) {
  std::vector<double> out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out[i] = row_norm(m, i);
  return out;
}

void check_shapes(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) {
    throw PreconditionError("cosine_matrix: column counts differ (" + std::to_string(a.cols) + " vs " +
                            std::to_string(b.cols) + ")");
  }
}

}  // namespace

void normalize_rows(Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double n = row_norm(m, i);
    if (n == 0.0) continue;
    for (std::size_t k = 0; k < m.cols; ++k) m.at(i, k) /= n;
  }
}

Matrix cosine_matrix_serial(const Matrix& a, const Matrix& b) {
  check_shapes(a, b);
  const auto na = norms(a), nb = norms(b);
  Matrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) out.at(i, j) = cell(a, na, i, b, nb, j);
  }
  return out;
}

Matrix cosine_matrix(const Matrix& a, const Matrix& b) {
  check_shapes(a, b);
  const auto na = norms(a), nb = norms(b);
  Matrix out(a.rows, b.rows);
  const auto total = static_cast<long long>(a.rows * b.rows);
  const std::size_t cols = b.rows;
#pragma omp parallel for schedule(static) if (total > 256)
  for (long long idx = 0; idx < total; ++idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / cols;
    const std::size_t j = static_cast<std::size_t>(idx) % cols;
    out.at(i, j) = cell(a, na, i, b, nb, j);
  }
  return out;
}

}  // namespace dialogsynth::kernels
