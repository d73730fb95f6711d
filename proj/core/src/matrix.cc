#include "hgmlp/matrix.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "hgmlp/error.h"

namespace hgmlp {
namespace {

void require_inner(std::size_t lhs, std::size_t rhs, const char* op) {
  if (lhs != rhs) {
    throw InvalidArgument(std::string(op) + ": inner dimension mismatch (" +
                          std::to_string(lhs) + " vs " + std::to_string(rhs) +
                          ")");
  }
}

}  // namespace

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw InvalidArgument("Matrix::from_rows: ragged rows");
    }
    std::copy(row.begin(), row.end(), m.row(i).begin());
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 ||
         std::memcmp(a.data().data(), b.data().data(),
                     a.size() * sizeof(double)) == 0;
}

namespace {

using Vec8 = double __attribute__((vector_size(64)));
using Vec4 = double __attribute__((vector_size(32)));

// out[i, :] = sum_k a[i, k] * b[k, :], k ascending, starting from 0. Tiles
// of 4 rows x 8 (or 4) columns accumulate in registers; every element still sums
// its terms in the same order as a plain triple loop.
__attribute__((target_clones("avx512f", "avx2", "default")))
void gemm_rows(const double* a, std::size_t rows, std::size_t inner,
               const double* b, std::size_t width, double* out) {
  const std::size_t wide_cols = width - width % 8;
  const std::size_t full_cols = width - width % 4;
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const double* a0 = a + i * inner;
    const double* a1 = a0 + inner;
    const double* a2 = a1 + inner;
    const double* a3 = a2 + inner;
    for (std::size_t j = 0; j < wide_cols; j += 8) {
      Vec8 c0 = {}, c1 = {}, c2 = {}, c3 = {};
      for (std::size_t k = 0; k < inner; ++k) {
        Vec8 v;
        std::memcpy(&v, b + k * width + j, sizeof v);
        c0 += a0[k] * v;
        c1 += a1[k] * v;
        c2 += a2[k] * v;
        c3 += a3[k] * v;
      }
      std::memcpy(out + i * width + j, &c0, sizeof c0);
      std::memcpy(out + (i + 1) * width + j, &c1, sizeof c1);
      std::memcpy(out + (i + 2) * width + j, &c2, sizeof c2);
      std::memcpy(out + (i + 3) * width + j, &c3, sizeof c3);
    }
    if (wide_cols != full_cols) {
      const std::size_t j = wide_cols;
      Vec4 c0 = {}, c1 = {}, c2 = {}, c3 = {};
      for (std::size_t k = 0; k < inner; ++k) {
        Vec4 v;
        std::memcpy(&v, b + k * width + j, sizeof v);
        c0 += a0[k] * v;
        c1 += a1[k] * v;
        c2 += a2[k] * v;
        c3 += a3[k] * v;
      }
      std::memcpy(out + i * width + j, &c0, sizeof c0);
      std::memcpy(out + (i + 1) * width + j, &c1, sizeof c1);
      std::memcpy(out + (i + 2) * width + j, &c2, sizeof c2);
      std::memcpy(out + (i + 3) * width + j, &c3, sizeof c3);
    }
  }
  // Row and column remainders.
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t first = r < i ? full_cols : 0;
    if (first == width) continue;
    const double* lhs = a + r * inner;
    double* dst = out + r * width;
    for (std::size_t k = 0; k < inner; ++k) {
      const double s = lhs[k];
      const double* src = b + k * width;
      for (std::size_t c = first; c < width; ++c) dst[c] += s * src[c];
    }
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_inner(a.cols(), b.rows(), "matmul");
  Matrix out(a.rows(), b.cols());
  gemm_rows(a.data().data(), a.rows(), a.cols(), b.data().data(), b.cols(),
            out.data().data());
  return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  require_inner(a.rows(), b.rows(), "matmul_at_b");
  Matrix out(a.cols(), b.cols());
  const std::size_t width = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* lhs = a.row(r).data();
    const double* src = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double scale = lhs[i];
      double* dst = out.row(i).data();
      for (std::size_t j = 0; j < width; ++j) dst[j] += scale * src[j];
    }
  }
  return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  require_inner(a.cols(), b.cols(), "matmul_a_bt");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto lhs = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto rhs = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) acc += lhs[k] * rhs[k];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace hgmlp
