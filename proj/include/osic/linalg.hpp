#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "osic/error.hpp"

namespace osic {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major complex matrix. Shapes are always at least 1x1.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const Complex> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  /// Copy with column `c` physically removed. Requires cols() >= 2.
  ComplexMatrix without_column(std::size_t c) const;

  bool all_finite() const noexcept;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

ComplexMatrix hermitian(const ComplexMatrix& a);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x);

/// a^H a, computed without materialising the transpose.
ComplexMatrix gram(const ComplexMatrix& a);

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);

/// Gauss-Jordan elimination with partial (largest-magnitude) pivoting.
/// Throws SingularMatrixError once a pivot falls below kSingularPivotRatio
/// times the largest entry magnitude of `a`, and InvalidArgumentError for
/// non-square or non-finite input.
ComplexMatrix inverse(const ComplexMatrix& a);

/// Moore-Penrose pseudo-inverse of a full-column-rank matrix, (a^H a)^-1 a^H.
ComplexMatrix pinv(const ComplexMatrix& a);

std::vector<double> row_norms(const ComplexMatrix& a);

double frobenius_norm(const ComplexMatrix& a);

inline constexpr double kSingularPivotRatio = 1e-12;

}  // namespace osic
