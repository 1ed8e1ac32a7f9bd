#include "osic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace osic {

namespace {

void require_finite(const ComplexMatrix& a, const char* op) {
  if (!a.all_finite()) {
    throw InvalidArgumentError(std::string(op) + ": matrix contains NaN or Inf");
  }
}

std::string shape(const ComplexMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : ComplexMatrix(rows, cols, std::vector<Complex>(rows * cols)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) {
    throw InvalidArgumentError("ComplexMatrix: dimensions must be positive");
  }
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("ComplexMatrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) {
    throw InvalidArgumentError("ComplexMatrix: dimensions must be positive");
  }
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("ComplexMatrix: ragged initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

ComplexMatrix ComplexMatrix::without_column(std::size_t c) const {
  if (cols_ < 2 || c >= cols_) {
    throw DimensionError("without_column: cannot remove column " + std::to_string(c) +
                         " from " + shape(*this));
  }
  std::vector<Complex> out;
  out.reserve(rows_ * (cols_ - 1));
  for (std::size_t r = 0; r < rows_; ++r) {
    const Complex* src = data_.data() + r * cols_;
    out.insert(out.end(), src, src + c);
    out.insert(out.end(), src + c + 1, src + cols_);
  }
  return ComplexMatrix(rows_, cols_ - 1, std::move(out));
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix hermitian(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(j, i) = std::conj(a(i, j));
    }
  }
  return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape(a) + " times " + shape(b));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) {
    throw DimensionError("matvec: " + shape(a) + " times vector of length " +
                         std::to_string(x.size()));
  }
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      acc += r[j] * x[j];
    }
    out[i] = acc;
  }
  return out;
}

ComplexMatrix gram(const ComplexMatrix& a) {
  const std::size_t n = a.cols();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex ci = std::conj(row[i]);
      for (std::size_t j = i; j < n; ++j) {
        out(i, j) += ci * row[j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = out(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      out(j, i) = std::conj(out(i, j));
    }
  }
  return out;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("operator+: " + shape(a) + " vs " + shape(b));
  }
  ComplexMatrix out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] += bd[i];
  }
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a + Complex(-1.0) * b;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  for (auto& z : out.data()) {
    z *= s;
  }
  return out;
}

ComplexMatrix inverse(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgumentError("inverse: matrix is " + shape(a) + ", not square");
  }
  require_finite(a, "inverse");

  const std::size_t n = a.rows();
  double scale = 0.0;
  for (const auto& z : a.data()) {
    scale = std::max(scale, std::abs(z));
  }
  const double threshold = kSingularPivotRatio * scale;

  ComplexMatrix work = a;
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(work(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = std::abs(work(r, col));
      if (m > best) {
        best = m;
        pivot = r;
      }
    }
    if (!(best > threshold)) {
      throw SingularMatrixError("inverse: pivot " + std::to_string(best) + " in column " +
                                std::to_string(col) + " below threshold");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }

    const Complex recip = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= recip;
      inv(col, j) *= recip;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) {
        continue;
      }
      const Complex f = work(r, col);
      if (f == Complex(0.0)) {
        continue;
      }
      // Columns left of `col` are already zero in `work`.
      for (std::size_t j = col; j < n; ++j) {
        work(r, j) -= f * work(col, j);
      }
      for (std::size_t j = 0; j < n; ++j) {
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

ComplexMatrix pinv(const ComplexMatrix& a) {
  require_finite(a, "pinv");
  if (a.rows() < a.cols()) {
    throw SingularMatrixError("pinv: " + shape(a) + " cannot have full column rank");
  }
  const ComplexMatrix g = inverse(gram(a));
  // g * a^H without forming a^H.
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex gik = g(i, k);
      for (std::size_t j = 0; j < a.rows(); ++j) {
        out(i, j) += gik * std::conj(a(j, k));
      }
    }
  }
  return out;
}

std::vector<double> row_norms(const ComplexMatrix& a) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (const auto& z : a.row(i)) {
      acc += std::norm(z);
    }
    out[i] = std::sqrt(acc);
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (const auto& z : a.data()) {
    acc += std::norm(z);
  }
  return std::sqrt(acc);
}

}  // namespace osic
