#pragma once

#include <complex>
#include <random>

#include "osic/linalg.hpp"

namespace osic::test {

// Test-side randomness comes from the standard library, not osic::Rng, so
// fixtures stay independent of the code under test.
inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data()) z = Complex(n(gen), n(gen));
  return m;
}

inline ComplexVector random_vector(std::size_t len, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  ComplexVector v(len);
  for (auto& z : v) z = Complex(n(gen), n(gen));
  return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace osic::test
