#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "osic/linalg.hpp"

namespace osic {

enum class Modulation { Qpsk, Qam16 };

std::string_view to_string(Modulation m) noexcept;
Modulation parse_modulation(std::string_view name);

using Bits = std::vector<std::uint8_t>;

/// Gray-labelled unit-energy alphabet. Point i carries label i, so the bit
/// pattern of a point is simply its index written MSB first.
///
/// QPSK:   b1 b0 -> ((1 - 2 b1) + j (1 - 2 b0)) / sqrt(2)
/// 16-QAM: per axis {00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3} / sqrt(10),
///         I from b3 b2, Q from b1 b0.
class Constellation {
 public:
  static const Constellation& qpsk();
  static const Constellation& qam16();
  static const Constellation& get(Modulation m);

  Modulation modulation() const noexcept { return modulation_; }
  std::string_view name() const noexcept { return to_string(modulation_); }
  int bits_per_symbol() const noexcept { return bits_per_symbol_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const Complex> points() const noexcept { return points_; }
  const Complex& point(std::size_t label) const noexcept { return points_[label]; }

  /// Index of the nearest point; ties go to the lowest index.
  std::size_t slice_index(Complex z) const noexcept;

 private:
  Constellation(Modulation m, int bits_per_symbol, std::vector<Complex> points);

  Modulation modulation_;
  int bits_per_symbol_;
  std::vector<Complex> points_;
};

ComplexVector modulate(std::span<const std::uint8_t> bits, const Constellation& c);

/// The slicing operator: nearest constellation point to z.
Complex slice(Complex z, const Constellation& c);

Bits demodulate(std::span<const Complex> symbols, const Constellation& c);

/// Appends the label of `index` to `out`, MSB first.
void append_label_bits(std::size_t index, const Constellation& c, Bits& out);

std::uint64_t hamming_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace osic
