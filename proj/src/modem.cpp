#include "osic/modem.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace osic {

namespace {

// Per-axis Gray amplitude for a 2-bit pair: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
constexpr double kQam16Axis[4] = {-3.0, -1.0, 3.0, 1.0};

std::vector<Complex> make_qpsk() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Complex> pts(4);
  for (unsigned label = 0; label < 4; ++label) {
    const double i = 1.0 - 2.0 * ((label >> 1) & 1U);
    const double q = 1.0 - 2.0 * (label & 1U);
    pts[label] = Complex(i * s, q * s);
  }
  return pts;
}

std::vector<Complex> make_qam16() {
  const double s = 1.0 / std::sqrt(10.0);
  std::vector<Complex> pts(16);
  for (unsigned label = 0; label < 16; ++label) {
    pts[label] = Complex(kQam16Axis[(label >> 2) & 3U] * s, kQam16Axis[label & 3U] * s);
  }
  return pts;
}

}  // namespace

std::string_view to_string(Modulation m) noexcept {
  switch (m) {
    case Modulation::Qpsk:
      return "qpsk";
    case Modulation::Qam16:
      return "qam16";
  }
  return "?";
}

Modulation parse_modulation(std::string_view name) {
  if (name == "qpsk") return Modulation::Qpsk;
  if (name == "qam16") return Modulation::Qam16;
  throw InvalidArgumentError("unknown modulation '" + std::string(name) + "'");
}

Constellation::Constellation(Modulation m, int bits_per_symbol, std::vector<Complex> points)
    : modulation_(m), bits_per_symbol_(bits_per_symbol), points_(std::move(points)) {}

const Constellation& Constellation::qpsk() {
  static const Constellation c(Modulation::Qpsk, 2, make_qpsk());
  return c;
}

const Constellation& Constellation::qam16() {
  static const Constellation c(Modulation::Qam16, 4, make_qam16());
  return c;
}

const Constellation& Constellation::get(Modulation m) {
  return m == Modulation::Qpsk ? qpsk() : qam16();
}

std::size_t Constellation::slice_index(Complex z) const noexcept {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = std::norm(z - points_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ComplexVector modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
  const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
  if (bits.size() % bps != 0) {
    throw DimensionError("modulate: " + std::to_string(bits.size()) +
                         " bits is not a multiple of " + std::to_string(bps));
  }
  ComplexVector out(bits.size() / bps);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::size_t label = 0;
    for (std::size_t b = 0; b < bps; ++b) {
      label = (label << 1) | (bits[s * bps + b] & 1U);
    }
    out[s] = c.point(label);
  }
  return out;
}

Complex slice(Complex z, const Constellation& c) { return c.point(c.slice_index(z)); }

void append_label_bits(std::size_t index, const Constellation& c, Bits& out) {
  for (int b = c.bits_per_symbol() - 1; b >= 0; --b) {
    out.push_back(static_cast<std::uint8_t>((index >> b) & 1U));
  }
}

Bits demodulate(std::span<const Complex> symbols, const Constellation& c) {
  Bits out;
  out.reserve(symbols.size() * static_cast<std::size_t>(c.bits_per_symbol()));
  for (const auto& z : symbols) {
    append_label_bits(c.slice_index(z), c, out);
  }
  return out;
}

std::uint64_t hamming_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw DimensionError("hamming_errors: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n += (a[i] != b[i]) ? 1U : 0U;
  }
  return n;
}

}  // namespace osic
