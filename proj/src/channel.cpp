#include "osic/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace osic {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed) ^ splitmix64(~stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::string_view to_string(SnrReference r) noexcept {
  return r == SnrReference::TotalTransmit ? "total" : "per-stream";
}

SnrReference parse_snr_reference(std::string_view name) {
  if (name == "total") return SnrReference::TotalTransmit;
  if (name == "per-stream") return SnrReference::PerStream;
  throw InvalidArgumentError("unknown SNR reference '" + std::string(name) + "'");
}

SnrSpec SnrSpec::from_db(double snr_db, int n_t, SnrReference ref) {
  if (!std::isfinite(snr_db)) {
    throw InvalidArgumentError("SnrSpec: snr_db must be finite");
  }
  if (n_t < 1) {
    throw InvalidArgumentError("SnrSpec: n_t must be positive");
  }
  SnrSpec s;
  s.snr_db = snr_db;
  s.snr_linear = std::pow(10.0, snr_db / 10.0);
  s.stream_snr_linear =
      ref == SnrReference::TotalTransmit ? s.snr_linear / n_t : s.snr_linear;
  s.noise_var = 1.0 / s.stream_snr_linear;
  return s;
}

SnrSpec SnrSpec::from_noise_var(double noise_var) {
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw InvalidArgumentError("SnrSpec: noise_var must be positive and finite");
  }
  SnrSpec s;
  s.noise_var = noise_var;
  s.stream_snr_linear = 1.0 / noise_var;
  s.snr_linear = s.stream_snr_linear;
  s.snr_db = 10.0 * std::log10(s.snr_linear);
  return s;
}

double snr_db_from_noise_var(double noise_var, int n_t, SnrReference ref) {
  const double stream_db = -10.0 * std::log10(noise_var);
  return ref == SnrReference::TotalTransmit ? stream_db + 10.0 * std::log10(n_t) : stream_db;
}

ChannelRealization gen_channel(int n_r, int n_t, Rng& rng, int subcarrier) {
  if (n_t < 1 || n_r < n_t) {
    throw InvalidArgumentError("gen_channel: need n_r >= n_t >= 1, got n_r=" +
                               std::to_string(n_r) + " n_t=" + std::to_string(n_t));
  }
  const double sigma = std::sqrt(0.5);
  ComplexMatrix h(static_cast<std::size_t>(n_r), static_cast<std::size_t>(n_t));
  for (auto& z : h.data()) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(sigma * re, sigma * im);
  }
  return {std::move(h), subcarrier};
}

ComplexVector gen_noise(int n_r, double noise_var, Rng& rng) {
  if (n_r < 1) {
    throw InvalidArgumentError("gen_noise: n_r must be positive");
  }
  if (!(noise_var >= 0.0)) {
    throw InvalidArgumentError("gen_noise: negative noise variance");
  }
  ComplexVector n(static_cast<std::size_t>(n_r));
  if (noise_var == 0.0) {
    return n;
  }
  const double sigma = std::sqrt(noise_var / 2.0);
  for (auto& z : n) {
    const double re = rng.normal();
    const double im = rng.normal();
    z = Complex(sigma * re, sigma * im);
  }
  return n;
}

ComplexVector transmit(const ChannelRealization& h, std::span<const Complex> x,
                       std::span<const Complex> noise) {
  if (x.size() != h.h.cols() || noise.size() != h.h.rows()) {
    throw DimensionError("transmit: channel " + std::to_string(h.h.rows()) + "x" +
                         std::to_string(h.h.cols()) + ", x length " +
                         std::to_string(x.size()) + ", noise length " +
                         std::to_string(noise.size()));
  }
  ComplexVector y = matvec(h.h, x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += noise[i];
  }
  return y;
}

}  // namespace osic
