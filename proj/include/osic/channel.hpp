#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "osic/linalg.hpp"

namespace osic {

/// Reproducible normal/uniform source. Each (seed, stream) pair keys an
/// independent mt19937_64 whose state is derived through splitmix64, so a
/// stream's draws do not depend on which worker consumes it. Normals use
/// Box-Muller on 53-bit uniforms; both steps are fully specified here so
/// other implementations can match the sequence.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  static constexpr std::string_view kAlgorithm =
      "mt19937_64; state key = splitmix64(seed) ^ splitmix64(~stream); "
      "uniform = (u64 >> 11) * 2^-53; normal = Box-Muller (cos branch then sin branch)";

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// How the reported SNR relates to the per-antenna noise variance. Symbols
/// always have unit average energy per transmit antenna.
///
/// TotalTransmit: SNR is total transmit power over per-receive-antenna noise,
///   so noise_var = n_t / snr_linear.
/// PerStream: SNR is per-antenna symbol energy over noise, noise_var = 1 / snr_linear.
enum class SnrReference { TotalTransmit, PerStream };

std::string_view to_string(SnrReference r) noexcept;
SnrReference parse_snr_reference(std::string_view name);

struct SnrSpec {
  double snr_db = 0.0;
  double snr_linear = 1.0;
  /// Per-stream SNR; the MMSE regulariser is I / stream_snr_linear.
  double stream_snr_linear = 1.0;
  double noise_var = 1.0;

  static SnrSpec from_db(double snr_db, int n_t, SnrReference ref = SnrReference::TotalTransmit);
  /// Spec with the given noise variance, treated as a per-stream SNR.
  static SnrSpec from_noise_var(double noise_var);
};

/// Inverse of the SnrSpec mapping: the reported SNR (dB) for a noise variance.
double snr_db_from_noise_var(double noise_var, int n_t, SnrReference ref);

struct ChannelRealization {
  ComplexMatrix h;
  int subcarrier = 0;
};

/// n_r x n_t Rayleigh flat-fading matrix, entries i.i.d. CN(0, 1).
ChannelRealization gen_channel(int n_r, int n_t, Rng& rng, int subcarrier = 0);

/// Entries i.i.d. CN(0, noise_var). noise_var = 0 yields zeros without consuming draws.
ComplexVector gen_noise(int n_r, double noise_var, Rng& rng);

/// y = h x + noise.
ComplexVector transmit(const ChannelRealization& h, std::span<const Complex> x,
                       std::span<const Complex> noise);

}  // namespace osic
