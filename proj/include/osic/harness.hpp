#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osic/channel.hpp"
#include "osic/detectors.hpp"
#include "osic/modem.hpp"
#include "osic/policy.hpp"

namespace osic {

/// One detector configuration inside a sweep.
struct Variant {
  enum class Kind { Osic, Ml };

  Kind kind = Kind::Osic;
  NullingCore core = NullingCore::Mmse;
  IterationPolicy policy;

  static Variant linear(NullingCore core) { return {Kind::Osic, core, IterationPolicy::fixed(0)}; }
  static Variant fixed(NullingCore core, int n) {
    return {Kind::Osic, core, IterationPolicy::fixed(n)};
  }
  static Variant formula(NullingCore core) { return {Kind::Osic, core, IterationPolicy::formula()}; }
  static Variant feedback(NullingCore core, double target_ber) {
    return {Kind::Osic, core, IterationPolicy::feedback(target_ber)};
  }
  static Variant ml() { return {Kind::Ml, NullingCore::Zf, IterationPolicy::fixed(0)}; }

  /// "ml", or "<core>-<policy>" such as "mmse-fixed3", "zf-formula".
  std::string tag() const;

  friend bool operator==(const Variant&, const Variant&) = default;
};

enum class SnrEstimation { Genie, Pilot };

std::string_view to_string(SnrEstimation e) noexcept;
SnrEstimation parse_snr_estimation(std::string_view name);

struct SweepConfig {
  int n_t = 8;
  int n_r = 8;
  int subcarriers = 64;
  Modulation modulation = Modulation::Qam16;
  /// Core used when a procedure builds its own variant list (calibrate, bench, compare).
  NullingCore core = NullingCore::Mmse;
  std::vector<Variant> variants;
  std::vector<double> snr_db;
  std::uint64_t min_symbols = 10'000;
  std::uint64_t min_bit_errors = 100;
  /// A point stops after budget_factor * min_symbols symbols even if short of errors.
  std::uint64_t budget_factor = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  SnrReference snr_reference = SnrReference::TotalTransmit;
  SnrEstimation snr_estimation = SnrEstimation::Genie;
  int pilot_uses = 1000;
  double target_ber = kDefaultTargetBer;
  std::shared_ptr<const CalibrationTable> calibration;
  std::uint64_t bench_trials = 10'000;
  int bench_warmup = 100;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

struct BerPoint {
  double snr_db = 0.0;
  /// Iterations performed; -1 for the ML detector.
  int n_i = 0;
  std::string policy;
  std::uint64_t bit_errors = 0;
  std::uint64_t total_bits = 0;
  double ber = 0.0;
  double mean_detect_ns = 0.0;
  std::uint64_t symbols = 0;
  double estimated_snr_db = 0.0;
  std::uint64_t channel_redraws = 0;
};

/// Monte Carlo BER for every (snr, variant) cell. Every variant at a given
/// SNR sees the same channels, bits and noise. Output is a function of the
/// config alone; worker count only changes wall time (and timing columns).
std::vector<BerPoint> run_ber_sweep(const SweepConfig& cfg);

struct CalibrationResult {
  CalibrationTable table;
  std::vector<BerPoint> points;
  /// (snr_db, smallest n_i in [1, n_imax] meeting the target, else n_imax).
  std::vector<std::pair<double, int>> derived;
};

/// Sweeps fixed n_i = 0..n_imax with cfg.core over cfg.snr_db.
CalibrationResult calibrate(const SweepConfig& cfg, double target_ber);

/// Formula, feedback, ordinary V-BLAST and the linear detector on shared draws.
/// Requires cfg.calibration.
std::vector<BerPoint> compare_policies(const SweepConfig& cfg);

struct BenchEntry {
  std::string tag;
  std::vector<double> mean_ns;  ///< per SNR in BenchReport::snr_db order
  double overall_mean_ns = 0.0;
  double ratio_percent = 0.0;   ///< vs ordinary V-BLAST, uniform SNR weight
};

struct BenchReport {
  std::vector<double> snr_db;
  std::vector<BenchEntry> entries;
  std::vector<BerPoint> points;
  std::uint64_t trials = 0;
  std::size_t batch = 0;
  std::string machine;

  const BenchEntry& entry(const std::string& tag) const;
  /// Uniform-weight mean over SNRs in [lo, hi].
  double mean_ns(const std::string& tag, double lo, double hi) const;
};

/// Wall-clock cost of the detection call for ordinary V-BLAST, fixed(n_imax),
/// formula, feedback and the linear detector. Single threaded. The feedback
/// variant consults the calibration table after every iteration inside the
/// timed call.
BenchReport bench_complexity(const SweepConfig& cfg);

std::string machine_note();

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points,
                   const std::vector<std::string>& metadata = {});

/// Long-format "figure,series,x,y" rows for external plotting tools.
void write_plot_data(std::ostream& os, const std::string& figure,
                     const std::vector<BerPoint>& points);

}  // namespace osic
