#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osic/channel.hpp"
#include "osic/detectors.hpp"
#include "osic/modem.hpp"

namespace osic {

inline constexpr double kDefaultTargetBer = 1e-2;

struct IterationPolicy {
  enum class Kind { Fixed, Formula, Feedback };

  Kind kind = Kind::Fixed;
  int fixed_iterations = 0;
  double target_ber = kDefaultTargetBer;

  static IterationPolicy fixed(int n) { return {Kind::Fixed, n, kDefaultTargetBer}; }
  static IterationPolicy formula() { return {Kind::Formula, 0, kDefaultTargetBer}; }
  static IterationPolicy feedback(double target_ber = kDefaultTargetBer) {
    return {Kind::Feedback, 0, target_ber};
  }

  /// "fixed<n>", "formula" or "feedback".
  std::string tag() const;

  friend bool operator==(const IterationPolicy&, const IterationPolicy&) = default;
};

/// Largest useful iteration count: floor(n_t / 2).
int n_imax(int n_t);

/// Closed-form SNR -> iteration count:
///   min(floor(n_t/2), max(1, round(19 - 0.75 snr_db))), halves rounded away from zero.
int formula_iters(double snr_db, int n_t);

struct CalibrationRow {
  double snr_db = 0.0;
  int n_i = 0;
  double ber = 0.0;
  std::uint64_t symbols = 0;

  friend bool operator==(const CalibrationRow&, const CalibrationRow&) = default;
};

struct CalibrationMeta {
  Modulation modulation = Modulation::Qam16;
  int n_t = 8;
  int n_r = 8;
  NullingCore core = NullingCore::Mmse;
  std::uint64_t seed = 1;
  SnrReference snr_reference = SnrReference::TotalTransmit;

  friend bool operator==(const CalibrationMeta&, const CalibrationMeta&) = default;
};

/// Precharacterised (snr, n_i) -> BER grid. BER at an arbitrary SNR is
/// linearly interpolated in (snr_db, log10 ber) between the bracketing rows
/// of the same n_i; zero BERs are floored at kLogBerFloor for interpolation.
class CalibrationTable {
 public:
  CalibrationTable(CalibrationMeta meta, std::vector<CalibrationRow> rows);

  const CalibrationMeta& meta() const noexcept { return meta_; }
  const std::vector<CalibrationRow>& rows() const noexcept { return rows_; }
  bool covers(int n_i) const noexcept;

  /// True when the predicted BER for n_i at snr_db is at most target_ber.
  /// Below the curve's SNR range the target is never met; above it, always.
  bool meets_target(double snr_db, int n_i, double target_ber) const;

  /// Interpolated BER; snr_db is clamped into the curve's range.
  double predicted_ber(double snr_db, int n_i) const;

  void write_csv(std::ostream& os) const;
  static CalibrationTable read_csv(std::istream& is);
  static CalibrationTable load(const std::string& path);
  void save(const std::string& path) const;

  static constexpr double kLogBerFloor = -12.0;

 private:
  struct Knot {
    double snr_db;
    double log_ber;
  };
  const std::vector<Knot>& curve(int n_i) const;
  double interpolate_log_ber(const std::vector<Knot>& c, double snr_db) const;

  CalibrationMeta meta_;
  std::vector<CalibrationRow> rows_;
  std::vector<std::vector<Knot>> curves_;
};

struct SnrEstimate {
  enum class Source { Genie, PilotAided };
  double snr_db = 0.0;
  Source source = Source::Genie;
};

SnrEstimate genie_snr(const SnrSpec& snr);

/// Smallest n in [1, n_imax(n_t)] whose predicted BER meets target_ber, or
/// n_imax(n_t) when none does.
int feedback_iters(const SnrEstimate& est, const CalibrationTable& table, double target_ber,
                   int n_t);

inline constexpr double kSnrEstimateCapDb = 60.0;

/// Data-aided estimate with known channel: noise_var = mean over pilot uses
/// of |y - h x|^2 / n_r, reported in the given SNR reference and capped at
/// kSnrEstimateCapDb.
SnrEstimate estimate_snr(std::span<const ComplexVector> y_pilot, const ComplexMatrix& h,
                         std::span<const ComplexVector> x_pilot,
                         SnrReference ref = SnrReference::TotalTransmit);

}  // namespace osic
