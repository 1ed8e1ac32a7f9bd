#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "osic/channel.hpp"
#include "osic/linalg.hpp"
#include "osic/modem.hpp"

namespace osic {

enum class NullingCore { Zf, Mmse };

std::string_view to_string(NullingCore c) noexcept;
NullingCore parse_core(std::string_view name);

/// `iterations` cancellation steps followed by joint linear detection of the
/// remaining streams. 0 is the plain linear detector, n_t - 1 ordinary V-BLAST.
struct DetectorSpec {
  NullingCore core = NullingCore::Mmse;
  int iterations = 0;
};

struct NullingResult {
  ComplexMatrix g;
  /// Smaller is stronger: row norms of pinv(h) for ZF, Re diag(D) for MMSE.
  std::vector<double> order_metric;
};

/// ZF: G = pinv(h). MMSE: D = (h^H h + I noise_var)^-1, G = D h^H.
NullingResult nulling_matrix(const ComplexMatrix& h, NullingCore core, const SnrSpec& snr);

struct DetectionTrace {
  /// Original stream indices, in the order they were cancelled.
  std::vector<std::size_t> order;
  /// Post-nulling soft value of each cancelled stream, parallel to `order`.
  ComplexVector nulled;
  /// Hard decisions in original stream order.
  ComplexVector symbols;
  /// Constellation indices of `symbols`.
  std::vector<std::size_t> labels;
};

/// One ordered successive interference cancellation run, advanced one
/// iteration at a time. Every iterate() recomputes the nulling matrix of the
/// deflated channel; the detected stream's column is deleted and an index map
/// keeps track of original stream positions.
class OsicDetection {
 public:
  OsicDetection(const ComplexMatrix& h, std::span<const Complex> y, NullingCore core,
                const SnrSpec& snr, const Constellation& c);

  std::size_t remaining() const noexcept { return streams_.size(); }
  std::size_t iterations_done() const noexcept { return trace_.order.size(); }

  /// Ordering, nulling, slicing and cancellation of the strongest remaining
  /// stream. Requires remaining() >= 2.
  void iterate();

  /// Linear detection of every remaining stream, then export. Consumes the state.
  DetectionTrace finish() &&;

 private:
  ComplexMatrix h_;
  ComplexVector y_;
  NullingCore core_;
  SnrSpec snr_;
  const Constellation* constellation_;
  std::vector<std::size_t> streams_;
  DetectionTrace trace_;
};

ComplexVector linear_detect(const ComplexMatrix& h, std::span<const Complex> y, NullingCore core,
                            const SnrSpec& snr, const Constellation& c);

DetectionTrace vblast_detect(const ComplexMatrix& h, std::span<const Complex> y,
                             const DetectorSpec& spec, const SnrSpec& snr, const Constellation& c);

/// Exhaustive maximum-likelihood search. Candidate index puts stream 0 in
/// the most significant digit; ties go to the lowest index.
ComplexVector ml_detect(const ComplexMatrix& h, std::span<const Complex> y, const Constellation& c);

inline constexpr int kMlMaxSearchBits = 16;

}  // namespace osic
