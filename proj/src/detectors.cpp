#include "osic/detectors.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace osic {

std::string_view to_string(NullingCore c) noexcept { return c == NullingCore::Zf ? "zf" : "mmse"; }

NullingCore parse_core(std::string_view name) {
  if (name == "zf") return NullingCore::Zf;
  if (name == "mmse") return NullingCore::Mmse;
  throw InvalidArgumentError("unknown nulling core '" + std::string(name) + "'");
}

NullingResult nulling_matrix(const ComplexMatrix& h, NullingCore core, const SnrSpec& snr) {
  if (core == NullingCore::Zf) {
    ComplexMatrix g = pinv(h);
    std::vector<double> metric = row_norms(g);
    return {std::move(g), std::move(metric)};
  }

  if (!h.all_finite()) {
    throw InvalidArgumentError("nulling_matrix: channel contains NaN or Inf");
  }
  ComplexMatrix a = gram(h);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    a(i, i) += snr.noise_var;
  }
  const ComplexMatrix d = inverse(a);

  const std::size_t n = h.cols();
  ComplexMatrix g(n, h.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex dik = d(i, k);
      for (std::size_t j = 0; j < h.rows(); ++j) {
        g(i, j) += dik * std::conj(h(j, k));
      }
    }
  }
  std::vector<double> metric(n);
  for (std::size_t i = 0; i < n; ++i) {
    metric[i] = d(i, i).real();
  }
  return {std::move(g), std::move(metric)};
}

OsicDetection::OsicDetection(const ComplexMatrix& h, std::span<const Complex> y, NullingCore core,
                             const SnrSpec& snr, const Constellation& c)
    : h_(h), y_(y.begin(), y.end()), core_(core), snr_(snr), constellation_(&c),
      streams_(h.cols()) {
  if (y.size() != h.rows()) {
    throw DimensionError("detect: y has length " + std::to_string(y.size()) + " but channel has " +
                         std::to_string(h.rows()) + " rows");
  }
  std::iota(streams_.begin(), streams_.end(), std::size_t{0});
  trace_.symbols.assign(h.cols(), Complex{});
  trace_.labels.assign(h.cols(), 0);
  trace_.order.reserve(h.cols());
  trace_.nulled.reserve(h.cols());
}

void OsicDetection::iterate() {
  if (streams_.size() < 2) {
    throw InvalidArgumentError("iterate: fewer than two streams remain");
  }
  const NullingResult nr = nulling_matrix(h_, core_, snr_);

  std::size_t k = 0;
  for (std::size_t i = 1; i < nr.order_metric.size(); ++i) {
    if (nr.order_metric[i] < nr.order_metric[k]) {
      k = i;
    }
  }

  Complex z = 0.0;
  const auto w = nr.g.row(k);
  for (std::size_t j = 0; j < w.size(); ++j) {
    z += w[j] * y_[j];
  }
  const std::size_t label = constellation_->slice_index(z);
  const Complex s = constellation_->point(label);

  for (std::size_t r = 0; r < h_.rows(); ++r) {
    y_[r] -= h_(r, k) * s;
  }
  h_ = h_.without_column(k);

  const std::size_t stream = streams_[k];
  streams_.erase(streams_.begin() + static_cast<std::ptrdiff_t>(k));
  trace_.order.push_back(stream);
  trace_.nulled.push_back(z);
  trace_.symbols[stream] = s;
  trace_.labels[stream] = label;
}

DetectionTrace OsicDetection::finish() && {
  const NullingResult nr = nulling_matrix(h_, core_, snr_);
  const ComplexVector z = matvec(nr.g, y_);
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    const std::size_t label = constellation_->slice_index(z[i]);
    trace_.symbols[streams_[i]] = constellation_->point(label);
    trace_.labels[streams_[i]] = label;
  }
  streams_.clear();
  return std::move(trace_);
}

ComplexVector linear_detect(const ComplexMatrix& h, std::span<const Complex> y, NullingCore core,
                            const SnrSpec& snr, const Constellation& c) {
  return std::move(OsicDetection(h, y, core, snr, c)).finish().symbols;
}

DetectionTrace vblast_detect(const ComplexMatrix& h, std::span<const Complex> y,
                             const DetectorSpec& spec, const SnrSpec& snr, const Constellation& c) {
  if (spec.iterations < 0 || static_cast<std::size_t>(spec.iterations) >= h.cols()) {
    throw InvalidArgumentError("vblast_detect: iterations " + std::to_string(spec.iterations) +
                               " outside [0, " + std::to_string(h.cols() - 1) + "]");
  }
  OsicDetection run(h, y, spec.core, snr, c);
  for (int i = 0; i < spec.iterations; ++i) {
    run.iterate();
  }
  return std::move(run).finish();
}

ComplexVector ml_detect(const ComplexMatrix& h, std::span<const Complex> y, const Constellation& c) {
  const std::size_t n_t = h.cols();
  if (n_t * static_cast<std::size_t>(c.bits_per_symbol()) > kMlMaxSearchBits) {
    throw InvalidArgumentError("ml_detect: search space of " +
                               std::to_string(n_t * c.bits_per_symbol()) +
                               " bits exceeds the exhaustive bound");
  }
  if (y.size() != h.rows()) {
    throw DimensionError("ml_detect: y length does not match channel rows");
  }
  const std::size_t m = c.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n_t; ++i) total *= m;

  std::vector<std::size_t> digits(n_t, 0);
  ComplexVector x(n_t);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t cand = 0; cand < total; ++cand) {
    std::size_t rem = cand;
    for (std::size_t s = n_t; s-- > 0;) {
      digits[s] = rem % m;
      rem /= m;
      x[s] = c.point(digits[s]);
    }
    double d = 0.0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
      Complex e = y[r];
      for (std::size_t s = 0; s < n_t; ++s) {
        e -= h(r, s) * x[s];
      }
      d += std::norm(e);
    }
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  std::size_t rem = best;
  for (std::size_t s = n_t; s-- > 0;) {
    x[s] = c.point(rem % m);
    rem /= m;
  }
  return x;
}

}  // namespace osic
