#include "osic/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace osic {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgumentError("calibration table: bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, const std::string& what) {
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgumentError("calibration table: bad " + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string IterationPolicy::tag() const {
  switch (kind) {
    case Kind::Fixed:
      return "fixed" + std::to_string(fixed_iterations);
    case Kind::Formula:
      return "formula";
    case Kind::Feedback:
      return "feedback";
  }
  return "?";
}

int n_imax(int n_t) {
  if (n_t < 1) {
    throw InvalidArgumentError("n_imax: n_t must be positive");
  }
  return n_t / 2;
}

int formula_iters(double snr_db, int n_t) {
  if (n_t < 2) {
    throw InvalidArgumentError("formula_iters: n_t must be at least 2");
  }
  // std::round rounds halves away from zero.
  const double raw = std::round(19.0 - 0.75 * snr_db);
  const double clamped = std::min<double>(n_imax(n_t), std::max(1.0, raw));
  return static_cast<int>(clamped);
}

CalibrationTable::CalibrationTable(CalibrationMeta meta, std::vector<CalibrationRow> rows)
    : meta_(meta), rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw InvalidArgumentError("calibration table is empty");
  }
  int max_n = 0;
  for (const auto& r : rows_) {
    if (!(r.ber >= 0.0 && r.ber <= 1.0) || !std::isfinite(r.snr_db) || r.n_i < 0) {
      throw InvalidArgumentError("calibration table: invalid row at snr " +
                                 format_double(r.snr_db));
    }
    max_n = std::max(max_n, r.n_i);
  }
  curves_.resize(static_cast<std::size_t>(max_n) + 1);
  for (const auto& r : rows_) {
    const double lb = r.ber > 0.0 ? std::max(std::log10(r.ber), kLogBerFloor) : kLogBerFloor;
    curves_[static_cast<std::size_t>(r.n_i)].push_back({r.snr_db, lb});
  }
  for (auto& c : curves_) {
    std::sort(c.begin(), c.end(), [](const Knot& a, const Knot& b) { return a.snr_db < b.snr_db; });
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i].snr_db == c[i - 1].snr_db) {
        throw InvalidArgumentError("calibration table: duplicate row at snr " +
                                   format_double(c[i].snr_db));
      }
    }
  }
}

bool CalibrationTable::covers(int n_i) const noexcept {
  return n_i >= 0 && static_cast<std::size_t>(n_i) < curves_.size() &&
         !curves_[static_cast<std::size_t>(n_i)].empty();
}

const std::vector<CalibrationTable::Knot>& CalibrationTable::curve(int n_i) const {
  if (!covers(n_i)) {
    throw InvalidArgumentError("calibration table has no rows for n_i = " + std::to_string(n_i));
  }
  return curves_[static_cast<std::size_t>(n_i)];
}

double CalibrationTable::interpolate_log_ber(const std::vector<Knot>& c, double snr_db) const {
  if (snr_db <= c.front().snr_db) return c.front().log_ber;
  if (snr_db >= c.back().snr_db) return c.back().log_ber;
  const auto hi = std::upper_bound(c.begin(), c.end(), snr_db,
                                   [](double s, const Knot& k) { return s < k.snr_db; });
  const auto lo = hi - 1;
  const double t = (snr_db - lo->snr_db) / (hi->snr_db - lo->snr_db);
  return lo->log_ber + t * (hi->log_ber - lo->log_ber);
}

bool CalibrationTable::meets_target(double snr_db, int n_i, double target_ber) const {
  const auto& c = curve(n_i);
  if (snr_db < c.front().snr_db) return false;
  if (snr_db > c.back().snr_db) return true;
  return interpolate_log_ber(c, snr_db) <= std::log10(target_ber);
}

double CalibrationTable::predicted_ber(double snr_db, int n_i) const {
  return std::pow(10.0, interpolate_log_ber(curve(n_i), snr_db));
}

void CalibrationTable::write_csv(std::ostream& os) const {
  os << "# mod=" << to_string(meta_.modulation) << " nt=" << meta_.n_t << " nr=" << meta_.n_r
     << " core=" << to_string(meta_.core) << " seed=" << meta_.seed
     << " snr_ref=" << to_string(meta_.snr_reference) << "\n";
  os << "snr_db,n_i,ber,symbols\n";
  for (const auto& r : rows_) {
    os << format_double(r.snr_db) << ',' << r.n_i << ',' << format_double(r.ber) << ','
       << r.symbols << "\n";
  }
}

CalibrationTable CalibrationTable::read_csv(std::istream& is) {
  CalibrationMeta meta;
  bool have_meta = false;
  bool have_header = false;
  std::vector<CalibrationRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::map<std::string, std::string> kv;
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      if (!kv.count("mod")) continue;
      try {
        meta.modulation = parse_modulation(kv.at("mod"));
        meta.n_t = parse_int<int>(kv.at("nt"), "nt");
        meta.n_r = parse_int<int>(kv.at("nr"), "nr");
        meta.core = parse_core(kv.at("core"));
        meta.seed = parse_int<std::uint64_t>(kv.at("seed"), "seed");
        if (kv.count("snr_ref")) meta.snr_reference = parse_snr_reference(kv.at("snr_ref"));
      } catch (const std::out_of_range&) {
        throw InvalidArgumentError("calibration table: incomplete metadata line");
      }
      have_meta = true;
      continue;
    }
    if (!have_header) {
      if (line != "snr_db,n_i,ber,symbols") {
        throw InvalidArgumentError("calibration table: unexpected header '" + line + "'");
      }
      have_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4) {
      throw InvalidArgumentError("calibration table: malformed row '" + line + "'");
    }
    rows.push_back({parse_double(f[0], "snr_db"), parse_int<int>(f[1], "n_i"),
                    parse_double(f[2], "ber"), parse_int<std::uint64_t>(f[3], "symbols")});
  }
  if (!have_meta) {
    throw InvalidArgumentError("calibration table: missing '# mod=...' metadata line");
  }
  return CalibrationTable(meta, std::move(rows));
}

CalibrationTable CalibrationTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgumentError("cannot open calibration table '" + path + "'");
  }
  return read_csv(in);
}

void CalibrationTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw InvalidArgumentError("cannot write calibration table '" + path + "'");
  }
  write_csv(out);
}

SnrEstimate genie_snr(const SnrSpec& snr) { return {snr.snr_db, SnrEstimate::Source::Genie}; }

int feedback_iters(const SnrEstimate& est, const CalibrationTable& table, double target_ber,
                   int n_t) {
  if (table.meta().n_t != n_t) {
    throw InvalidArgumentError("feedback_iters: table was calibrated for n_t = " +
                               std::to_string(table.meta().n_t) + ", not " + std::to_string(n_t));
  }
  if (!std::isfinite(est.snr_db)) {
    throw InvalidArgumentError("feedback_iters: SNR estimate is not finite");
  }
  const int cap = n_imax(n_t);
  for (int n = 1; n <= cap; ++n) {
    if (table.meets_target(est.snr_db, n, target_ber)) {
      return n;
    }
  }
  return cap;
}

SnrEstimate estimate_snr(std::span<const ComplexVector> y_pilot, const ComplexMatrix& h,
                         std::span<const ComplexVector> x_pilot, SnrReference ref) {
  if (y_pilot.empty() || y_pilot.size() != x_pilot.size()) {
    throw InvalidArgumentError("estimate_snr: need a nonempty pilot block with matching x and y");
  }
  double acc = 0.0;
  for (std::size_t p = 0; p < y_pilot.size(); ++p) {
    if (y_pilot[p].size() != h.rows()) {
      throw DimensionError("estimate_snr: pilot observation length does not match channel rows");
    }
    const ComplexVector hx = matvec(h, x_pilot[p]);
    for (std::size_t r = 0; r < hx.size(); ++r) {
      acc += std::norm(y_pilot[p][r] - hx[r]);
    }
  }
  const double noise_var = acc / static_cast<double>(y_pilot.size() * h.rows());
  double db = kSnrEstimateCapDb;
  if (noise_var > 0.0) {
    db = std::min(kSnrEstimateCapDb,
                  snr_db_from_noise_var(noise_var, static_cast<int>(h.cols()), ref));
  }
  return {db, SnrEstimate::Source::PilotAided};
}

}  // namespace osic
