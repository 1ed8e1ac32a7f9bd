#include "osic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <sys/utsname.h>

namespace osic {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kPilotStreamBit = 1ULL << 63;

std::uint64_t chunk_stream(std::size_t snr_index, std::uint64_t chunk) {
  return (static_cast<std::uint64_t>(snr_index) << 32) | (chunk & 0xffffffffULL);
}

template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) pool.emplace_back(body);
  pool.clear();  // joins
  if (failure) std::rethrow_exception(failure);
}

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

/// One (H, bits, y) realisation; `labels` are the transmitted constellation indices.
struct Draw {
  ChannelRealization channel;
  std::vector<std::size_t> labels;
  ComplexVector y;
};

Draw draw_vector(const SweepConfig& cfg, const Constellation& c, const SnrSpec& snr, Rng& rng,
                 int subcarrier) {
  Draw d{gen_channel(cfg.n_r, cfg.n_t, rng, subcarrier), {}, {}};
  Bits bits;
  bits.reserve(static_cast<std::size_t>(cfg.n_t * c.bits_per_symbol()));
  d.labels.resize(static_cast<std::size_t>(cfg.n_t));
  for (auto& label : d.labels) {
    label = 0;
    for (int b = 0; b < c.bits_per_symbol(); ++b) {
      const auto bit = rng.bit();
      bits.push_back(bit);
      label = (label << 1) | bit;
    }
  }
  const ComplexVector x = modulate(bits, c);
  const ComplexVector noise = gen_noise(cfg.n_r, snr.noise_var, rng);
  d.y = transmit(d.channel, x, noise);
  return d;
}

std::uint64_t label_bit_errors(const std::vector<std::size_t>& tx,
                               const std::vector<std::size_t>& rx) {
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    e += static_cast<std::uint64_t>(std::popcount(tx[i] ^ rx[i]));
  }
  return e;
}

struct CellPlan {
  std::size_t snr_index = 0;
  Variant variant;
  int iterations = 0;
  SnrSpec snr;
  double estimated_snr_db = 0.0;
};

std::vector<std::size_t> detect_labels(const CellPlan& cell, const Draw& d, const Constellation& c) {
  if (cell.variant.kind == Variant::Kind::Ml) {
    const ComplexVector s = ml_detect(d.channel.h, d.y, c);
    std::vector<std::size_t> labels(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) labels[i] = c.slice_index(s[i]);
    return labels;
  }
  return vblast_detect(d.channel.h, d.y, {cell.variant.core, cell.iterations}, cell.snr, c).labels;
}

struct ChunkResult {
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  std::uint64_t symbols = 0;
  std::uint64_t vectors = 0;
  std::uint64_t redraws = 0;
  double detect_ns = 0.0;
};

ChunkResult run_chunk(const SweepConfig& cfg, const CellPlan& cell, std::uint64_t chunk) {
  const Constellation& c = Constellation::get(cfg.modulation);
  Rng rng(cfg.seed, chunk_stream(cell.snr_index, chunk));
  ChunkResult r;
  for (int k = 0; k < cfg.subcarriers; ++k) {
    for (;;) {
      const Draw d = draw_vector(cfg, c, cell.snr, rng, k);
      try {
        const auto t0 = Clock::now();
        const auto labels = detect_labels(cell, d, c);
        const auto t1 = Clock::now();
        r.detect_ns += std::chrono::duration<double, std::nano>(t1 - t0).count();
        r.bit_errors += label_bit_errors(d.labels, labels);
        break;
      } catch (const SingularMatrixError&) {
        ++r.redraws;
      }
    }
    ++r.vectors;
  }
  r.symbols = r.vectors * static_cast<std::uint64_t>(cfg.n_t);
  r.bits = r.symbols * static_cast<std::uint64_t>(c.bits_per_symbol());
  return r;
}

SnrEstimate operating_estimate(const SweepConfig& cfg, std::size_t snr_index, const SnrSpec& snr) {
  if (cfg.snr_estimation == SnrEstimation::Genie) {
    return genie_snr(snr);
  }
  const Constellation& c = Constellation::get(cfg.modulation);
  Rng rng(cfg.seed, kPilotStreamBit | snr_index);
  const ComplexMatrix h = gen_channel(cfg.n_r, cfg.n_t, rng).h;
  std::vector<ComplexVector> xs;
  std::vector<ComplexVector> ys;
  xs.reserve(static_cast<std::size_t>(cfg.pilot_uses));
  ys.reserve(static_cast<std::size_t>(cfg.pilot_uses));
  for (int p = 0; p < cfg.pilot_uses; ++p) {
    ComplexVector x(static_cast<std::size_t>(cfg.n_t));
    for (auto& s : x) s = c.point(rng.next_u64() % c.size());
    const ComplexVector n = gen_noise(cfg.n_r, snr.noise_var, rng);
    ComplexVector y = matvec(h, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += n[i];
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  return estimate_snr(ys, h, xs, cfg.snr_reference);
}

int decide_iterations(const SweepConfig& cfg, const Variant& v, const SnrEstimate& est) {
  if (v.kind == Variant::Kind::Ml) return -1;
  switch (v.policy.kind) {
    case IterationPolicy::Kind::Fixed:
      return v.policy.fixed_iterations;
    case IterationPolicy::Kind::Formula:
      return formula_iters(est.snr_db, cfg.n_t);
    case IterationPolicy::Kind::Feedback:
      return feedback_iters(est, *cfg.calibration, v.policy.target_ber, cfg.n_t);
  }
  return 0;
}

void validate_variants(const SweepConfig& cfg, const std::vector<Variant>& variants) {
  const Constellation& c = Constellation::get(cfg.modulation);
  for (const auto& v : variants) {
    if (v.kind == Variant::Kind::Ml) {
      if (cfg.n_t * c.bits_per_symbol() > kMlMaxSearchBits) {
        throw ConfigError("detector", "ML search over " + std::to_string(cfg.n_t) + " x " +
                                          std::string(c.name()) + " exceeds the exhaustive bound");
      }
      continue;
    }
    switch (v.policy.kind) {
      case IterationPolicy::Kind::Fixed:
        if (v.policy.fixed_iterations < 0 || v.policy.fixed_iterations > cfg.n_t - 1) {
          throw ConfigError("iters", "N_i = " + std::to_string(v.policy.fixed_iterations) +
                                         " outside [0, " + std::to_string(cfg.n_t - 1) + "]");
        }
        break;
      case IterationPolicy::Kind::Formula:
        if (cfg.n_t < 2) throw ConfigError("policy", "formula policy needs nt >= 2");
        break;
      case IterationPolicy::Kind::Feedback: {
        if (!(v.policy.target_ber > 0.0 && v.policy.target_ber < 0.5)) {
          throw ConfigError("target-ber", "feedback target must lie in (0, 0.5)");
        }
        if (!cfg.calibration) {
          throw ConfigError("calib", "feedback policy needs a calibration table");
        }
        const auto& m = cfg.calibration->meta();
        if (m.n_t != cfg.n_t || m.n_r != cfg.n_r || m.modulation != cfg.modulation ||
            m.core != v.core || m.snr_reference != cfg.snr_reference) {
          throw ConfigError("calib", "calibration table metadata does not match the configuration");
        }
        for (int n = 1; n <= n_imax(cfg.n_t); ++n) {
          if (!cfg.calibration->covers(n)) {
            throw ConfigError("calib", "calibration table lacks rows for n_i = " +
                                           std::to_string(n));
          }
        }
        break;
      }
    }
  }
}

std::vector<BerPoint> sweep_variants(const SweepConfig& cfg, const std::vector<Variant>& variants) {
  cfg.validate();
  if (variants.empty()) {
    throw ConfigError("detector", "no detector variants to run");
  }
  validate_variants(cfg, variants);

  struct CellState {
    CellPlan plan;
    std::uint64_t next_chunk = 0;
    ChunkResult total;
    bool done = false;
  };

  std::vector<CellState> cells;
  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const SnrSpec snr = SnrSpec::from_db(cfg.snr_db[s], cfg.n_t, cfg.snr_reference);
    const SnrEstimate est = operating_estimate(cfg, s, snr);
    for (const auto& v : variants) {
      CellState cs;
      cs.plan = {s, v, decide_iterations(cfg, v, est), snr, est.snr_db};
      cells.push_back(std::move(cs));
    }
  }

  const std::uint64_t symbols_per_chunk =
      static_cast<std::uint64_t>(cfg.subcarriers) * static_cast<std::uint64_t>(cfg.n_t);
  const std::uint64_t cap_symbols = cfg.budget_factor * cfg.min_symbols;
  const std::uint64_t min_chunks = (cfg.min_symbols + symbols_per_chunk - 1) / symbols_per_chunk;
  const std::uint64_t cap_chunks = (cap_symbols + symbols_per_chunk - 1) / symbols_per_chunk;

  auto stop = [&](const ChunkResult& t) {
    return (t.symbols >= cfg.min_symbols && t.bit_errors >= cfg.min_bit_errors) ||
           t.symbols >= cap_symbols;
  };

  // Chunk counts per round depend only on the ordered totals so far, never on
  // timing, which keeps the reduction identical for any worker count.
  auto plan_chunks = [&](const CellState& cs) -> std::uint64_t {
    const std::uint64_t done = cs.next_chunk;
    std::uint64_t want = done < min_chunks ? min_chunks - done : 1;
    if (done >= min_chunks) {
      if (cs.total.bit_errors > 0) {
        const double est = static_cast<double>(done) * static_cast<double>(cfg.min_bit_errors) /
                           static_cast<double>(cs.total.bit_errors);
        const auto extra = static_cast<std::uint64_t>(std::ceil(est * 1.1)) + 1;
        want = extra > done ? extra - done : 1;
      } else {
        want = done;
      }
      want = std::min(want, 4 * done + 4);
    }
    return std::max<std::uint64_t>(1, std::min(want, cap_chunks - done));
  };

  struct Task {
    std::size_t cell;
    std::uint64_t chunk;
  };

  for (;;) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].done) continue;
      const auto n = plan_chunks(cells[i]);
      for (std::uint64_t j = 0; j < n; ++j) tasks.push_back({i, cells[i].next_chunk + j});
    }
    if (tasks.empty()) break;

    std::vector<ChunkResult> results(tasks.size());
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t t) {
      results[t] = run_chunk(cfg, cells[tasks[t].cell].plan, tasks[t].chunk);
    });

    for (std::size_t t = 0; t < tasks.size(); ++t) {
      CellState& cs = cells[tasks[t].cell];
      cs.next_chunk = tasks[t].chunk + 1;
      if (cs.done) continue;
      const ChunkResult& r = results[t];
      cs.total.bit_errors += r.bit_errors;
      cs.total.bits += r.bits;
      cs.total.symbols += r.symbols;
      cs.total.vectors += r.vectors;
      cs.total.redraws += r.redraws;
      cs.total.detect_ns += r.detect_ns;
      if (stop(cs.total)) cs.done = true;
    }
  }

  std::vector<BerPoint> out;
  out.reserve(cells.size());
  for (const auto& cs : cells) {
    const auto draws = cs.total.vectors + cs.total.redraws;
    if (static_cast<double>(cs.total.redraws) > 1e-3 * static_cast<double>(draws)) {
      throw SingularMatrixError("sweep: " + std::to_string(cs.total.redraws) +
                                " rank-deficient channel redraws exceed 0.1% of " +
                                std::to_string(draws) + " draws");
    }
    BerPoint p;
    p.snr_db = cfg.snr_db[cs.plan.snr_index];
    p.n_i = cs.plan.iterations;
    p.policy = cs.plan.variant.tag();
    p.bit_errors = cs.total.bit_errors;
    p.total_bits = cs.total.bits;
    p.ber = static_cast<double>(p.bit_errors) / static_cast<double>(p.total_bits);
    p.mean_detect_ns = cs.total.detect_ns / static_cast<double>(cs.total.vectors);
    p.symbols = cs.total.symbols;
    p.estimated_snr_db = cs.plan.estimated_snr_db;
    p.channel_redraws = cs.total.redraws;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::string Variant::tag() const {
  if (kind == Kind::Ml) return "ml";
  return std::string(to_string(core)) + "-" + policy.tag();
}

std::string_view to_string(SnrEstimation e) noexcept {
  return e == SnrEstimation::Genie ? "genie" : "pilot";
}

SnrEstimation parse_snr_estimation(std::string_view name) {
  if (name == "genie") return SnrEstimation::Genie;
  if (name == "pilot") return SnrEstimation::Pilot;
  throw InvalidArgumentError("unknown SNR estimation mode '" + std::string(name) + "'");
}

void SweepConfig::validate() const {
  if (n_t < 1) throw ConfigError("nt", "must be at least 1");
  if (n_r < n_t) throw ConfigError("nr", "must be at least nt");
  if (subcarriers < 1) throw ConfigError("subcarriers", "must be at least 1");
  if (snr_db.empty()) throw ConfigError("snr", "SNR list is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("snr", "SNR values must be finite");
  }
  if (min_symbols < 10'000) throw ConfigError("min-symbols", "must be at least 10000");
  if (min_bit_errors < 100) throw ConfigError("min-errors", "must be at least 100");
  if (budget_factor < 1) throw ConfigError("budget-factor", "must be at least 1");
  if (workers < 1) throw ConfigError("workers", "must be at least 1");
  if (pilot_uses < 1) throw ConfigError("pilots", "must be at least 1");
  if (!(target_ber > 0.0 && target_ber <= 1.0)) {
    throw ConfigError("target-ber", "must lie in (0, 1]");
  }
  if (bench_warmup < 0) throw ConfigError("bench-warmup", "must be non-negative");
}

std::vector<BerPoint> run_ber_sweep(const SweepConfig& cfg) { return sweep_variants(cfg, cfg.variants); }

CalibrationResult calibrate(const SweepConfig& cfg, double target_ber) {
  if (!(target_ber > 0.0 && target_ber <= 1.0)) {
    throw ConfigError("target-ber", "must lie in (0, 1]");
  }
  std::vector<Variant> variants;
  for (int n = 0; n <= n_imax(cfg.n_t); ++n) variants.push_back(Variant::fixed(cfg.core, n));
  std::vector<BerPoint> points = sweep_variants(cfg, variants);

  std::vector<CalibrationRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back({p.snr_db, p.n_i, p.ber, p.symbols});
  CalibrationMeta meta{cfg.modulation, cfg.n_t, cfg.n_r, cfg.core, cfg.seed, cfg.snr_reference};
  CalibrationTable table(meta, std::move(rows));

  std::vector<std::pair<double, int>> derived;
  for (double s : cfg.snr_db) {
    const int n = cfg.n_t >= 2 ? feedback_iters({s, SnrEstimate::Source::Genie}, table,
                                                target_ber, cfg.n_t)
                               : 0;
    derived.emplace_back(s, n);
  }
  return {std::move(table), std::move(points), std::move(derived)};
}

std::vector<BerPoint> compare_policies(const SweepConfig& cfg) {
  if (cfg.n_t < 2) throw ConfigError("nt", "policy comparison needs nt >= 2");
  const std::vector<Variant> variants = {
      Variant::formula(cfg.core),
      Variant::feedback(cfg.core, cfg.target_ber),
      Variant::fixed(cfg.core, cfg.n_t - 1),
      Variant::linear(cfg.core),
  };
  return sweep_variants(cfg, variants);
}

const BenchEntry& BenchReport::entry(const std::string& tag) const {
  for (const auto& e : entries) {
    if (e.tag == tag) return e;
  }
  throw InvalidArgumentError("bench report has no entry '" + tag + "'");
}

double BenchReport::mean_ns(const std::string& tag, double lo, double hi) const {
  const BenchEntry& e = entry(tag);
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    if (snr_db[i] >= lo && snr_db[i] <= hi) {
      acc += e.mean_ns[i];
      ++n;
    }
  }
  if (n == 0) throw InvalidArgumentError("bench report: no SNR points in range");
  return acc / n;
}

std::string machine_note() {
  std::ostringstream ss;
  utsname u{};
  if (uname(&u) == 0) {
    ss << u.sysname << ' ' << u.release << ' ' << u.machine << "; ";
  }
  ss << "hw_threads=" << std::thread::hardware_concurrency();
#if defined(__clang__)
  ss << "; clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  ss << "; gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  return ss.str();
}

BenchReport bench_complexity(const SweepConfig& cfg) {
  cfg.validate();
  if (cfg.n_t < 2) throw ConfigError("nt", "bench needs nt >= 2");
  if (cfg.bench_trials < 10'000) {
    throw ConfigError("bench-trials", "need at least 10000 timed detections per variant");
  }
  const int cap = n_imax(cfg.n_t);
  const Variant ordinary = Variant::fixed(cfg.core, cfg.n_t - 1);
  const Variant capped = Variant::fixed(cfg.core, cap);
  const Variant formula = Variant::formula(cfg.core);
  const Variant feedback = Variant::feedback(cfg.core, std::min(cfg.target_ber, 0.49));
  const Variant linear = Variant::linear(cfg.core);
  const std::vector<Variant> variants = {ordinary, capped, formula, feedback, linear};
  validate_variants(cfg, variants);

  const Constellation& c = Constellation::get(cfg.modulation);
  const CalibrationTable& table = *cfg.calibration;
  const double target = feedback.policy.target_ber;
  const NullingCore core = cfg.core;
  const int n_t = cfg.n_t;

  BenchReport report;
  report.snr_db = cfg.snr_db;
  report.trials = cfg.bench_trials;
  report.machine = machine_note();
  for (const auto& v : variants) report.entries.push_back({v.tag(), {}, 0.0, 0.0});

  using DetectFn = DetectionTrace (*)(const Draw&, const SnrSpec&, double, const Constellation&,
                                      NullingCore, int, const CalibrationTable&, double);
  // Everything from the policy decision through export happens inside these calls.
  const DetectFn fns[] = {
      [](const Draw& d, const SnrSpec& snr, double, const Constellation& c, NullingCore core,
         int n_t, const CalibrationTable&, double) {
        return vblast_detect(d.channel.h, d.y, {core, n_t - 1}, snr, c);
      },
      [](const Draw& d, const SnrSpec& snr, double, const Constellation& c, NullingCore core,
         int n_t, const CalibrationTable&, double) {
        return vblast_detect(d.channel.h, d.y, {core, n_imax(n_t)}, snr, c);
      },
      [](const Draw& d, const SnrSpec& snr, double est_db, const Constellation& c,
         NullingCore core, int n_t, const CalibrationTable&, double) {
        return vblast_detect(d.channel.h, d.y, {core, formula_iters(est_db, n_t)}, snr, c);
      },
      [](const Draw& d, const SnrSpec& snr, double est_db, const Constellation& c,
         NullingCore core, int n_t, const CalibrationTable& table, double target) {
        OsicDetection run(d.channel.h, d.y, core, snr, c);
        const int cap = n_imax(n_t);
        for (int i = 1; i <= cap; ++i) {
          run.iterate();
          if (table.meets_target(est_db, i, target)) break;
        }
        return std::move(run).finish();
      },
      [](const Draw& d, const SnrSpec& snr, double, const Constellation& c, NullingCore core,
         int, const CalibrationTable&, double) {
        return vblast_detect(d.channel.h, d.y, {core, 0}, snr, c);
      },
  };
  constexpr std::size_t kVariants = std::size(fns);

  const auto trials = static_cast<std::size_t>(cfg.bench_trials);
  std::vector<DetectionTrace> sink(trials);

  for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
    const SnrSpec snr = SnrSpec::from_db(cfg.snr_db[s], cfg.n_t, cfg.snr_reference);
    const SnrEstimate est = operating_estimate(cfg, s, snr);

    std::vector<Draw> draws;
    draws.reserve(trials);
    for (std::uint64_t chunk = 0; draws.size() < trials; ++chunk) {
      Rng rng(cfg.seed, chunk_stream(s, chunk));
      for (int k = 0; k < cfg.subcarriers && draws.size() < trials; ++k) {
        draws.push_back(draw_vector(cfg, c, snr, rng, k));
      }
    }

    for (std::size_t v = 0; v < kVariants; ++v) {
      for (int w = 0; w < cfg.bench_warmup; ++w) {
        sink[0] = fns[v](draws[static_cast<std::size_t>(w) % trials], snr, est.snr_db, c, core,
                         n_t, table, target);
      }
    }

    // Grow the batch until one batch spans at least 100 clock ticks.
    std::size_t batch = 16;
    for (;;) {
      const auto t0 = Clock::now();
      for (std::size_t i = 0; i < batch && i < trials; ++i) {
        sink[i] = fns[kVariants - 1](draws[i], snr, est.snr_db, c, core, n_t, table, target);
      }
      const auto ticks = (Clock::now() - t0).count();
      if (ticks >= 100 || batch >= trials) break;
      batch *= 2;
    }
    report.batch = std::max(report.batch, batch);

    std::vector<double> total_ns(kVariants, 0.0);
    std::vector<std::uint64_t> errors(kVariants, 0);
    std::vector<int> iterations(kVariants, -1);
    for (std::size_t start = 0; start < trials; start += batch) {
      const std::size_t end = std::min(trials, start + batch);
      for (std::size_t v = 0; v < kVariants; ++v) {
        const auto t0 = Clock::now();
        for (std::size_t i = start; i < end; ++i) {
          sink[i] = fns[v](draws[i], snr, est.snr_db, c, core, n_t, table, target);
        }
        const auto t1 = Clock::now();
        total_ns[v] += std::chrono::duration<double, std::nano>(t1 - t0).count();
        for (std::size_t i = start; i < end; ++i) {
          errors[v] += label_bit_errors(draws[i].labels, sink[i].labels);
          iterations[v] = static_cast<int>(sink[i].order.size());
        }
      }
    }

    const std::uint64_t bits =
        static_cast<std::uint64_t>(trials) * static_cast<std::uint64_t>(n_t * c.bits_per_symbol());
    for (std::size_t v = 0; v < kVariants; ++v) {
      const double mean = total_ns[v] / static_cast<double>(trials);
      report.entries[v].mean_ns.push_back(mean);
      BerPoint p;
      p.snr_db = cfg.snr_db[s];
      p.n_i = iterations[v];
      p.policy = report.entries[v].tag;
      p.bit_errors = errors[v];
      p.total_bits = bits;
      p.ber = static_cast<double>(errors[v]) / static_cast<double>(bits);
      p.mean_detect_ns = mean;
      p.symbols = static_cast<std::uint64_t>(trials) * static_cast<std::uint64_t>(n_t);
      p.estimated_snr_db = est.snr_db;
      report.points.push_back(std::move(p));
    }
  }

  for (auto& e : report.entries) {
    double acc = 0.0;
    for (double m : e.mean_ns) acc += m;
    e.overall_mean_ns = acc / static_cast<double>(e.mean_ns.size());
  }
  const double base = report.entries.front().overall_mean_ns;
  for (auto& e : report.entries) e.ratio_percent = 100.0 * e.overall_mean_ns / base;
  return report;
}

void write_ber_csv(std::ostream& os, const std::vector<BerPoint>& points,
                   const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) os << "# " << m << "\n";
  os << "snr_db,n_i,policy,bit_errors,total_bits,ber,mean_detect_ns\n";
  for (const auto& p : points) {
    os << fmt_double(p.snr_db) << ',';
    if (p.n_i >= 0) os << p.n_i;
    os << ',' << p.policy << ',' << p.bit_errors << ',' << p.total_bits << ','
       << fmt_double(p.ber) << ',' << fmt_double(std::round(p.mean_detect_ns * 10.0) / 10.0)
       << "\n";
  }
}

void write_plot_data(std::ostream& os, const std::string& figure,
                     const std::vector<BerPoint>& points) {
  os << "figure,series,x,y\n";
  for (const auto& p : points) {
    os << figure << ',' << p.policy << ',' << fmt_double(p.snr_db) << ',' << fmt_double(p.ber)
       << "\n";
  }
}

}  // namespace osic
