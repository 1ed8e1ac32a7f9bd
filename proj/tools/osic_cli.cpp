// Command-line front end for the OSIC detector toolkit.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osic/config.hpp"
#include "osic/harness.hpp"
#include "osic/policy.hpp"

namespace fs = std::filesystem;
using namespace osic;

namespace {

// Table II of the reference study, for side-by-side reporting only.
const std::map<std::string, std::string> kReferenceRatios = {
    {"fixed-ordinary", "100"}, {"feedback", "122"}, {"fixed-nimax", "74.2"}, {"formula", "57"}};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

class Run {
 public:
  Run(Command cmd, RunConfig rc) : cmd_(cmd), rc_(std::move(rc)), dir_(rc_.out_dir) {
    fs::create_directories(dir_);
    manifest_.command = std::string(to_string(cmd_));
    manifest_.config = rc_.resolved;
    manifest_.rng = std::string(Rng::kAlgorithm);
    manifest_.timestamp = utc_timestamp();
  }

  std::string manifest_name() const { return std::string(to_string(cmd_)) + ".manifest"; }

  std::vector<std::string> metadata() const {
    const auto& s = rc_.sweep;
    std::ostringstream ss;
    ss << "manifest=" << manifest_name() << " mod=" << to_string(s.modulation) << " nt=" << s.n_t
       << " nr=" << s.n_r << " core=" << to_string(s.core) << " seed=" << s.seed
       << " snr_ref=" << to_string(s.snr_reference);
    return {ss.str(), "stopping: >= " + std::to_string(s.min_bit_errors) + " bit errors and >= " +
                          std::to_string(s.min_symbols) + " symbols, cap " +
                          std::to_string(s.budget_factor) + "x symbols"};
  }

  void write_points(const std::string& name, const std::vector<BerPoint>& points) {
    auto out = open_out(dir_ / (name + ".csv"));
    write_ber_csv(out, points, metadata());
    record(name + ".csv");
    if (rc_.emit_plot) {
      auto plot = open_out(dir_ / (name + ".plot.csv"));
      write_plot_data(plot, rc_.preset.empty() ? name : rc_.preset, points);
      record(name + ".plot.csv");
    }
  }

  void record(const std::string& file) {
    manifest_.outputs.push_back(file);
    std::cout << (dir_ / file).string() << "\n";
  }

  void finish() {
    auto out = open_out(dir_ / manifest_name());
    manifest_.write(out);
  }

  std::shared_ptr<const CalibrationTable> ensure_calibration() {
    if (rc_.sweep.calibration) return rc_.sweep.calibration;
    std::cerr << "no --calib given; calibrating first\n";
    CalibrationResult cal = calibrate(rc_.sweep, rc_.sweep.target_ber);
    cal.table.save((dir_ / "calibration.csv").string());
    record("calibration.csv");
    rc_.sweep.calibration = std::make_shared<const CalibrationTable>(std::move(cal.table));
    return rc_.sweep.calibration;
  }

  int execute() {
    SweepConfig& s = rc_.sweep;
    switch (cmd_) {
      case Command::FormulaEval:
        std::cout << formula_iters(*rc_.eval_snr, s.n_t) << "\n";
        return 0;
      case Command::BerSweep:
        for (const auto& v : s.variants) {
          if (v.policy.kind == IterationPolicy::Kind::Feedback) ensure_calibration();
        }
        write_points("ber-sweep", run_ber_sweep(s));
        break;
      case Command::IterSweep:
        write_points("iter-sweep", run_ber_sweep(s));
        break;
      case Command::Calibrate: {
        CalibrationResult cal = calibrate(s, s.target_ber);
        cal.table.save((dir_ / "calibration.csv").string());
        record("calibration.csv");
        write_points("calibrate", cal.points);
        auto out = open_out(dir_ / "calibrate_derived.csv");
        out << "# target_ber=" << s.target_ber << "\nsnr_db,n_i\n";
        std::cerr << "snr_db  n_i (target BER " << s.target_ber << ")\n";
        for (const auto& [snr, n] : cal.derived) {
          out << snr << ',' << n << "\n";
          std::cerr << std::setw(6) << snr << "  " << n << "\n";
        }
        record("calibrate_derived.csv");
        break;
      }
      case Command::Compare:
        ensure_calibration();
        write_points("compare", compare_policies(s));
        break;
      case Command::Bench: {
        ensure_calibration();
        SweepConfig single = s;
        single.workers = 1;
        const BenchReport rep = bench_complexity(single);
        write_points("bench", rep.points);
        auto out = open_out(dir_ / "bench_report.csv");
        out << "# machine=" << rep.machine << "\n# trials_per_snr=" << rep.trials
            << " batch=" << rep.batch << "\n";
        out << "policy,mean_detect_ns,ratio_percent,reference_percent\n";
        const std::string ord = Variant::fixed(s.core, s.n_t - 1).tag();
        const std::string cap = Variant::fixed(s.core, n_imax(s.n_t)).tag();
        std::cerr << std::left << std::setw(18) << "variant" << std::right << std::setw(14)
                  << "mean ns" << std::setw(10) << "ratio %" << "\n";
        for (const auto& e : rep.entries) {
          std::string ref;
          if (e.tag == ord) ref = kReferenceRatios.at("fixed-ordinary");
          else if (e.tag == cap) ref = kReferenceRatios.at("fixed-nimax");
          else if (e.tag.ends_with("formula")) ref = kReferenceRatios.at("formula");
          else if (e.tag.ends_with("feedback")) ref = kReferenceRatios.at("feedback");
          out << e.tag << ',' << e.overall_mean_ns << ',' << e.ratio_percent << ',' << ref << "\n";
          std::cerr << std::left << std::setw(18) << e.tag << std::right << std::setw(14)
                    << std::fixed << std::setprecision(1) << e.overall_mean_ns << std::setw(10)
                    << e.ratio_percent << "\n";
        }
        record("bench_report.csv");
        break;
      }
    }
    finish();
    return 0;
  }

 private:
  Command cmd_;
  RunConfig rc_;
  fs::path dir_;
  RunManifest manifest_;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::string> env_workers() {
  if (const char* e = std::getenv("OSIC_BENCH_WORKERS")) return std::string(e);
  return std::nullopt;
}

std::string key_listing() {
  std::ostringstream ss;
  ss << "Options accepted by every simulation subcommand (also valid as key = value\n"
        "lines in a --config file):\n";
  for (const auto& k : config_keys()) {
    std::string flag = std::string("--") + k.name;
    ss << "  " << std::left << std::setw(18) << flag << k.help;
    if (*k.default_value) ss << " [" << k.default_value << "]";
    ss << "\n";
  }
  ss << "\nEnvironment: OSIC_BENCH_WORKERS overrides the worker count unless --workers is given.\n";
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OSIC / V-BLAST MIMO-OFDM detection toolkit"};
  app.require_subcommand(1);
  app.footer(key_listing());

  struct Sub {
    Command cmd;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_file;
  };
  const std::pair<Command, const char*> commands[] = {
      {Command::BerSweep, "BER vs SNR for one detector"},
      {Command::IterSweep, "BER vs SNR for N_i = 0..nt-1"},
      {Command::Calibrate, "BER grid for N_i = 0..nt/2 and the per-SNR iteration requirement"},
      {Command::Bench, "average detection time per variant"},
      {Command::Compare, "formula vs feedback policy on shared draws"},
      {Command::FormulaEval, "print the formula iteration count for --snr"},
  };
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& [cmd, desc] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->cmd = cmd;
    sub->app = app.add_subcommand(std::string(to_string(cmd)), desc);
    for (const auto& k : config_keys()) {
      const std::string name = std::string("--") + k.name;
      if (std::string(k.name) == "emit-plot") {
        sub->options[k.name] = sub->app->add_flag(name, k.help);
      } else {
        sub->options[k.name] = sub->app->add_option(name, sub->values[k.name], k.help);
      }
    }
    sub->app->add_option("--config", sub->config_file, "flat key = value config file");
    subs.push_back(std::move(sub));
  }
  std::string rerun_manifest;
  std::string rerun_out;
  CLI::App* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  rerun->add_option("manifest", rerun_manifest, "manifest file")->required();
  rerun->add_option("--out", rerun_out, "output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (rerun->parsed()) {
      std::ifstream in(rerun_manifest);
      if (!in) throw ConfigError("manifest", "cannot open '" + rerun_manifest + "'");
      const RunManifest m = RunManifest::read(in);
      const Command cmd = parse_command(m.command);
      std::vector<std::pair<std::string, std::string>> flags;
      if (!rerun_out.empty()) flags.emplace_back("out", rerun_out);
      Run run(cmd, parse_config(cmd, flags, m.config_text()));
      return run.execute();
    }
    for (auto& sub : subs) {
      if (!sub->app->parsed()) continue;
      std::vector<std::pair<std::string, std::string>> flags;
      for (const auto& k : config_keys()) {
        CLI::Option* opt = sub->options[k.name];
        if (opt->count() == 0) continue;
        flags.emplace_back(k.name, std::string(k.name) == "emit-plot" ? "true" : sub->values[k.name]);
      }
      std::optional<std::string> file;
      if (!sub->config_file.empty()) file = read_file(sub->config_file);
      Run run(sub->cmd, parse_config(sub->cmd, flags, file, env_workers()));
      return run.execute();
    }
  } catch (const std::exception& e) {
    std::cerr << "osic: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
