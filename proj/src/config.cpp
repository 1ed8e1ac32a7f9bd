#include "osic/config.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace osic {

namespace {

const char* const kManifestKeys[] = {"command", "tool-version", "rng", "timestamp", "outputs"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  return parse_number<int>(key, value);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

template <typename Fn>
auto parse_enum(const std::string& key, const std::string& value, Fn fn) {
  try {
    return fn(value);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(key, e.what());
  }
}

/// "a:step:b" (inclusive) or "a,b,c".
std::vector<double> parse_snr_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  if (value.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 3) throw ConfigError(key, "range must be start:step:stop");
    const double a = parse_number<double>(key, parts[0]);
    const double step = parse_number<double>(key, parts[1]);
    const double b = parse_number<double>(key, parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError(key, "range needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 10'000) throw ConfigError(key, "range has too many points");
    for (long i = 0; i <= n; ++i) {
      // Snap to 1e-9 dB so that 16 + 3 * 0.1 prints as 16.3.
      out.push_back(std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
  } else {
    std::stringstream ss(value);
    std::string p;
    while (std::getline(ss, p, ',')) {
      p = trim(p);
      if (!p.empty()) out.push_back(parse_number<double>(key, p));
    }
  }
  if (out.empty()) throw ConfigError(key, "SNR list is empty");
  for (double v : out) {
    if (!std::isfinite(v)) throw ConfigError(key, "SNR values must be finite");
  }
  return out;
}

std::string join_snr(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += shortest(v[i]);
  }
  return s;
}

bool is_known_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (key == k.name) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::BerSweep:
      return "ber-sweep";
    case Command::IterSweep:
      return "iter-sweep";
    case Command::Calibrate:
      return "calibrate";
    case Command::Bench:
      return "bench";
    case Command::Compare:
      return "compare";
    case Command::FormulaEval:
      return "formula-eval";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::BerSweep, Command::IterSweep, Command::Calibrate, Command::Bench,
                    Command::Compare, Command::FormulaEval}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("command", "unknown subcommand '" + std::string(name) + "'");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"nt", "8", "transmit antennas N_t"},
      {"nr", "", "receive antennas N_r (default: nt)"},
      {"subcarriers", "64", "OFDM subcarriers K per channel use"},
      {"mod", "qam16", "modulation: qpsk | qam16"},
      {"detector", "vblast", "detector: zf | mmse | vblast | ml"},
      {"core", "mmse", "V-BLAST nulling core: zf | mmse"},
      {"iters", "", "fixed V-BLAST iterations N_i (default: nt-1)"},
      {"policy", "fixed", "iteration policy: fixed | formula | feedback"},
      {"target-ber", "0.01", "target BER for formula/feedback/calibrate"},
      {"calib", "", "calibration table CSV for the feedback policy"},
      {"snr-est", "genie", "SNR seen by the policies: genie | pilot"},
      {"snr-ref", "total", "SNR reference: total (noise = nt/SNR) | per-stream (noise = 1/SNR)"},
      {"pilots", "1000", "pilot uses for --snr-est pilot"},
      {"snr", "16:2:34", "SNR list in dB, start:step:stop or comma separated"},
      {"min-symbols", "10000", "minimum transmitted symbols per BER point"},
      {"min-errors", "100", "minimum bit errors per BER point"},
      {"budget-factor", "100", "symbol cap per point, as a multiple of min-symbols"},
      {"seed", "1", "RNG seed"},
      {"workers", "1", "Monte Carlo worker threads (env OSIC_BENCH_WORKERS)"},
      {"bench-trials", "10000", "timed detections per variant per SNR"},
      {"bench-warmup", "100", "untimed warm-up detections per variant per SNR"},
      {"out", ".", "output directory"},
      {"emit-plot", "false", "also write long-format plot data"},
      {"preset", "", "figure recipe: fig2a..fig2d, fig3a, fig3b, fig4a..fig4d, fig6a, fig7"},
  };
  return keys;
}

const std::map<std::string, std::map<std::string, std::string>>& presets() {
  static const auto table = [] {
    std::map<std::string, std::map<std::string, std::string>> p;
    const char* cores[] = {"zf", "mmse"};
    const char* mods[] = {"qpsk", "qam16"};
    const char* panels = "abcd";
    for (int i = 0; i < 4; ++i) {
      const std::string core = cores[i % 2];
      const std::string mod = mods[i / 2];
      p[std::string("fig2") + panels[i]] = {{"nt", "4"}, {"mod", mod}, {"core", core},
                                            {"snr", "0:3:30"}};
      p[std::string("fig4") + panels[i]] = {{"nt", "16"}, {"mod", mod}, {"core", core},
                                            {"snr", "0:3:30"}};
    }
    p["fig3a"] = {{"nt", "8"}, {"mod", "qam16"}, {"core", "zf"}, {"snr", "0:3:30"}};
    p["fig3b"] = {{"nt", "8"}, {"mod", "qam16"}, {"core", "mmse"}, {"snr", "0:3:30"}};
    p["fig6a"] = {{"nt", "8"}, {"mod", "qam16"}, {"core", "mmse"}, {"snr", "16:2:34"}};
    p["fig7"] = {{"nt", "8"}, {"mod", "qam16"}, {"core", "mmse"}, {"snr", "16:2:34"}};
    return p;
  }();
  return table;
}

bool is_manifest_key(const std::string& key) {
  for (const char* k : kManifestKeys) {
    if (key == k) return true;
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "config line " + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

RunConfig parse_config(Command command,
                       const std::vector<std::pair<std::string, std::string>>& flags,
                       const std::optional<std::string>& file_text,
                       const std::optional<std::string>& env_workers) {
  std::map<std::string, std::string> v;
  for (const auto& k : config_keys()) v[k.name] = k.default_value;

  std::vector<std::pair<std::string, std::string>> file_pairs;
  if (file_text) file_pairs = parse_key_values(*file_text);

  auto check_keys = [](const std::vector<std::pair<std::string, std::string>>& pairs,
                       bool allow_manifest) {
    for (const auto& [key, value] : pairs) {
      if (allow_manifest && is_manifest_key(key)) continue;
      if (!is_known_key(key)) throw ConfigError(key, "unknown key");
    }
  };
  check_keys(file_pairs, true);
  check_keys(flags, false);

  std::string preset;
  for (const auto& [key, value] : file_pairs) {
    if (key == "preset") preset = value;
  }
  for (const auto& [key, value] : flags) {
    if (key == "preset") preset = value;
  }
  if (!preset.empty()) {
    const auto it = presets().find(preset);
    if (it == presets().end()) throw ConfigError("preset", "unknown preset '" + preset + "'");
    for (const auto& [key, value] : it->second) v[key] = value;
  }
  for (const auto& [key, value] : file_pairs) {
    if (!is_manifest_key(key)) v[key] = value;
  }
  if (env_workers && !env_workers->empty()) v["workers"] = *env_workers;
  for (const auto& [key, value] : flags) v[key] = value;
  v["preset"] = preset;

  RunConfig rc;
  SweepConfig& s = rc.sweep;
  s.n_t = parse_int("nt", v["nt"]);
  if (s.n_t < 1 || s.n_t > 64) throw ConfigError("nt", "must lie in [1, 64]");
  if (v["nr"].empty()) v["nr"] = v["nt"];
  s.n_r = parse_int("nr", v["nr"]);
  if (s.n_r < s.n_t || s.n_r > 64) throw ConfigError("nr", "must lie in [nt, 64]");
  s.subcarriers = parse_int("subcarriers", v["subcarriers"]);
  s.modulation = parse_enum("mod", v["mod"], parse_modulation);
  s.core = parse_enum("core", v["core"], parse_core);
  if (v["iters"].empty()) v["iters"] = std::to_string(s.n_t - 1);
  const int iters = parse_int("iters", v["iters"]);
  if (iters < 0 || iters > s.n_t - 1) {
    throw ConfigError("iters", "N_i = " + v["iters"] + " outside [0, nt-1] = [0, " +
                                   std::to_string(s.n_t - 1) + "]");
  }
  s.target_ber = parse_number<double>("target-ber", v["target-ber"]);
  s.snr_estimation = parse_enum("snr-est", v["snr-est"], parse_snr_estimation);
  s.snr_reference = parse_enum("snr-ref", v["snr-ref"], parse_snr_reference);
  s.pilot_uses = parse_int("pilots", v["pilots"]);
  s.snr_db = parse_snr_list("snr", v["snr"]);
  v["snr"] = join_snr(s.snr_db);
  s.min_symbols = parse_number<std::uint64_t>("min-symbols", v["min-symbols"]);
  s.min_bit_errors = parse_number<std::uint64_t>("min-errors", v["min-errors"]);
  s.budget_factor = parse_number<std::uint64_t>("budget-factor", v["budget-factor"]);
  s.seed = parse_number<std::uint64_t>("seed", v["seed"]);
  s.workers = parse_int("workers", v["workers"]);
  s.bench_trials = parse_number<std::uint64_t>("bench-trials", v["bench-trials"]);
  s.bench_warmup = parse_int("bench-warmup", v["bench-warmup"]);
  rc.out_dir = v["out"].empty() ? "." : v["out"];
  rc.emit_plot = parse_bool("emit-plot", v["emit-plot"]);
  rc.preset = preset;

  const std::string& policy = v["policy"];
  if (policy != "fixed" && policy != "formula" && policy != "feedback") {
    throw ConfigError("policy", "expected fixed, formula or feedback, got '" + policy + "'");
  }
  const std::string& detector = v["detector"];
  if (detector != "zf" && detector != "mmse" && detector != "vblast" && detector != "ml") {
    throw ConfigError("detector", "expected zf, mmse, vblast or ml, got '" + detector + "'");
  }

  if (!v["calib"].empty()) {
    try {
      s.calibration = std::make_shared<const CalibrationTable>(CalibrationTable::load(v["calib"]));
    } catch (const InvalidArgumentError& e) {
      throw ConfigError("calib", e.what());
    }
  }

  switch (command) {
    case Command::BerSweep:
      if (detector == "zf") {
        s.variants = {Variant::linear(NullingCore::Zf)};
      } else if (detector == "mmse") {
        s.variants = {Variant::linear(NullingCore::Mmse)};
      } else if (detector == "ml") {
        s.variants = {Variant::ml()};
      } else if (policy == "fixed") {
        s.variants = {Variant::fixed(s.core, iters)};
      } else if (policy == "formula") {
        s.variants = {Variant::formula(s.core)};
      } else {
        s.variants = {Variant::feedback(s.core, s.target_ber)};
      }
      break;
    case Command::IterSweep:
      for (int n = 0; n < s.n_t; ++n) s.variants.push_back(Variant::fixed(s.core, n));
      break;
    case Command::FormulaEval:
      if (s.snr_db.size() != 1) throw ConfigError("snr", "formula-eval takes a single SNR value");
      if (s.n_t < 2) throw ConfigError("nt", "formula-eval needs nt >= 2");
      rc.eval_snr = s.snr_db.front();
      break;
    case Command::Calibrate:
    case Command::Bench:
    case Command::Compare:
      break;
  }
  if (command != Command::FormulaEval) s.validate();
  if ((command == Command::Bench) && s.bench_trials < 10'000) {
    throw ConfigError("bench-trials", "need at least 10000 timed detections per variant");
  }

  rc.resolved = std::move(v);
  return rc;
}

void RunManifest::write(std::ostream& os) const {
  os << "# osic run manifest\n";
  os << "command = " << command << "\n";
  os << "tool-version = " << tool_version << "\n";
  os << "rng = " << rng << "\n";
  os << "timestamp = " << timestamp << "\n";
  os << "outputs = ";
  for (std::size_t i = 0; i < outputs.size(); ++i) os << (i ? "," : "") << outputs[i];
  os << "\n";
  for (const auto& [k, val] : config) os << k << " = " << val << "\n";
}

RunManifest RunManifest::read(std::istream& is) {
  std::stringstream buf;
  buf << is.rdbuf();
  RunManifest m;
  m.tool_version.clear();
  for (auto& [k, val] : parse_key_values(buf.str())) {
    if (k == "command") {
      m.command = val;
    } else if (k == "tool-version") {
      m.tool_version = val;
    } else if (k == "rng") {
      m.rng = val;
    } else if (k == "timestamp") {
      m.timestamp = val;
    } else if (k == "outputs") {
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) m.outputs.push_back(item);
      }
    } else {
      m.config[k] = val;
    }
  }
  return m;
}

std::string RunManifest::config_text() const {
  std::string s;
  for (const auto& [k, val] : config) s += k + " = " + val + "\n";
  return s;
}

}  // namespace osic
