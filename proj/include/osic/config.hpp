#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osic/harness.hpp"

namespace osic {

inline constexpr const char* kToolVersion = "0.1.0";

/// Subcommands that consume a SweepConfig.
enum class Command { BerSweep, IterSweep, Calibrate, Bench, Compare, FormulaEval };

std::string_view to_string(Command c) noexcept;
Command parse_command(std::string_view name);

struct RunConfig {
  SweepConfig sweep;
  /// Every key at its resolved value, in canonical text form.
  std::map<std::string, std::string> resolved;
  std::string out_dir = ".";
  bool emit_plot = false;
  std::string preset;
  std::optional<double> eval_snr;
};

/// Keys and defaults understood by parse_config, in help order.
struct ConfigKey {
  const char* name;
  const char* default_value;
  const char* help;
};
const std::vector<ConfigKey>& config_keys();

/// Named experiment recipes: the key overrides each one applies over the defaults.
const std::map<std::string, std::map<std::string, std::string>>& presets();

/// Parses flat "key = value" text. '#' starts a comment; blank lines are skipped.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

/// Resolves a run configuration. Precedence, lowest first: built-in defaults,
/// preset, config file, $OSIC_BENCH_WORKERS (workers only), command-line flags.
/// Unknown keys, malformed values and range violations throw ConfigError
/// naming the key.
RunConfig parse_config(Command command,
                       const std::vector<std::pair<std::string, std::string>>& flags,
                       const std::optional<std::string>& file_text = std::nullopt,
                       const std::optional<std::string>& env_workers = std::nullopt);

/// Everything needed to reproduce a run. Serialised in the same flat
/// key = value format as config files, so a manifest can be fed back in.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string tool_version = kToolVersion;
  std::string rng;
  std::string timestamp;
  std::vector<std::string> outputs;

  void write(std::ostream& os) const;
  static RunManifest read(std::istream& is);
  /// The config entries as a file body accepted by parse_config.
  std::string config_text() const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Metadata keys that may appear in a manifest read back as a config file.
bool is_manifest_key(const std::string& key);

}  // namespace osic
