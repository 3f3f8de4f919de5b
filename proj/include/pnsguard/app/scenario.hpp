#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pnsguard/app/presets.hpp"
#include "pnsguard/detection.hpp"
#include "pnsguard/hbt.hpp"
#include "pnsguard/keyrate.hpp"
#include "pnsguard/photon_stats.hpp"
#include "pnsguard/pns_attack.hpp"
#include "pnsguard/sampling.hpp"

namespace pnsguard::app {

enum class Command { AttackSweep, KeyRate, Convergence, WaitingTime, Hbt, Detect };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view text);

enum class HbtStream { Source, Poisson };

/// Everything one invocation needs. Fields that a command does not use are
/// ignored by it.
struct Scenario {
  Command command = Command::AttackSweep;

  std::string source_name = "our-hbn";
  SourceParams source = PresetTable::builtin().source("our-hbn").params;

  AttackKind attack_kind = AttackKind::Soft;
  std::vector<double> attack_x{0.0};
  double eta = 1.0;  ///< linear-loss transmission inside the sampling pipeline

  SamplingPlan plan;
  std::vector<std::uint64_t> sizes{1'000, 10'000, 100'000, 1'000'000, 10'000'000};
  std::uint64_t reference_samples = kDefaultReferenceSamples;

  ChannelParams channel;
  std::vector<double> loss_db{0.0};

  LinkBudget link;  ///< repetition_rate, n_required and eta_det; mu/loss set per row
  std::string link_name = "micius";
  double flyover_s = 273.0;

  DetectorParams detector;
  std::uint64_t n_pulses = 10'000'000;
  std::size_t max_lag = kDefaultMaxLag;
  HbtStream hbt_stream = HbtStream::Source;
  double poisson_mean = 0.5;

  double threshold = kDefaultRelativeThreshold;
  double k_sigma = kDefaultKSigma;

  std::string output_path;  ///< empty writes to the caller's stream
  unsigned threads = 0;
};

struct Diagnostic {
  std::string field;  ///< dotted config path, e.g. "attack.x"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// "start:stop:step" (inclusive), "a,b,c" or a single number.
/// Throws std::invalid_argument on malformed text.
std::vector<double> parse_grid(std::string_view text);

/// Comma separated counts; scientific notation allowed ("1e5").
std::vector<std::uint64_t> parse_counts(std::string_view text);

/// Domain checks on a fully assembled scenario, one diagnostic per violation.
std::vector<Diagnostic> check_scenario(const Scenario& s);

/// Reads a JSON scenario into `out`, collecting every structural and domain
/// violation. Preset lookups use `presets`, extended by a "presets_file" key.
std::vector<Diagnostic> scenario_from_json(std::string_view text, PresetTable presets,
                                           Scenario& out);

/// Diagnostics for a config file; empty when it is valid.
/// Throws std::runtime_error when the file cannot be read.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);

/// Throws ConfigError with all diagnostics when the file is invalid.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace pnsguard::app
