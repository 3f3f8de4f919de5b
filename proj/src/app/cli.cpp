#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "pnsguard/app/commands.hpp"
#include "pnsguard/errors.hpp"

namespace pnsguard::app {

namespace {

/// Raw flag values; unset optionals keep preset or scenario defaults.
struct Flags {
  std::string preset = "our-hbn";
  std::string presets_file;
  std::optional<double> qe, g2, g3, rep_rate;

  std::optional<std::uint64_t> seed, runs, samples;
  std::string out;
  unsigned threads = 0;

  std::string kind = "soft";
  std::optional<std::string> x;
  std::optional<double> eta;

  std::optional<std::string> loss;
  std::optional<double> eta_det, y0, e_int, e0, f;
  bool exact_yield = false;
  std::optional<double> link_rate, n_required;

  std::string sizes = "1e3,1e4,1e5,1e6,1e7";
  std::optional<double> reference;

  std::string link = "micius";
  std::optional<double> flyover;

  std::optional<double> pulses, efficiency, dark, split;
  std::optional<std::size_t> max_lag;
  std::string stream = "source";
  std::optional<double> poisson_mean;

  std::optional<double> threshold, k_sigma;

  std::string config;
};

void add_source_options(CLI::App* sub, Flags& f) {
  sub->add_option("--preset", f.preset, "Source preset name (our-hbn, hbn-high, qd)");
  sub->add_option("--presets-file", f.presets_file, "JSON file with extra presets");
  sub->add_option("--qe", f.qe, "Override quantum efficiency (P1)");
  sub->add_option("--g2", f.g2, "Override g2(0)");
  sub->add_option("--g3", f.g3, "Override g3(0,0)");
  sub->add_option("--rep-rate", f.rep_rate, "Override source repetition rate [Hz]");
  sub->add_option("--out", f.out, "Write CSV to this file instead of stdout");
}

void add_sampling_options(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--runs", f.runs, "Repeated runs");
  sub->add_option("--samples", f.samples, "Pulses per run");
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_channel_options(CLI::App* sub, Flags& f) {
  sub->add_option("--eta-det", f.eta_det, "Detector efficiency");
  sub->add_option("--y0", f.y0, "Dark-count yield per pulse");
  sub->add_option("--e-int", f.e_int, "Intrinsic error rate");
  sub->add_option("--e0", f.e0, "Error rate of dark counts");
  sub->add_option("--f", f.f, "Error-correction efficiency");
  sub->add_flag("--exact-yield", f.exact_yield, "Use Yn = Y0 + eta_n - Y0 eta_n");
  sub->add_option("--link-rate", f.link_rate, "Repetition rate for waiting times [Hz]");
  sub->add_option("--n-required", f.n_required, "Detected photons needed for g2");
}

/// Builds the scenario for `cmd` from parsed flags.
Scenario to_scenario(Command cmd, const Flags& f, std::vector<Diagnostic>& diags) {
  Scenario s;
  s.command = cmd;
  auto report = [&](std::string field, std::string msg) {
    diags.push_back({std::move(field), std::move(msg)});
  };

  PresetTable presets = PresetTable::builtin();
  if (!f.presets_file.empty()) {
    try {
      presets.load_file(f.presets_file);
    } catch (const std::exception& e) {
      report("--presets-file", e.what());
    }
  }
  if (presets.has_source(f.preset)) {
    s.source = presets.source(f.preset).params;
    s.source_name = presets.source(f.preset).name;
  } else {
    report("--preset", "unknown source preset '" + f.preset + "'");
  }
  if (f.qe || f.g2 || f.g3) s.source_name += "+overrides";
  if (f.qe) s.source.quantum_efficiency = *f.qe;
  if (f.g2) s.source.g2 = *f.g2;
  if (f.g3) s.source.g3 = *f.g3;
  if (f.rep_rate) s.source.repetition_rate = *f.rep_rate;

  if (f.seed) s.plan.master_seed = *f.seed;
  if (f.runs) s.plan.n_runs = *f.runs;
  if (f.samples) s.plan.n_samples = *f.samples;
  s.threads = f.threads;
  s.output_path = f.out;

  try {
    s.attack_kind = parse_attack_kind(f.kind);
  } catch (const std::invalid_argument& e) {
    report("--kind", e.what());
  }
  if (f.x) {
    try {
      s.attack_x = parse_grid(*f.x);
    } catch (const std::invalid_argument& e) {
      report("--x", e.what());
    }
  } else if (cmd == Command::AttackSweep) {
    s.attack_x = parse_grid("0:1:0.1");
  } else if (cmd == Command::Detect) {
    s.attack_x = {0.0, 0.25, 0.5};
  }
  if (f.eta) s.eta = *f.eta;

  if (f.eta_det) s.channel.eta_det = *f.eta_det;
  if (f.y0) s.channel.dark_yield = *f.y0;
  if (f.e_int) s.channel.intrinsic_error = *f.e_int;
  if (f.e0) s.channel.baseline_error = *f.e0;
  if (f.f) s.channel.ec_efficiency = *f.f;
  if (f.exact_yield) s.channel.yield_model = YieldModel::Exact;
  s.link.eta_det = s.channel.eta_det;
  if (f.link_rate) s.link.repetition_rate = *f.link_rate;
  if (f.n_required) s.link.n_required = *f.n_required;

  if (cmd == Command::WaitingTime) {
    if (presets.has_link(f.link)) {
      s.link_name = presets.link(f.link).name;
      s.flyover_s = presets.link(f.link).flyover_s;
      s.loss_db = {presets.link(f.link).loss_db};
    } else {
      report("--link", "unknown link preset '" + f.link + "'");
    }
  }
  if (cmd == Command::KeyRate) s.loss_db = parse_grid("0:40:1");
  if (f.loss) {
    try {
      s.loss_db = parse_grid(*f.loss);
    } catch (const std::invalid_argument& e) {
      report("--loss", e.what());
    }
  }
  if (f.flyover) s.flyover_s = *f.flyover;

  try {
    s.sizes = parse_counts(f.sizes);
  } catch (const std::invalid_argument& e) {
    report("--sizes", e.what());
  }
  if (f.reference) s.reference_samples = static_cast<std::uint64_t>(*f.reference);

  if (f.pulses) s.n_pulses = static_cast<std::uint64_t>(*f.pulses);
  if (f.efficiency) s.detector.efficiency = *f.efficiency;
  if (f.dark) s.detector.dark_click_prob = *f.dark;
  if (f.split) s.detector.split_ratio = *f.split;
  if (f.max_lag) s.max_lag = *f.max_lag;
  if (f.poisson_mean) s.poisson_mean = *f.poisson_mean;
  if (f.stream == "poisson") {
    s.hbt_stream = HbtStream::Poisson;
  } else if (f.stream != "source") {
    report("--stream", "must be 'source' or 'poisson'");
  }

  if (f.threshold) s.threshold = *f.threshold;
  if (f.k_sigma) s.k_sigma = *f.k_sigma;

  for (auto& d : check_scenario(s)) diags.push_back(std::move(d));
  return s;
}

int report_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
  err << "error: invalid configuration\n";
  for (const auto& d : diags) err << "  " << d.field << ": " << d.message << '\n';
  return kExitConfig;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-number-splitting attack monitoring and key-rate toolkit", "pnsguard"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Flags f;

  auto* sweep = app.add_subcommand("attack-sweep", "Photon statistics versus attack strength");
  add_source_options(sweep, f);
  add_sampling_options(sweep, f);
  sweep->add_option("--kind", f.kind, "Attack kind: none, soft, hard");
  sweep->add_option("--x", f.x, "Attack strengths, start:stop:step or a,b,c");
  sweep->add_option("--eta", f.eta, "Linear-loss transmission applied before estimation");

  auto* keyrate = app.add_subcommand("keyrate", "Key rates and waiting time versus channel loss");
  add_source_options(keyrate, f);
  add_channel_options(keyrate, f);
  keyrate->add_option("--loss", f.loss, "Channel loss grid in dB");

  auto* conv = app.add_subcommand("convergence", "g2 estimate convergence versus sample count");
  add_source_options(conv, f);
  add_sampling_options(conv, f);
  conv->add_option("--sizes", f.sizes, "Ascending sample sizes");
  conv->add_option("--reference", f.reference, "Reference sample size");

  auto* wait = app.add_subcommand("waiting-time", "Time to collect enough photons for g2");
  add_source_options(wait, f);
  add_channel_options(wait, f);
  wait->add_option("--link", f.link, "Link preset (micius)");
  wait->add_option("--loss", f.loss, "Channel loss grid in dB (default: link loss)");
  wait->add_option("--flyover", f.flyover, "Flyover duration [s]");

  auto* hbt = app.add_subcommand("hbt", "Simulated beam-splitter g2 measurement");
  add_source_options(hbt, f);
  add_sampling_options(hbt, f);
  hbt->add_option("--pulses", f.pulses, "Number of pulses");
  hbt->add_option("--efficiency", f.efficiency, "Detector efficiency");
  hbt->add_option("--dark", f.dark, "Dark click probability per pulse");
  hbt->add_option("--split", f.split, "Beam splitter ratio towards detector A");
  hbt->add_option("--max-lag", f.max_lag, "Side peaks on each side of zero delay");
  hbt->add_option("--stream", f.stream, "Pulse stream: source or poisson");
  hbt->add_option("--poisson-mean", f.poisson_mean, "Mean photon number of the Poisson stream");
  hbt->add_option("--kind", f.kind, "Attack applied to the source stream");
  hbt->add_option("--x", f.x, "Attack strength for the source stream");

  auto* det = app.add_subcommand("detect", "Attack alarms from monitored g2");
  add_source_options(det, f);
  add_sampling_options(det, f);
  det->add_option("--kind", f.kind, "Attack kind: none, soft, hard");
  det->add_option("--x", f.x, "Attack strengths to test");
  det->add_option("--eta", f.eta, "Linear-loss transmission applied before estimation");
  det->add_option("--threshold", f.threshold, "Relative deviation threshold");
  det->add_option("--k-sigma", f.k_sigma, "Required deviation in run standard deviations");

  auto* validate = app.add_subcommand("validate", "Check a scenario config file");
  validate->add_option("config", f.config, "Config file")->required();

  auto* run = app.add_subcommand("run", "Execute a scenario config file");
  run->add_option("config", f.config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      const auto diags = validate_config(f.config);
      if (diags.empty()) {
        out << "ok\n";
        return kExitOk;
      }
      return report_diagnostics(diags, err);
    }
    if (run->parsed()) return run_scenario(f.config, out, err);

    Command cmd = Command::AttackSweep;
    if (keyrate->parsed()) cmd = Command::KeyRate;
    if (conv->parsed()) cmd = Command::Convergence;
    if (wait->parsed()) cmd = Command::WaitingTime;
    if (hbt->parsed()) cmd = Command::Hbt;
    if (det->parsed()) cmd = Command::Detect;

    std::vector<Diagnostic> diags;
    const Scenario s = to_scenario(cmd, f, diags);
    if (!diags.empty()) return report_diagnostics(diags, err);
    execute(s, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_diagnostics(e.diagnostics(), err);
  } catch (const NumericalError& e) {
    err << "error: numerical failure in " << e.quantity() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace pnsguard::app
