#include "pnsguard/app/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pnsguard/app/csv.hpp"
#include "pnsguard/errors.hpp"

namespace pnsguard::app {

namespace {

using Row = std::vector<std::string>;

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += num(values[i]);
  }
  return out;
}

void write_metadata(CsvWriter& csv, const Scenario& s, const PhotonDistribution& d) {
  csv.comment("pnsguard " + std::string(kVersion));
  csv.comment("generated: " + utc_timestamp());
  csv.comment("command: " + std::string(to_string(s.command)));
  csv.comment("source: " + s.source_name +
              " quantum_efficiency=" + num(s.source.quantum_efficiency) +
              " g2=" + num(s.source.g2) + " g3=" + num(s.source.g3) +
              " repetition_rate=" + num(s.source.repetition_rate));
  csv.comment("distribution: P0=" + num(d[0]) + " P1=" + num(d[1]) + " P2=" + num(d[2]) +
              " P3=" + num(d[3]) + " mu=" + num(d.mean()));
}

void write_sampling_metadata(CsvWriter& csv, const Scenario& s) {
  csv.comment("generator: " + std::string(kGeneratorName));
  csv.comment("master_seed: " + num(s.plan.master_seed));
  csv.comment("sampling: n_samples=" + num(s.plan.n_samples) + " n_runs=" + num(s.plan.n_runs) +
              " eta=" + num(s.eta));
}

void write_channel_metadata(CsvWriter& csv, const Scenario& s) {
  const auto& c = s.channel;
  csv.comment("channel: eta_det=" + num(c.eta_det) + " dark_yield=" + num(c.dark_yield) +
              " intrinsic_error=" + num(c.intrinsic_error) +
              " baseline_error=" + num(c.baseline_error) +
              " ec_efficiency=" + num(c.ec_efficiency) + " yield_model=" +
              (c.yield_model == YieldModel::Exact ? "exact" : "approximate"));
  csv.comment("link: repetition_rate=" + num(s.link.repetition_rate) +
              " n_required=" + num(s.link.n_required));
}

void attack_sweep(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  write_sampling_metadata(csv, s);
  csv.comment("attack: kind=" + std::string(to_string(s.attack_kind)) + " x=" + join(s.attack_x));
  csv.header({"x",       "P0",      "P1",      "P2",      "P3",      "mu",      "g2",
              "g3",      "std_P0",  "std_P1",  "std_P2",  "std_P3",  "std_mu",  "std_g2",
              "std_g3",  "exact_P0", "exact_P1", "exact_P2", "exact_P3", "exact_mu",
              "exact_g2", "delta_g2", "delta_mu", "excluded_runs", "status"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double x : s.attack_x) {
    const AttackSpec attack{s.attack_kind, x};
    const auto runs = repeated_runs(d, attack, s.eta, s.plan, s.threads);
    const auto exact = attenuate(apply_attack(d, attack), s.eta);

    double exact_g2 = nan;
    try {
      exact_g2 = g2_exact(exact);
    } catch (const DegenerateMean&) {
    }
    std::string status = "ok";
    double delta_g2 = nan;
    const double delta_mu = std::abs(apply_attack(d, attack).mean() - d.mean());
    try {
      delta_g2 = attack_signature(d, attack).delta_g2;
    } catch (const DegenerateMean&) {
      status = "divergent";
    }

    Row row{num(x)};
    for (const auto& p : runs.p) row.push_back(num(p.mean));
    row.insert(row.end(), {num(runs.mu.mean), num(runs.g2.mean), num(runs.g3.mean)});
    for (const auto& p : runs.p) row.push_back(num(p.stddev));
    row.insert(row.end(), {num(runs.mu.stddev), num(runs.g2.stddev), num(runs.g3.stddev)});
    for (std::size_t n = 0; n < kNumBins; ++n) row.push_back(num(exact[n]));
    row.insert(row.end(), {num(exact.mean()), num(exact_g2), num(delta_g2), num(delta_mu),
                           num(runs.g2.n_excluded()), status});
    csv.row(row);
  }
}

void key_rate(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  write_channel_metadata(csv, s);
  csv.header({"loss_db", "transmission", "Q_mu", "E_mu", "omega", "R_proposed", "R_gllp",
              "T_wait"});
  for (double loss : s.loss_db) {
    ChannelParams ch = s.channel;
    ch.loss_db = loss;
    const auto b = evaluate_rates(d, ch);
    LinkBudget lb = s.link;
    lb.mu = d.mean();
    lb.loss_db = loss;
    lb.eta_det = s.channel.eta_det;
    csv.row({num(loss), num(ch.transmission()), num(b.q_mu), num(b.e_mu), num(b.omega),
             num(b.r_proposed), num(b.r_gllp), num(waiting_time(lb))});
  }
}

void convergence(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  write_sampling_metadata(csv, s);
  const auto table =
      convergence_scan(d, s.sizes, s.plan.n_runs, s.plan.master_seed, s.reference_samples,
                       s.threads);
  csv.comment("reference: n_samples=" + num(table.reference_samples) +
              " g2=" + num(table.reference_g2));
  csv.header({"n_samples", "g2_mean", "g2_std", "relative_deviation", "reference_g2",
              "excluded_runs"});
  for (const auto& row : table.rows) {
    csv.row({num(row.n_samples), num(row.g2.mean), num(row.g2.stddev),
             num(row.relative_deviation), num(table.reference_g2), num(row.g2.n_excluded())});
  }
}

void waiting(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  write_channel_metadata(csv, s);
  csv.comment("flyover: link=" + s.link_name + " flyover_s=" + num(s.flyover_s));
  csv.header({"loss_db", "mu", "T_wait", "flyover_s", "feasible", "margin_s"});
  for (double loss : s.loss_db) {
    LinkBudget lb = s.link;
    lb.mu = d.mean();
    lb.loss_db = loss;
    lb.eta_det = s.channel.eta_det;
    const auto f = satellite_feasible(lb, s.flyover_s);
    csv.row({num(loss), num(lb.mu), num(f.waiting_time_s), num(s.flyover_s),
             f.feasible ? "1" : "0", num(f.margin_s)});
  }
}

void hbt(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  const double x = s.attack_x.empty() ? 0.0 : s.attack_x.front();
  const auto emitted = apply_attack(d, {s.attack_kind, x});
  const PulseSource source = s.hbt_stream == HbtStream::Poisson
                                 ? PulseSource::poisson(s.poisson_mean)
                                 : PulseSource::truncated(emitted);
  const auto stream = simulate_hbt(source, s.n_pulses, s.detector, s.plan.master_seed, s.threads);
  const auto h = coincidence_histogram(stream, s.max_lag, s.threads);
  const double g2 = g2_from_histogram(h);

  csv.comment("generator: " + std::string(kGeneratorName));
  csv.comment("master_seed: " + num(s.plan.master_seed));
  csv.comment("stream: " + std::string(s.hbt_stream == HbtStream::Poisson ? "poisson" : "source") +
              (s.hbt_stream == HbtStream::Poisson ? " mean=" + num(s.poisson_mean)
                                                  : " attack=" + std::string(to_string(s.attack_kind)) +
                                                        " x=" + num(x)));
  csv.comment("detector: efficiency=" + num(s.detector.efficiency) +
              " dark_click_prob=" + num(s.detector.dark_click_prob) +
              " split_ratio=" + num(s.detector.split_ratio) + " n_pulses=" + num(s.n_pulses) +
              " max_lag=" + num(static_cast<std::uint64_t>(s.max_lag)));
  csv.comment("g2_estimate: " + num(g2));
  csv.comment("g2_exact: " + num(source.g2()));
  csv.header({"lag", "coincidences", "pairs", "rate", "normalized"});
  const double side = h.side_peak_mean();
  const auto l = static_cast<std::int64_t>(s.max_lag);
  for (std::int64_t k = -l; k <= l; ++k) {
    const auto pairs = s.n_pulses - static_cast<std::uint64_t>(std::llabs(k));
    csv.row({std::to_string(k), num(h.count(k)), num(pairs), num(h.rate(k)),
             num(h.rate(k) / side)});
  }
}

void detect(const Scenario& s, const PhotonDistribution& d, CsvWriter& csv) {
  write_sampling_metadata(csv, s);
  const double reference = g2_exact(d);
  csv.comment("detection: threshold=" + num(s.threshold) + " k_sigma=" + num(s.k_sigma));
  csv.header({"kind", "x", "reference_g2", "measured_g2", "std_g2", "relative_deviation",
              "threshold", "k_sigma", "alarm", "excluded_runs"});
  for (double x : s.attack_x) {
    const AttackSpec attack{s.attack_kind, x};
    const auto runs = repeated_runs(d, attack, s.eta, s.plan, s.threads);
    const auto v = detect_attack(reference, runs.g2, s.threshold, s.k_sigma);
    csv.row({std::string(to_string(s.attack_kind)), num(x), num(v.reference_g2),
             num(v.measured_g2), num(v.measured_std), num(v.relative_deviation),
             num(v.threshold), num(v.k_sigma), v.alarm ? "1" : "0",
             num(runs.g2.n_excluded())});
  }
}

}  // namespace

void execute(const Scenario& s, std::ostream& out) {
  if (auto diags = check_scenario(s); !diags.empty()) throw ConfigError(std::move(diags));
  const PhotonDistribution d = build_distribution(s.source);

  std::ostringstream buf;
  CsvWriter csv(buf);
  write_metadata(csv, s, d);
  switch (s.command) {
    case Command::AttackSweep:
      attack_sweep(s, d, csv);
      break;
    case Command::KeyRate:
      key_rate(s, d, csv);
      break;
    case Command::Convergence:
      convergence(s, d, csv);
      break;
    case Command::WaitingTime:
      waiting(s, d, csv);
      break;
    case Command::Hbt:
      hbt(s, d, csv);
      break;
    case Command::Detect:
      detect(s, d, csv);
      break;
  }

  if (s.output_path.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream file(s.output_path);
  if (!file) throw std::runtime_error("cannot write output file " + s.output_path);
  file << buf.str();
}

int run_scenario(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = load_scenario(config);
    execute(s, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "error: numerical failure in " << e.quantity() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace pnsguard::app
