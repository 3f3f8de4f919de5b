#include "pnsguard/app/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace pnsguard::app {

using nlohmann::json;

namespace {

std::string describe(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("'" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// Collects diagnostics while walking a JSON document.
class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void report(std::string field, std::string message) {
    diags_.push_back({std::move(field), std::move(message)});
  }

  void reject_unknown(const json& obj, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) report(path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  const json* section(const json& parent, const char* key) {
    if (!parent.contains(key)) return nullptr;
    const json& s = parent.at(key);
    if (!s.is_object()) {
      report(key, "must be an object");
      return nullptr;
    }
    return &s;
  }

  template <typename T>
  bool number(const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      report(path + "." + key, "must be a number");
      return false;
    }
    if constexpr (std::is_integral_v<T>) {
      const double d = v.get<double>();
      if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
        report(path + "." + key, "must be a non-negative integer");
        return false;
      }
      out = static_cast<T>(d);
    } else {
      out = v.get<T>();
    }
    return true;
  }

  bool string(const json& obj, const char* key, const std::string& path, std::string& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      report(path + "." + key, "must be a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  bool grid(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    try {
      if (v.is_number()) {
        out = {v.get<double>()};
      } else if (v.is_string()) {
        out = parse_grid(v.get<std::string>());
      } else if (v.is_array()) {
        out.clear();
        for (const auto& e : v) {
          if (!e.is_number()) throw std::invalid_argument("array entries must be numbers");
          out.push_back(e.get<double>());
        }
      } else {
        throw std::invalid_argument("must be a number, an array or a range string");
      }
    } catch (const std::invalid_argument& e) {
      report(path + "." + key, e.what());
      return false;
    }
    return true;
  }

 private:
  std::vector<Diagnostic>& diags_;
};

void apply_command_defaults(Scenario& s, bool has_x, bool has_loss) {
  if (!has_x) {
    if (s.command == Command::AttackSweep) s.attack_x = parse_grid("0:1:0.1");
    if (s.command == Command::Detect) s.attack_x = {0.0, 0.25, 0.5};
  }
  if (!has_loss) {
    if (s.command == Command::KeyRate) s.loss_db = parse_grid("0:40:1");
  }
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::AttackSweep:
      return "attack-sweep";
    case Command::KeyRate:
      return "keyrate";
    case Command::Convergence:
      return "convergence";
    case Command::WaitingTime:
      return "waiting-time";
    case Command::Hbt:
      return "hbt";
    case Command::Detect:
      return "detect";
  }
  return "attack-sweep";
}

std::optional<Command> parse_command(std::string_view text) {
  for (auto c : {Command::AttackSweep, Command::KeyRate, Command::Convergence,
                 Command::WaitingTime, Command::Hbt, Command::Detect}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) msg += "\n  " + d.field + ": " + d.message;
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<double> parse_grid(std::string_view text) {
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
    if (stop < start) throw std::invalid_argument("range stop is below start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> values;
    values.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      // Snap away binary representation noise such as 0.30000000000000004.
      values.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return values;
  }
  std::vector<double> values;
  for (auto part : split(text, ',')) values.push_back(parse_double(part));
  return values;
}

std::vector<std::uint64_t> parse_counts(std::string_view text) {
  std::vector<std::uint64_t> counts;
  for (auto part : split(text, ',')) {
    const double v = parse_double(part);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
      throw std::invalid_argument("'" + std::string(part) + "' is not a non-negative integer");
    }
    counts.push_back(static_cast<std::uint64_t>(v));
  }
  return counts;
}

std::vector<Diagnostic> check_scenario(const Scenario& s) {
  std::vector<Diagnostic> d;
  auto add = [&](std::string field, std::string msg) { d.push_back({std::move(field), std::move(msg)}); };

  if (!is_probability(s.source.quantum_efficiency)) {
    add("source.quantum_efficiency", "SourceParams.quantum_efficiency = " +
                                         describe(s.source.quantum_efficiency) +
                                         " is outside [0, 1]");
  }
  if (!(s.source.g2 >= 0.0)) add("source.g2", "SourceParams.g2 must be >= 0");
  if (!(s.source.g3 >= 0.0)) add("source.g3", "SourceParams.g3 must be >= 0");
  if (!(s.source.repetition_rate > 0.0)) {
    add("source.repetition_rate", "SourceParams.repetition_rate must be > 0");
  }

  if (s.attack_x.empty()) add("attack.x", "AttackSpec.x grid is empty");
  for (double x : s.attack_x) {
    if (!is_probability(x)) add("attack.x", "AttackSpec.x = " + describe(x) + " is outside [0, 1]");
  }
  if (!is_probability(s.eta)) add("sampling.eta", "loss transmission must lie in [0, 1]");

  if (s.plan.n_samples < 1) add("sampling.n_samples", "SamplingPlan.n_samples must be >= 1");
  if (s.plan.n_runs < 1) add("sampling.n_runs", "SamplingPlan.n_runs must be >= 1");
  if (s.sizes.empty()) add("sampling.sizes", "sample size list is empty");
  for (std::size_t i = 0; i < s.sizes.size(); ++i) {
    if (s.sizes[i] < 1) add("sampling.sizes", "sample sizes must be >= 1");
    if (i > 0 && s.sizes[i] <= s.sizes[i - 1]) add("sampling.sizes", "sample sizes must ascend");
  }
  if (s.reference_samples < 1) add("sampling.reference_samples", "must be >= 1");

  if (s.loss_db.empty()) add("channel.loss_db", "ChannelParams.loss_db grid is empty");
  for (double l : s.loss_db) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      add("channel.loss_db", "ChannelParams.loss_db = " + describe(l) + " must be >= 0");
    }
  }
  if (!is_probability(s.channel.eta_det)) add("channel.eta_det", "ChannelParams.eta_det must lie in [0, 1]");
  if (!is_probability(s.channel.dark_yield)) {
    add("channel.dark_yield", "ChannelParams.dark_yield must lie in [0, 1]");
  }
  if (!is_probability(s.channel.intrinsic_error)) {
    add("channel.intrinsic_error", "ChannelParams.intrinsic_error must lie in [0, 1]");
  }
  if (!is_probability(s.channel.baseline_error)) {
    add("channel.baseline_error", "ChannelParams.baseline_error must lie in [0, 1]");
  }
  if (!(s.channel.ec_efficiency >= 1.0)) {
    add("channel.ec_efficiency", "ChannelParams.ec_efficiency must be >= 1");
  }

  if (!(s.link.repetition_rate > 0.0)) add("link.repetition_rate", "LinkBudget.repetition_rate must be > 0");
  if (!(s.link.n_required > 0.0)) add("link.n_required", "LinkBudget.n_required must be > 0");
  if (!(s.flyover_s > 0.0)) add("link.flyover_s", "flyover duration must be > 0");

  if (!is_probability(s.detector.efficiency)) {
    add("detector.efficiency", "DetectorParams.efficiency must lie in [0, 1]");
  }
  if (!is_probability(s.detector.dark_click_prob)) {
    add("detector.dark_click_prob", "DetectorParams.dark_click_prob must lie in [0, 1]");
  }
  if (!is_probability(s.detector.split_ratio)) {
    add("detector.split_ratio", "DetectorParams.split_ratio must lie in [0, 1]");
  }
  if (s.max_lag < 1) add("detector.max_lag", "max_lag must be >= 1");
  if (s.n_pulses < 2 * static_cast<std::uint64_t>(s.max_lag) + 1) {
    add("detector.n_pulses", "n_pulses must be at least 2 max_lag + 1");
  }
  if (!(s.poisson_mean > 0.0 && s.poisson_mean <= 50.0)) {
    add("detector.poisson_mean", "poisson_mean must lie in (0, 50]");
  }

  if (!(s.threshold >= 0.0)) add("detection.threshold", "threshold must be >= 0");
  if (!(s.k_sigma >= 0.0)) add("detection.k_sigma", "k_sigma must be >= 0");
  return d;
}

std::vector<Diagnostic> scenario_from_json(std::string_view text, PresetTable presets,
                                           Scenario& s) {
  std::vector<Diagnostic> diags;
  Reader rd(diags);

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    rd.report("", std::string("not valid JSON: ") + e.what());
    return diags;
  }
  if (!doc.is_object()) {
    rd.report("", "top level must be an object");
    return diags;
  }
  rd.reject_unknown(doc, "", {"command", "source", "attack", "channel", "sampling", "detector",
                              "link", "detection", "output", "presets_file", "threads"});

  std::string presets_file;
  if (rd.string(doc, "presets_file", "", presets_file)) {
    try {
      presets.load_file(presets_file);
    } catch (const std::exception& e) {
      rd.report("presets_file", e.what());
    }
  }

  std::string command;
  if (!doc.contains("command")) {
    rd.report("command", "missing required key 'command'");
  } else if (rd.string(doc, "command", "", command)) {
    if (auto c = parse_command(command)) {
      s.command = *c;
    } else {
      rd.report("command", "unknown command '" + command + "'");
    }
  }

  if (!doc.contains("source")) {
    rd.report("source", "missing required section 'source'");
  } else if (const json* src = rd.section(doc, "source")) {
    rd.reject_unknown(*src, "source",
                      {"preset", "quantum_efficiency", "g2", "g3", "repetition_rate"});
    std::string preset;
    if (rd.string(*src, "preset", "source", preset)) {
      if (presets.has_source(preset)) {
        s.source = presets.source(preset).params;
        s.source_name = presets.source(preset).name;
      } else {
        rd.report("source.preset", "unknown source preset '" + preset + "'");
      }
    } else {
      const bool complete = src->contains("quantum_efficiency") && src->contains("g2") &&
                            src->contains("g3");
      if (!complete) {
        rd.report("source", "must name a preset or give quantum_efficiency, g2 and g3");
      }
      s.source_name = "inline";
    }
    rd.number(*src, "quantum_efficiency", "source", s.source.quantum_efficiency);
    rd.number(*src, "g2", "source", s.source.g2);
    rd.number(*src, "g3", "source", s.source.g3);
    rd.number(*src, "repetition_rate", "source", s.source.repetition_rate);
  }

  bool has_x = false;
  if (const json* a = rd.section(doc, "attack")) {
    rd.reject_unknown(*a, "attack", {"kind", "x"});
    std::string kind;
    if (rd.string(*a, "kind", "attack", kind)) {
      try {
        s.attack_kind = parse_attack_kind(kind);
      } catch (const std::invalid_argument& e) {
        rd.report("attack.kind", e.what());
      }
    }
    has_x = rd.grid(*a, "x", "attack", s.attack_x);
  }

  bool has_loss = false;
  if (const json* c = rd.section(doc, "channel")) {
    rd.reject_unknown(*c, "channel", {"loss_db", "eta_det", "dark_yield", "intrinsic_error",
                                      "baseline_error", "ec_efficiency", "exact_yield"});
    has_loss = rd.grid(*c, "loss_db", "channel", s.loss_db);
    rd.number(*c, "eta_det", "channel", s.channel.eta_det);
    rd.number(*c, "dark_yield", "channel", s.channel.dark_yield);
    rd.number(*c, "intrinsic_error", "channel", s.channel.intrinsic_error);
    rd.number(*c, "baseline_error", "channel", s.channel.baseline_error);
    rd.number(*c, "ec_efficiency", "channel", s.channel.ec_efficiency);
    if (c->contains("exact_yield")) {
      if (c->at("exact_yield").is_boolean()) {
        s.channel.yield_model =
            c->at("exact_yield").get<bool>() ? YieldModel::Exact : YieldModel::Approximate;
      } else {
        rd.report("channel.exact_yield", "must be a boolean");
      }
    }
  }
  s.link.eta_det = s.channel.eta_det;

  if (const json* p = rd.section(doc, "sampling")) {
    rd.reject_unknown(*p, "sampling",
                      {"n_samples", "n_runs", "master_seed", "eta", "sizes", "reference_samples"});
    rd.number(*p, "n_samples", "sampling", s.plan.n_samples);
    rd.number(*p, "n_runs", "sampling", s.plan.n_runs);
    rd.number(*p, "master_seed", "sampling", s.plan.master_seed);
    rd.number(*p, "eta", "sampling", s.eta);
    rd.number(*p, "reference_samples", "sampling", s.reference_samples);
    if (p->contains("sizes")) {
      std::vector<double> sizes;
      if (rd.grid(*p, "sizes", "sampling", sizes)) {
        s.sizes.clear();
        for (double v : sizes) {
          if (v < 1.0 || v != std::floor(v)) {
            rd.report("sampling.sizes", "sample sizes must be positive integers");
            break;
          }
          s.sizes.push_back(static_cast<std::uint64_t>(v));
        }
      }
    }
  }

  if (const json* dt = rd.section(doc, "detector")) {
    rd.reject_unknown(*dt, "detector", {"efficiency", "dark_click_prob", "split_ratio", "n_pulses",
                                        "max_lag", "stream", "poisson_mean"});
    rd.number(*dt, "efficiency", "detector", s.detector.efficiency);
    rd.number(*dt, "dark_click_prob", "detector", s.detector.dark_click_prob);
    rd.number(*dt, "split_ratio", "detector", s.detector.split_ratio);
    rd.number(*dt, "n_pulses", "detector", s.n_pulses);
    rd.number(*dt, "max_lag", "detector", s.max_lag);
    rd.number(*dt, "poisson_mean", "detector", s.poisson_mean);
    std::string stream;
    if (rd.string(*dt, "stream", "detector", stream)) {
      if (stream == "source") {
        s.hbt_stream = HbtStream::Source;
      } else if (stream == "poisson") {
        s.hbt_stream = HbtStream::Poisson;
      } else {
        rd.report("detector.stream", "must be 'source' or 'poisson'");
      }
    }
  }

  const LinkPreset* link_preset = presets.has_link(s.link_name) ? &presets.link(s.link_name) : nullptr;
  if (const json* l = rd.section(doc, "link")) {
    rd.reject_unknown(*l, "link", {"preset", "flyover_s", "repetition_rate", "n_required"});
    std::string name;
    if (rd.string(*l, "preset", "link", name)) {
      if (presets.has_link(name)) {
        link_preset = &presets.link(name);
        s.link_name = link_preset->name;
      } else {
        rd.report("link.preset", "unknown link preset '" + name + "'");
      }
    }
    if (link_preset) s.flyover_s = link_preset->flyover_s;
    rd.number(*l, "flyover_s", "link", s.flyover_s);
    rd.number(*l, "repetition_rate", "link", s.link.repetition_rate);
    rd.number(*l, "n_required", "link", s.link.n_required);
  }
  if (!has_loss && s.command == Command::WaitingTime && link_preset) {
    s.loss_db = {link_preset->loss_db};
    has_loss = true;
  }

  if (const json* dc = rd.section(doc, "detection")) {
    rd.reject_unknown(*dc, "detection", {"threshold", "k_sigma"});
    rd.number(*dc, "threshold", "detection", s.threshold);
    rd.number(*dc, "k_sigma", "detection", s.k_sigma);
  }

  if (const json* o = rd.section(doc, "output")) {
    rd.reject_unknown(*o, "output", {"path"});
    rd.string(*o, "path", "output", s.output_path);
  }
  rd.number(doc, "threads", "", s.threads);

  apply_command_defaults(s, has_x, has_loss);
  for (auto& d : check_scenario(s)) diags.push_back(std::move(d));
  return diags;
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario scratch;
  return scenario_from_json(buf.str(), PresetTable::builtin(), scratch);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario s;
  auto diags = scenario_from_json(buf.str(), PresetTable::builtin(), s);
  if (!diags.empty()) throw ConfigError(std::move(diags));
  return s;
}

}  // namespace pnsguard::app
