#include "pnsguard/app/presets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pnsguard::app {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

PresetTable PresetTable::builtin() {
  PresetTable t;
  t.add(SourcePreset{
      "our-hbn",
      {.quantum_efficiency = 0.0363, .g2 = 0.559, .g3 = 0.185, .repetition_rate = 25e6},
      "hBN defect, measured g2/g3 under 25 MHz pulsed excitation"});
  t.add(SourcePreset{
      "hbn-high",
      {.quantum_efficiency = 0.80, .g2 = 0.230, .g3 = 0.050, .repetition_rate = 100e6},
      "high-efficiency hBN; g3 derived from printed P3 via g3 = 6 P3 / mu^3"});
  t.add(SourcePreset{
      "qd",
      {.quantum_efficiency = 0.75, .g2 = 0.126, .g3 = 0.0167, .repetition_rate = 100e6},
      "quantum dot; g3 derived so the printed P0..P3 and mu = 0.845 are reproduced"});
  t.add(LinkPreset{"micius", 38.0, 273.0, 645.0, "Micius satellite-ground downlink"});
  return t;
}

void PresetTable::add(SourcePreset preset) {
  preset.params.validate();
  preset.name = lower(preset.name);
  const std::string key = preset.name;
  sources_.insert_or_assign(key, std::move(preset));
}

void PresetTable::add(LinkPreset preset) {
  if (!(preset.loss_db >= 0.0)) throw std::invalid_argument("link preset loss_db must be >= 0");
  if (!(preset.flyover_s > 0.0)) throw std::invalid_argument("link preset flyover_s must be > 0");
  preset.name = lower(preset.name);
  const std::string key = preset.name;
  links_.insert_or_assign(key, std::move(preset));
}

void PresetTable::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read preset file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("preset file " + path.string() + ": " + e.what());
  }
  try {
    if (doc.contains("sources")) {
      for (const auto& [name, s] : doc.at("sources").items()) {
        add(SourcePreset{name,
                         {.quantum_efficiency = s.at("quantum_efficiency").get<double>(),
                          .g2 = s.at("g2").get<double>(),
                          .g3 = s.at("g3").get<double>(),
                          .repetition_rate = s.value("repetition_rate", 100e6)},
                         s.value("note", std::string{})});
      }
    }
    if (doc.contains("links")) {
      for (const auto& [name, l] : doc.at("links").items()) {
        add(LinkPreset{name, l.at("loss_db").get<double>(), l.at("flyover_s").get<double>(),
                       l.value("distance_km", 0.0), l.value("note", std::string{})});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("preset file " + path.string() + ": " + e.what());
  }
}

bool PresetTable::has_source(std::string_view name) const {
  return sources_.contains(lower(name));
}

bool PresetTable::has_link(std::string_view name) const { return links_.contains(lower(name)); }

const SourcePreset& PresetTable::source(std::string_view name) const {
  const auto it = sources_.find(lower(name));
  if (it == sources_.end()) throw std::out_of_range("unknown source preset '" + std::string(name) + "'");
  return it->second;
}

const LinkPreset& PresetTable::link(std::string_view name) const {
  const auto it = links_.find(lower(name));
  if (it == links_.end()) throw std::out_of_range("unknown link preset '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> PresetTable::source_names() const {
  std::vector<std::string> names;
  for (const auto& [k, v] : sources_) names.push_back(k);
  return names;
}

std::vector<std::string> PresetTable::link_names() const {
  std::vector<std::string> names;
  for (const auto& [k, v] : links_) names.push_back(k);
  return names;
}

std::filesystem::path default_preset_file() {
  return std::filesystem::path(PNSGUARD_PRESETS_DIR) / "presets.json";
}

}  // namespace pnsguard::app
