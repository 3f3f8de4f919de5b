#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pnsguard/photon_stats.hpp"

namespace pnsguard::app {

struct SourcePreset {
  std::string name;
  SourceParams params;
  std::string note;
};

struct LinkPreset {
  std::string name;
  double loss_db = 0.0;
  double flyover_s = 0.0;
  double distance_km = 0.0;
  std::string note;
};

/// Named sources and satellite links. Names are matched case-insensitively.
class PresetTable {
 public:
  /// our-hbn, hbn-high, qd and the micius link.
  static PresetTable builtin();

  /// Adds or replaces entries from a JSON preset file with top-level
  /// "sources" and "links" objects. Throws std::runtime_error when the file
  /// cannot be read and std::invalid_argument for invalid entries.
  void load_file(const std::filesystem::path& path);

  void add(SourcePreset preset);
  void add(LinkPreset preset);

  bool has_source(std::string_view name) const;
  bool has_link(std::string_view name) const;
  /// Throw std::out_of_range for unknown names.
  const SourcePreset& source(std::string_view name) const;
  const LinkPreset& link(std::string_view name) const;

  std::vector<std::string> source_names() const;
  std::vector<std::string> link_names() const;

 private:
  std::map<std::string, SourcePreset> sources_;
  std::map<std::string, LinkPreset> links_;
};

/// Preset file shipped with the sources.
std::filesystem::path default_preset_file();

}  // namespace pnsguard::app
