#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cosite/channel.hpp"
#include "cosite/config.hpp"

namespace cosite {

inline constexpr const char* kArtifactVersion = "cosite 0.1.0";

// A fully resolved simulation setup: system parameters, deployment, and the
// fading tables for both the co-site protocol and the user-side benchmark.
struct Scenario {
  SystemConfig cfg;
  Geometry geometry;
  ChannelTable table;
  ChannelTable userside;
  bool geometry_explicit = false;

  // Canonical resolved document; drives the config hash and key overrides.
  std::string resolved;
};

// Built-in defaults (reference deployment, co-site fading rows).
Scenario default_scenario();

// Parses and validates a scenario document. Unknown keys anywhere are
// errors. Accepts named table presets ("co-site", "user-side") or explicit
// per-link rows; "geometry" may be omitted for the reference deployment.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

// Applies `config` key overrides (values given as JSON literals) and
// revalidates. A defaulted geometry is rebuilt against the new parameters.
Scenario scenario_with_overrides(
    const Scenario& base,
    const std::vector<std::pair<std::string, std::string>>& overrides);

// FNV-1a hash of the canonical resolved document, as fixed-width hex.
std::string config_hash(const Scenario& sc);

}  // namespace cosite
