#pragma once

// Scenario documents: a YAML subset described in docs/scenario-format.md.
// Parsing is strict; unknown keys are errors.

#include <filesystem>
#include <string>
#include <string_view>

#include "cislunar/scenario.hpp"

namespace cislunar {

/// Throws ConfigError carrying the offending key and, when known, its line.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical document for `s`; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& s);

}  // namespace cislunar
