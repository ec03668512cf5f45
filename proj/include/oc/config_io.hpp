#pragma once

#include "oc/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace oc {

// Sectioned key/value configuration text:
//
//   [geometry]
//   kind = interval1d            # or radial3d
//   [potential]
//   type = square                # square | gaussian | table
//   amplitude = 1.0
//   support_radius = 0.5
//   [grid]
//   h = 0.05
//   [sweep]
//   fermi_energies = 2.0
//   L = 50, 100, 200, 400, 800, 1600
//   [tolerances]
//   ...
//
// Unknown keys are rejected. Throws ValidationError on malformed text.
PhysicsConfig parse_config_text(std::string_view text);
PhysicsConfig parse_config_file(const std::filesystem::path& path);

// Canonical text form with every resolved value (defaults included); parsing
// it back reproduces the same config.
std::string config_echo(const PhysicsConfig& cfg);

} // namespace oc
