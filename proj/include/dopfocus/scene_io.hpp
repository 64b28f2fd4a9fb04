#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "dopfocus/scene.hpp"

namespace dopfocus {

struct SceneGenerator {
  int count = 1;
  std::uint64_t seed = 0;
  double amp_db_spread = 0.0;
  SceneSpacing spacing;
};

struct ClutterSpec {
  int scatterers = 1;
  double scr_db = 0.0;
  double ref_power = 1.0;
  std::uint64_t seed = 0;
};

/// Radar parameters plus an explicit target list and/or a seeded generator,
/// and an optional clutter description.
struct Scenario {
  RadarParams params;
  std::vector<Target> targets;
  std::optional<SceneGenerator> generator;
  std::optional<ClutterSpec> clutter;

  /// Explicit targets followed by the generated ones.
  std::vector<Target> all_targets() const;
  std::optional<ClutterField> clutter_field() const;
};

nlohmann::json to_json(const RadarParams& p);
RadarParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<Target>& targets);
std::vector<Target> targets_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

/// Writes JSON with round-trip exact doubles.
void write_scenario(const std::filesystem::path& path, const Scenario& s);
Scenario read_scenario(const std::filesystem::path& path);

}  // namespace dopfocus
