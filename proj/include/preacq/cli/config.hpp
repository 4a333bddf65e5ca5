#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "preacq/geometry/primitives.hpp"
#include "preacq/materials/material.hpp"
#include "preacq/planner/planner.hpp"
#include "preacq/scene/scene.hpp"

namespace preacq::cli {

/// Where an item's geometry comes from.
struct ItemSource {
  enum class Kind { Primitive, Heightmap };
  Kind kind = Kind::Primitive;
  geometry::HeightPrimitive primitive;  // centre relative to the plate centre
  ItemId label = kBackground;           // heightmap mask label
};

struct ItemConfig {
  ItemId id = kBackground;
  std::string category;
  ItemSource source;
  nlohmann::json material;  // per-item overrides, may be null
};

/// Scene file contents. See scenes/README.md for the schema.
struct SceneConfig {
  scene::SceneLayout layout;
  double settle_time = 0.3;  // s, with the fork parked, before planning
  materials::MaterialRegistry materials = materials::MaterialRegistry::defaults();
  std::vector<ItemConfig> items;
  std::optional<std::filesystem::path> heightmap_depth;
  std::optional<std::filesystem::path> heightmap_mask;
  planner::PlannerConfig planner;
  nlohmann::json raw;  // the parsed document, for reports and hashing
};

/// Throws ConfigError naming the JSON field, or the line for syntax errors.
SceneConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
SceneConfig load_config(const std::filesystem::path& path);

struct ItemReport {
  ItemId id = kBackground;
  std::string category;
  double volume = 0.0;  // m^3, closed mesh
  std::size_t particles = 0;
  std::size_t footprint_pixels = 0;
};

struct BuildOutput {
  scene::Scene scene;
  geometry::DepthMap depth;  // plate heightmap the items were reconstructed from
  geometry::SegMask mask;
  std::vector<geometry::FoodMesh> meshes;
  std::vector<ItemReport> items;
};

/// Heightmap of the configured items (stamped primitives and/or loaded files).
void compose_heightmap(const SceneConfig& cfg, const render::CameraSpec& camera,
                       geometry::DepthMap& depth, geometry::SegMask& mask);

/// Reconstructs every item from the heightmap, samples particles and, when
/// `settle` is set, lets the plate come to rest.
BuildOutput build_scene(const SceneConfig& cfg, bool settle = true);

/// Material parameters for an item after registry and per-item overrides.
materials::MaterialParams item_material(const SceneConfig& cfg, const ItemConfig& item);

/// FNV-1a over the particle state and item table.
std::uint64_t scene_hash(const scene::Scene& scene);
std::string hex64(std::uint64_t v);

}  // namespace preacq::cli
