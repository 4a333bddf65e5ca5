#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "preacq/geometry/recon.hpp"
#include "preacq/materials/material.hpp"
#include "preacq/render/render.hpp"
#include "preacq/sim/world.hpp"
#include "preacq/tools/utensils.hpp"

namespace preacq::scene {

struct ItemInfo {
  ItemId id = kBackground;
  std::string category;
  std::uint32_t material = 0;  // index into world.materials
};

/// A plate of food ready to simulate: the particle world with the plate and
/// fork bound as tools, the camera looking down on it and per-item metadata.
struct Scene {
  sim::SimWorld world;
  tools::PlateDims plate;
  Vec3 plate_center = Vec3(0.25, 0.05, 0.25);  // centre of the plate's top face
  tools::ForkDims fork;
  tools::Pose fork_park;  // where the fork waits between actions
  render::CameraSpec camera;
  std::vector<ItemInfo> items;
  std::size_t plate_tool = 0;
  std::size_t fork_tool = 1;
  std::uint64_t seed = 0;

  const ItemInfo& item(ItemId id) const;
  bool has_item(ItemId id) const;
  std::vector<ItemId> item_ids() const;
  /// Smallest unused id above every existing one.
  ItemId next_item_id() const;
  const materials::MaterialParams& material_of(ItemId id) const;
  /// Material index for `params.category`, appending it to the world if new.
  std::uint32_t material_index(const materials::MaterialParams& params);

  /// Adds particles sampled in the plate frame (plate plane y = 0) as item
  /// `set.item_id`.
  void add_item(const geometry::ParticleSet& set, const materials::MaterialParams& params);

  /// Gives particles of `from` whose flag is set the new id `to`, cloning the
  /// item metadata.
  void relabel(ItemId from, ItemId to, const std::vector<std::uint8_t>& selected);

  /// Drops items with no particles left.
  void prune_items();

  /// Height of world y above the plate face.
  double height_above_plate(double y) const { return y - plate_center.y(); }
};

struct SceneLayout {
  sim::SimConfig sim;
  tools::PlateDims plate;
  Vec3 plate_center = Vec3(0.25, 0.05, 0.25);
  tools::ForkDims fork;
  int camera_pixels = 128;
  std::uint64_t seed = 0;
};

/// Empty plate with the plate and a parked fork bound as tools.
Scene make_empty_scene(const SceneLayout& layout);

/// Pose that keeps the fork clear of the plate and food.
tools::Pose fork_park_pose(const Scene& scene);

}  // namespace preacq::scene
