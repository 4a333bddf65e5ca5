#include "preacq/scene/scene.hpp"

#include <algorithm>
#include <memory>
#include <set>

namespace preacq::scene {

const ItemInfo& Scene::item(ItemId id) const {
  for (const auto& it : items) {
    if (it.id == id) return it;
  }
  throw InvalidArgument("unknown item id " + std::to_string(id));
}

bool Scene::has_item(ItemId id) const {
  return std::any_of(items.begin(), items.end(), [&](const ItemInfo& it) { return it.id == id; });
}

std::vector<ItemId> Scene::item_ids() const {
  std::vector<ItemId> ids;
  for (const auto& it : items) ids.push_back(it.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ItemId Scene::next_item_id() const {
  ItemId top = kBackground;
  for (const auto& it : items) top = std::max(top, it.id);
  for (const auto& p : world.particles) top = std::max(top, p.item);
  if (top >= kMaxItemId) throw InvalidArgument("item ids exhausted");
  return top + 1;
}

const materials::MaterialParams& Scene::material_of(ItemId id) const {
  return world.materials.at(item(id).material);
}

std::uint32_t Scene::material_index(const materials::MaterialParams& params) {
  for (std::size_t i = 0; i < world.materials.size(); ++i) {
    if (world.materials[i].category == params.category) {
      if (world.materials[i].model != params.model ||
          world.materials[i].young_modulus != params.young_modulus ||
          world.materials[i].mass_density != params.mass_density) {
        throw InvalidArgument("conflicting material parameters for category '" +
                              params.category + "'");
      }
      return static_cast<std::uint32_t>(i);
    }
  }
  params.validate();
  world.materials.push_back(params);
  return static_cast<std::uint32_t>(world.materials.size() - 1);
}

void Scene::add_item(const geometry::ParticleSet& set, const materials::MaterialParams& params) {
  if (set.item_id == kBackground || set.item_id > kMaxItemId) {
    throw InvalidArgument("item id must be in 1..255");
  }
  if (has_item(set.item_id)) {
    throw InvalidArgument("duplicate item id " + std::to_string(set.item_id));
  }
  const std::uint32_t mat = material_index(params);
  items.push_back({set.item_id, params.category, mat});
  const Vec3 offset(0.0, plate_center.y(), 0.0);
  for (const Vec3& x : set.positions) {
    sim::Particle p;
    p.x = x + offset;
    p.mass = set.particle_mass;
    p.volume = set.particle_volume;
    p.material = mat;
    p.item = set.item_id;
    world.particles.push_back(p);
  }
}

void Scene::relabel(ItemId from, ItemId to, const std::vector<std::uint8_t>& selected) {
  if (selected.size() != world.particles.size()) {
    throw InvalidArgument("relabel selection size mismatch");
  }
  ItemInfo info = item(from);
  if (!has_item(to)) {
    info.id = to;
    items.push_back(info);
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] && world.particles[i].item == from) world.particles[i].item = to;
  }
}

void Scene::prune_items() {
  std::set<ItemId> present;
  for (const auto& p : world.particles) present.insert(p.item);
  std::erase_if(items, [&](const ItemInfo& it) { return !present.count(it.id); });
}

tools::Pose fork_park_pose(const Scene& scene) {
  const auto& cfg = scene.world.config;
  tools::Pose pose;
  // Tips well above anything on the plate, handle leaving the domain.
  pose.translation = Vec3(cfg.domain_origin.x() + 0.5 * cfg.domain_size,
                          cfg.domain_origin.y() + 0.85 * cfg.domain_size,
                          cfg.domain_origin.z() + 0.5 * cfg.domain_size);
  return pose;
}

Scene make_empty_scene(const SceneLayout& layout) {
  layout.plate.validate();
  layout.fork.validate();
  Scene s;
  s.world = sim::SimWorld(layout.sim);
  s.plate = layout.plate;
  s.plate_center = layout.plate_center;
  s.fork = layout.fork;
  s.seed = layout.seed;
  s.camera = render::CameraSpec::over_plate(layout.plate_center, layout.plate.radius,
                                            layout.camera_pixels);

  sim::ToolBinding plate;
  plate.name = "plate";
  plate.shape = std::make_shared<const tools::ToolShape>(tools::make_plate(layout.plate));
  tools::Pose plate_pose;
  plate_pose.translation = layout.plate_center;
  plate.trajectory = tools::ToolTrajectory::stationary(plate_pose);
  plate.role = sim::ToolRole::Plate;
  s.world.tools.push_back(std::move(plate));
  s.plate_tool = 0;

  sim::ToolBinding fork;
  fork.name = "fork";
  fork.shape = std::make_shared<const tools::ToolShape>(tools::make_fork(layout.fork));
  fork.role = sim::ToolRole::Fork;
  s.world.tools.push_back(std::move(fork));
  s.fork_tool = 1;
  s.fork_park = fork_park_pose(s);
  s.world.tools[1].trajectory = tools::ToolTrajectory::stationary(s.fork_park);
  return s;
}

}  // namespace preacq::scene
