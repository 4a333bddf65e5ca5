#pragma once

#include <vector>

#include "preacq/common.hpp"
#include "preacq/sim/world.hpp"

namespace preacq::actions {

/// Shape summary of one item's particles.
struct ItemGeometry {
  Vec3 centroid = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // columns: major, middle, minor
  Vec3 extents = Vec3::Zero();   // full lengths along axes, descending
  double footprint_area = 0.0;   // m^2
  double mean_height = 0.0;      // m above the plate plane
  double max_height = 0.0;
  std::size_t particle_count = 0;

  Vec3 major() const { return axes.col(0); }
  Vec3 minor() const { return axes.col(2); }
};

/// Principal axes from the mass-weighted covariance. An extent is the length
/// of a uniform bar with the same variance, sqrt(12 lambda). Each axis is
/// signed so its largest-magnitude component is positive. Heights come from a
/// column grid with cell edge V^(1/3), each column topped at the highest
/// particle plus its splat radius. Needs at least 4 particles.
ItemGeometry item_geometry(const std::vector<sim::Particle>& particles, double plane_height);

/// item_geometry over the particles of one item.
ItemGeometry item_geometry(const sim::SimWorld& world, ItemId item, double plane_height);

/// Major axis of the horizontal (xz) covariance, unit, y = 0, same sign rule.
Vec3 horizontal_major_axis(const std::vector<sim::Particle>& particles);

/// Union-find over particle pairs closer than `radius`. Labels are dense,
/// 0..k-1, numbered by each component's lowest particle index.
std::vector<std::uint32_t> connected_components(const std::vector<Vec3>& points, double radius);

/// Component count from labels.
std::size_t component_count(const std::vector<std::uint32_t>& labels);

}  // namespace preacq::actions
