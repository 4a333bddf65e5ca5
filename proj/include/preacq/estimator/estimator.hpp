#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "preacq/geometry/raster.hpp"
#include "preacq/materials/material.hpp"

namespace preacq::scene {
struct Scene;
}

namespace preacq::estimator {

enum class EnvClass { Isolated, Wall };
enum class BiteSizeClass { BiteSized, NotBiteSized };
enum class Acquisition { Skewer, Scoop, Twirl };

std::array<int, 2> one_hot(EnvClass env);
std::array<int, 2> one_hot(BiteSizeClass bite);
std::string to_string(EnvClass env);
std::string to_string(BiteSizeClass bite);
std::string to_string(Acquisition a);

/// Success probabilities for the three acquisition primitives.
struct SuccessEstimate {
  double skewer = 0.0;
  double scoop = 0.0;
  double twirl = 0.0;

  double operator[](Acquisition a) const;
  /// Highest component; ties resolve skewer, scoop, twirl.
  Acquisition best_action() const;
  double best() const { return (*this)[best_action()]; }
};

/// Per-item features read off a depth map and mask.
struct ItemObservation {
  ItemId id = kBackground;
  std::string category;
  materials::ModelClass material = materials::ModelClass::Elastic;
  double volume = 0.0;          // m^3
  double footprint_area = 0.0;  // m^2
  double mean_height = 0.0;     // m
  double max_height = 0.0;
  double height_std = 0.0;
  double elongation = 1.0;      // footprint major / minor extent
  double major_extent = 0.0;    // m
  double minor_extent = 0.0;
  bool roll_risk = false;
  double local_density = 0.0;   // kg/m^2
  double rim_distance = 0.0;    // m, footprint to the plate wall
  double item_distance = 0.0;   // m, footprint to the nearest other footprint
};

/// Rule constants and thresholds. Defaults form the documented rule table.
struct EstimatorConfig {
  double env_distance = 0.02;  // m
  double bite_volume_min = 1e-6;
  double bite_volume_max = 8e-6;
  double density_ref = 15.0;  // kg/m^2

  double skewer_base_elastic = 0.9;
  double skewer_base_elastoplastic = 0.9;
  double skewer_base_plastic = 0.1;
  double skewer_not_bite_factor = 0.2;
  double skewer_roll_penalty = 0.8;
  double flat_top_min = 0.2;

  double scoop_base_plastic = 0.8;
  double scoop_base_elastoplastic = 0.7;
  double scoop_base_elastic = 0.3;
  double scoop_isolated_factor = 0.5;
  double scoop_density_min = 0.3;

  double twirl_noodle = 0.9;
  double twirl_other = 0.05;

  double roll_elongation = 1.5;
  double roll_height_ratio = 0.8;

  void validate() const;
};

/// Wall iff the nearer of rim and other-item distance is within env_distance.
EnvClass classify_environment(const ItemObservation& obs, const EstimatorConfig& cfg = {});
BiteSizeClass classify_bite_size(double volume, const EstimatorConfig& cfg = {});
SuccessEstimate estimate_success(const ItemObservation& obs, EnvClass env, BiteSizeClass bite,
                                 const EstimatorConfig& cfg = {});
/// classify + estimate in one call.
SuccessEstimate estimate_item(const ItemObservation& obs, const EstimatorConfig& cfg = {});

struct ItemMeta {
  std::string category;
  materials::ModelClass material = materials::ModelClass::Elastic;
  double mass_density = 1000.0;  // kg/m^3
};

/// What the observer knows besides the images.
struct ObservationContext {
  geometry::RasterGrid raster;  // placement of the images in the world xz plane
  double plate_center_x = 0.0;
  double plate_center_z = 0.0;
  double wall_radius = 0.105;   // where the rim meets the plate face
  std::map<ItemId, ItemMeta> items;

  static ObservationContext from_scene(const scene::Scene& scene);
};

/// Features of every item in ctx.items. Area = pixels * pitch^2, volume =
/// prism sum, extents from the footprint covariance (each pixel contributing
/// its own area's variance), rim distance from the outermost footprint pixel
/// edge, item distance between footprint boundary pixels less one pitch.
/// With no other item the item distance is the plate diameter. Throws
/// InvalidArgument when a declared item has no pixels or dims mismatch.
std::vector<ItemObservation> observe_items(const geometry::DepthMap& depth,
                                           const geometry::SegMask& mask,
                                           const ObservationContext& ctx,
                                           const EstimatorConfig& cfg = {});

}  // namespace preacq::estimator
