#include "preacq/estimator/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "preacq/scene/scene.hpp"

namespace preacq::estimator {

std::array<int, 2> one_hot(EnvClass env) {
  return env == EnvClass::Isolated ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
}

std::array<int, 2> one_hot(BiteSizeClass bite) {
  return bite == BiteSizeClass::BiteSized ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
}

std::string to_string(EnvClass env) { return env == EnvClass::Isolated ? "isolated" : "wall"; }

std::string to_string(BiteSizeClass bite) {
  return bite == BiteSizeClass::BiteSized ? "bite_sized" : "not_bite_sized";
}

std::string to_string(Acquisition a) {
  switch (a) {
    case Acquisition::Skewer: return "skewer";
    case Acquisition::Scoop: return "scoop";
    case Acquisition::Twirl: return "twirl";
  }
  return "?";
}

double SuccessEstimate::operator[](Acquisition a) const {
  switch (a) {
    case Acquisition::Skewer: return skewer;
    case Acquisition::Scoop: return scoop;
    case Acquisition::Twirl: return twirl;
  }
  return 0.0;
}

Acquisition SuccessEstimate::best_action() const {
  Acquisition best = Acquisition::Skewer;
  if (scoop > (*this)[best]) best = Acquisition::Scoop;
  if (twirl > (*this)[best]) best = Acquisition::Twirl;
  return best;
}

void EstimatorConfig::validate() const {
  if (!(env_distance >= 0.0)) throw InvalidArgument("env_distance must be >= 0");
  if (!(bite_volume_min >= 0.0 && bite_volume_max >= bite_volume_min)) {
    throw InvalidArgument("bite-size bounds must satisfy 0 <= min <= max");
  }
  if (!(density_ref > 0.0)) throw InvalidArgument("density_ref must be positive");
}

EnvClass classify_environment(const ItemObservation& obs, const EstimatorConfig& cfg) {
  return std::min(obs.rim_distance, obs.item_distance) <= cfg.env_distance ? EnvClass::Wall
                                                                           : EnvClass::Isolated;
}

BiteSizeClass classify_bite_size(double volume, const EstimatorConfig& cfg) {
  if (!(volume >= 0.0)) throw InvalidArgument("volume must be non-negative");
  return (volume >= cfg.bite_volume_min && volume <= cfg.bite_volume_max)
             ? BiteSizeClass::BiteSized
             : BiteSizeClass::NotBiteSized;
}

SuccessEstimate estimate_success(const ItemObservation& obs, EnvClass env, BiteSizeClass bite,
                                 const EstimatorConfig& cfg) {
  using materials::ModelClass;
  const double density = obs.local_density / cfg.density_ref;

  double sk = 0.0;
  double sc = 0.0;
  switch (obs.material) {
    case ModelClass::Elastic:
      sk = cfg.skewer_base_elastic;
      sc = cfg.scoop_base_elastic;
      break;
    case ModelClass::Elastoplastic:
      sk = cfg.skewer_base_elastoplastic;
      sc = cfg.scoop_base_elastoplastic;
      break;
    case ModelClass::Plastic:
      sk = cfg.skewer_base_plastic;
      sc = cfg.scoop_base_plastic;
      break;
  }
  const double flat_top =
      obs.mean_height > 0.0 ? std::clamp(1.0 - obs.height_std / obs.mean_height, cfg.flat_top_min, 1.0)
                            : cfg.flat_top_min;
  sk *= bite == BiteSizeClass::BiteSized ? 1.0 : cfg.skewer_not_bite_factor;
  sk *= 1.0 - cfg.skewer_roll_penalty * (obs.roll_risk ? 1.0 : 0.0);
  sk *= flat_top;

  sc *= env == EnvClass::Wall ? 1.0 : cfg.scoop_isolated_factor;
  sc *= std::clamp(density, cfg.scoop_density_min, 1.0);

  const double tw = materials::is_noodle(obs.category) ? cfg.twirl_noodle * std::clamp(density, 0.0, 1.0)
                                                       : cfg.twirl_other;
  return {std::clamp(sk, 0.0, 1.0), std::clamp(sc, 0.0, 1.0), std::clamp(tw, 0.0, 1.0)};
}

SuccessEstimate estimate_item(const ItemObservation& obs, const EstimatorConfig& cfg) {
  return estimate_success(obs, classify_environment(obs, cfg), classify_bite_size(obs.volume, cfg),
                          cfg);
}

ObservationContext ObservationContext::from_scene(const scene::Scene& s) {
  ObservationContext ctx;
  ctx.raster = s.camera.raster;
  ctx.plate_center_x = s.plate_center.x();
  ctx.plate_center_z = s.plate_center.z();
  ctx.wall_radius = s.plate.wall_radius();
  for (const auto& it : s.items) {
    const auto& m = s.world.materials.at(it.material);
    ctx.items[it.id] = {it.category, m.model, m.mass_density};
  }
  return ctx;
}

std::vector<ItemObservation> observe_items(const geometry::DepthMap& depth,
                                           const geometry::SegMask& mask,
                                           const ObservationContext& ctx,
                                           const EstimatorConfig& cfg) {
  cfg.validate();
  const auto& r = ctx.raster;
  if (depth.width != r.width || depth.height != r.height || mask.width != r.width ||
      mask.height != r.height) {
    throw InvalidArgument("observation images do not match the camera raster");
  }
  const double pitch = r.pitch;
  const double pix_area = pitch * pitch;

  // Footprint boundary pixels per label, for the item-distance search.
  std::map<ItemId, std::vector<Eigen::Vector2d>> boundary;
  for (int v = 0; v < r.height; ++v) {
    for (int u = 0; u < r.width; ++u) {
      const ItemId l = mask.at(u, v);
      if (l == kBackground) continue;
      bool edge = false;
      const int du[4] = {1, -1, 0, 0};
      const int dv[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4 && !edge; ++k) {
        const int uu = u + du[k];
        const int vv = v + dv[k];
        edge = uu < 0 || vv < 0 || uu >= r.width || vv >= r.height ||
               mask.at(uu, vv) != l;
      }
      if (edge) boundary[l].emplace_back(r.center_x(u), r.center_z(v));
    }
  }

  std::vector<ItemObservation> out;
  for (const auto& [id, meta] : ctx.items) {
    ItemObservation o;
    o.id = id;
    o.category = meta.category;
    o.material = meta.material;
    std::size_t n = 0;
    double sum = 0.0;
    double sum2 = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double max_radial = 0.0;
    for (int v = 0; v < r.height; ++v) {
      for (int u = 0; u < r.width; ++u) {
        if (mask.at(u, v) != id) continue;
        const double h = depth.at(u, v);
        ++n;
        sum += h;
        sum2 += h * h;
        o.max_height = std::max(o.max_height, h);
        const Eigen::Vector2d c(r.center_x(u), r.center_z(v));
        mean += c;
        max_radial = std::max(max_radial, std::hypot(c.x() - ctx.plate_center_x,
                                                     c.y() - ctx.plate_center_z));
      }
    }
    if (n == 0) throw InvalidArgument("item " + std::to_string(id) + " has an empty mask");
    const double nd = static_cast<double>(n);
    mean /= nd;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int v = 0; v < r.height; ++v) {
      for (int u = 0; u < r.width; ++u) {
        if (mask.at(u, v) != id) continue;
        const Eigen::Vector2d d = Eigen::Vector2d(r.center_x(u), r.center_z(v)) - mean;
        cov += d * d.transpose();
      }
    }
    cov /= nd;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    o.major_extent = std::sqrt(12.0 * std::max(0.0, eig.eigenvalues()[1]) + pitch * pitch);
    o.minor_extent = std::sqrt(12.0 * std::max(0.0, eig.eigenvalues()[0]) + pitch * pitch);
    o.elongation = o.major_extent / o.minor_extent;

    o.footprint_area = nd * pix_area;
    o.volume = sum * pix_area;
    o.mean_height = sum / nd;
    o.height_std = std::sqrt(std::max(0.0, sum2 / nd - o.mean_height * o.mean_height));
    o.roll_risk = o.elongation >= cfg.roll_elongation &&
                  o.max_height >= cfg.roll_height_ratio * o.minor_extent;
    o.local_density = meta.mass_density * o.volume / o.footprint_area;
    o.rim_distance = std::max(0.0, ctx.wall_radius - (max_radial + 0.5 * pitch));

    double best = 2.0 * ctx.wall_radius;
    const auto& mine = boundary[id];
    for (const auto& [other, pts] : boundary) {
      if (other == id) continue;
      for (const auto& a : mine) {
        for (const auto& b : pts) best = std::min(best, std::max(0.0, (a - b).norm() - pitch));
      }
    }
    o.item_distance = best;
    out.push_back(o);
  }
  return out;
}

}  // namespace preacq::estimator
