#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "preacq/cli/config.hpp"
#include "preacq/estimator/estimator.hpp"
#include "preacq/geometry/primitives.hpp"
#include "preacq/render/render.hpp"

using namespace preacq;
using namespace preacq::estimator;
using materials::ModelClass;

namespace {

ItemObservation elastic_cube() {
  ItemObservation o;
  o.id = 1;
  o.category = "tofu";
  o.material = ModelClass::Elastic;
  o.volume = 3.375e-6;
  o.mean_height = 0.015;
  o.max_height = 0.015;
  o.height_std = 0.05 * 0.015;
  o.elongation = 1.0;
  o.major_extent = 0.015;
  o.minor_extent = 0.015;
  o.local_density = 15.0;
  o.rim_distance = 0.08;
  o.item_distance = 0.24;
  return o;
}

ItemObservation rice(double density_fraction) {
  ItemObservation o;
  o.id = 2;
  o.category = "rice";
  o.material = ModelClass::Plastic;
  o.volume = 2e-6;
  o.mean_height = 0.003;
  o.max_height = 0.005;
  o.height_std = 0.001;
  o.local_density = density_fraction * EstimatorConfig{}.density_ref;
  return o;
}

}  // namespace

TEST(Environment, ThresholdOnNearestObstacle) {
  ItemObservation o = elastic_cube();
  EXPECT_EQ(classify_environment(o), EnvClass::Isolated);
  o.rim_distance = 0.005;
  EXPECT_EQ(classify_environment(o), EnvClass::Wall);
  o.rim_distance = 0.08;
  o.item_distance = 0.01;
  EXPECT_EQ(classify_environment(o), EnvClass::Wall);
  o.item_distance = 0.02;
  EXPECT_EQ(classify_environment(o), EnvClass::Wall);
  o.item_distance = std::nextafter(0.02, 1.0);
  EXPECT_EQ(classify_environment(o), EnvClass::Isolated);
}

TEST(BiteSize, ClosedInterval) {
  EXPECT_EQ(classify_bite_size(4e-6), BiteSizeClass::BiteSized);
  EXPECT_EQ(classify_bite_size(0.0), BiteSizeClass::NotBiteSized);
  EXPECT_EQ(classify_bite_size(2e-5), BiteSizeClass::NotBiteSized);
  EXPECT_EQ(classify_bite_size(1e-6), BiteSizeClass::BiteSized);
  EXPECT_EQ(classify_bite_size(8e-6), BiteSizeClass::BiteSized);
  EXPECT_EQ(classify_bite_size(std::nextafter(8e-6, 1.0)), BiteSizeClass::NotBiteSized);
}

TEST(Estimate, ElasticCubeSkewer) {
  const auto e = estimate_success(elastic_cube(), EnvClass::Isolated, BiteSizeClass::BiteSized);
  EXPECT_NEAR(e.skewer, 0.9 * 1.0 * 1.0 * 0.95, 1e-12);
  EXPECT_DOUBLE_EQ(e.twirl, 0.05);
  EXPECT_EQ(e.best_action(), Acquisition::Skewer);
}

TEST(Estimate, RiceScoopIsolatedVersusWall) {
  const auto scattered = estimate_success(rice(0.4), EnvClass::Isolated, BiteSizeClass::BiteSized);
  EXPECT_NEAR(scattered.scoop, 0.8 * 0.5 * 0.4, 1e-12);
  const auto thin = estimate_success(rice(0.1), EnvClass::Isolated, BiteSizeClass::BiteSized);
  EXPECT_NEAR(thin.scoop, 0.8 * 0.5 * 0.3, 1e-12);
  const auto piled = estimate_success(rice(1.3), EnvClass::Wall, BiteSizeClass::BiteSized);
  EXPECT_NEAR(piled.scoop, 0.8, 1e-12);
  EXPECT_EQ(piled.best_action(), Acquisition::Scoop);
}

TEST(Estimate, TwirlGate) {
  ItemObservation o = rice(0.5);
  o.category = "spaghetti";
  EXPECT_NEAR(estimate_success(o, EnvClass::Isolated, BiteSizeClass::BiteSized).twirl, 0.45,
              1e-12);
  o.category = "rice";
  EXPECT_DOUBLE_EQ(estimate_success(o, EnvClass::Isolated, BiteSizeClass::BiteSized).twirl, 0.05);
}

TEST(Estimate, MonotoneInItsFactors) {
  for (auto model : {ModelClass::Elastic, ModelClass::Elastoplastic, ModelClass::Plastic}) {
    for (const char* cat : {"rice", "spaghetti"}) {
      for (auto bite : {BiteSizeClass::BiteSized, BiteSizeClass::NotBiteSized}) {
        ItemObservation o = rice(0.0);
        o.material = model;
        o.category = cat;
        double last_scoop = -1.0, last_twirl = -1.0;
        for (double f = 0.0; f <= 2.0; f += 0.05) {
          o.local_density = f * EstimatorConfig{}.density_ref;
          const auto iso = estimate_success(o, EnvClass::Isolated, bite);
          const auto wall = estimate_success(o, EnvClass::Wall, bite);
          EXPECT_GE(iso.scoop, last_scoop);
          EXPECT_GE(iso.twirl, last_twirl);
          EXPECT_GE(wall.scoop, iso.scoop);
          last_scoop = iso.scoop;
          last_twirl = iso.twirl;
          ItemObservation rolling = o;
          rolling.roll_risk = true;
          EXPECT_LE(estimate_success(rolling, EnvClass::Isolated, bite).skewer, iso.skewer);
          for (double v : {iso.skewer, iso.scoop, iso.twirl}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
          }
        }
      }
    }
  }
}

TEST(Estimate, TiesResolveSkewerFirst) {
  EXPECT_EQ((SuccessEstimate{0.5, 0.5, 0.5}).best_action(), Acquisition::Skewer);
  EXPECT_EQ((SuccessEstimate{0.4, 0.5, 0.5}).best_action(), Acquisition::Scoop);
  EXPECT_EQ((SuccessEstimate{0.4, 0.5, 0.6}).best_action(), Acquisition::Twirl);
}

TEST(OneHot, Encodings) {
  EXPECT_EQ(one_hot(EnvClass::Isolated), (std::array<int, 2>{1, 0}));
  EXPECT_EQ(one_hot(EnvClass::Wall), (std::array<int, 2>{0, 1}));
  EXPECT_EQ(one_hot(BiteSizeClass::BiteSized), (std::array<int, 2>{1, 0}));
  EXPECT_EQ(one_hot(BiteSizeClass::NotBiteSized), (std::array<int, 2>{0, 1}));
}

namespace {

ObservationContext disc_context(int pixels, double extent) {
  ObservationContext ctx;
  ctx.raster = geometry::RasterGrid::centered(0.0, 0.0, extent, pixels);
  ctx.items[1] = {"tofu", ModelClass::Elastic, 1060.0};
  return ctx;
}

}  // namespace

TEST(Observe, DiscAreaAndHeight) {
  const auto ctx = disc_context(256, 0.24);
  geometry::HeightPrimitive disc;
  disc.kind = geometry::HeightPrimitive::Kind::Disc;
  disc.radius = 0.03;
  disc.height = 0.012;
  const auto depth = geometry::rasterize(disc, ctx.raster);
  auto mask = geometry::SegMask::background(256, 256);
  for (std::size_t i = 0; i < depth.values.size(); ++i) {
    if (depth.values[i] > 0.0) mask.labels[i] = 1;
  }
  const auto obs = observe_items(depth, mask, ctx);
  ASSERT_EQ(obs.size(), 1u);
  const double area = std::numbers::pi * 0.03 * 0.03;
  EXPECT_NEAR(obs[0].footprint_area, area, 0.03 * area);
  EXPECT_NEAR(obs[0].mean_height, 0.012, 0.03 * 0.012);
  EXPECT_NEAR(obs[0].volume, area * 0.012, 0.03 * area * 0.012);
  EXPECT_NEAR(obs[0].elongation, 1.0, 0.03);
  EXPECT_NEAR(obs[0].local_density, 1060.0 * 0.012, 0.03 * 1060.0 * 0.012);
  EXPECT_NEAR(obs[0].rim_distance, 0.105 - 0.03, 0.24 / 256 + 1e-12);
  EXPECT_FALSE(obs[0].roll_risk);
}

TEST(Observe, EmptyMaskForDeclaredItemThrows) {
  const auto ctx = disc_context(64, 0.24);
  const auto depth = geometry::DepthMap::zeros(64, 64, 0.24 / 64);
  const auto mask = geometry::SegMask::background(64, 64);
  EXPECT_THROW(observe_items(depth, mask, ctx), InvalidArgument);
}

TEST(Observe, MismatchedImagesThrow) {
  const auto ctx = disc_context(64, 0.24);
  EXPECT_THROW(observe_items(geometry::DepthMap::zeros(32, 32, 0.01),
                             geometry::SegMask::background(32, 32), ctx),
               InvalidArgument);
}

TEST(Observe, RenderedFeaturesAgreeWithAnalyticHeightmap) {
  using nlohmann::json;
  const json doc = {
      {"seed", 5},
      {"grid", {{"dims", 128}, {"domain_size", 0.3}}},
      {"plate", {{"center", {0.15, 0.03, 0.15}}}},
      {"sim", {{"settle_time", 0.0}}},
      // Sampling density of the canonical scenes. At the registry default the
      // block is about four particles tall and splat overhang at its edges
      // inflates the rendered footprint by about 12%.
      {"materials",
       {{"tofu", {{"sampling_density", 4e8}}}, {"jello", {{"sampling_density", 4e8}}}}},
      {"items",
       {{{"id", 1}, {"category", "tofu"},
         {"source", {{"type", "hemisphere"}, {"center", {-0.03, 0.0}}, {"radius", 0.03}}}},
        {{"id", 2}, {"category", "jello"},
         {"source", {{"type", "box"}, {"center", {0.05, 0.03}}, {"yaw_deg", 30}, {"length", 0.04},
                     {"width", 0.025}, {"height", 0.015}}}}}}};
  const auto built = cli::build_scene(cli::parse_config(doc), false);
  const auto ctx = ObservationContext::from_scene(built.scene);
  const auto analytic = observe_items(built.depth, built.mask, ctx);
  const auto frame = render::render_frame(built.scene.world, built.scene.camera);
  const auto rendered = observe_items(frame.depth, frame.mask, ctx);
  ASSERT_EQ(analytic.size(), rendered.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const auto& a = analytic[i];
    const auto& r = rendered[i];
    SCOPED_TRACE("item " + std::to_string(a.id));
    EXPECT_NEAR(r.volume, a.volume, 0.10 * a.volume);
    EXPECT_NEAR(r.footprint_area, a.footprint_area, 0.10 * a.footprint_area);
    EXPECT_NEAR(r.mean_height, a.mean_height, 0.10 * a.mean_height);
    EXPECT_NEAR(r.local_density, a.local_density, 0.10 * a.local_density);
    EXPECT_EQ(classify_environment(r), classify_environment(a));
    EXPECT_EQ(classify_bite_size(r.volume), classify_bite_size(a.volume));
  }
}

TEST(EstimatorConfig, ValidateRejectsInvertedBounds) {
  EstimatorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.bite_volume_min = 1e-5;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}
