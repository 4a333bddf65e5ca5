#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "preacq/sim/checkpoint.hpp"
#include "preacq/sim/world.hpp"
#include "preacq/tools/utensils.hpp"

using namespace preacq;
using namespace preacq::sim;

namespace {

SimWorld make_world(int dims = 32, double domain = 0.32, Vec3 gravity = Vec3::Zero()) {
  SimConfig cfg;
  cfg.grid_dims = dims;
  cfg.domain_size = domain;
  cfg.gravity = gravity;
  SimWorld w(cfg);
  w.materials.push_back(materials::MaterialRegistry::defaults().at("jello"));
  return w;
}

// Cube of particles on a lattice with spacing h, lower corner lo.
void add_block(SimWorld& w, const Vec3& lo, int n, double h, ItemId item = 1,
               double density = 1050.0) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        Particle p;
        p.x = lo + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
        p.volume = h * h * h;
        p.mass = density * p.volume;
        p.item = item;
        w.particles.push_back(p);
      }
    }
  }
}

void add_ground(SimWorld& w, double y, double mu) {
  ToolBinding g;
  g.name = "ground";
  g.shape = std::make_shared<tools::ToolShape>(tools::make_ground(0.3, 0.05));
  tools::Pose pose;
  pose.translation = Vec3(0.16, y, 0.16);
  g.trajectory = tools::ToolTrajectory::stationary(pose);
  g.friction = mu;
  w.tools.push_back(g);
}

}  // namespace

TEST(Coulomb, ApproachingNormalRemovedWithoutTangent) {
  const Vec3 v = coulomb_project(Vec3(0.0, -2.0, 0.0), Vec3::UnitY(), 0.4);
  EXPECT_EQ(v, Vec3::Zero());
}

TEST(Coulomb, KineticFrictionReducesTangentialSpeed) {
  const Vec3 v = coulomb_project(Vec3(1.0, -1.0, 0.0), Vec3::UnitY(), 0.5);
  EXPECT_NEAR((v - Vec3(0.5, 0.0, 0.0)).norm(), 0.0, 1e-15);
}

TEST(Coulomb, HighFrictionSticks) {
  EXPECT_EQ(coulomb_project(Vec3(1.0, -1.0, 0.0), Vec3::UnitY(), 2.0), Vec3::Zero());
}

TEST(Coulomb, SeparatingMotionUntouched) {
  const Vec3 v(0.3, 0.7, -0.2);
  EXPECT_EQ(coulomb_project(v, Vec3::UnitY(), 1.0), v);
  const Vec3 tangent(0.3, 0.0, -0.2);
  EXPECT_EQ(coulomb_project(tangent, Vec3::UnitY(), 1.0), tangent);
}

TEST(Transfer, SingleParticleAtNodeCarriesItsMomentum) {
  auto w = make_world();
  Particle p;
  p.x = w.node_position(16, 16, 16);
  p.v = Vec3(1.0, 0.0, 0.0);
  p.mass = 0.003;
  p.volume = 1e-6;
  w.particles.push_back(p);
  w.clear_grid();
  w.p2g();
  EXPECT_NEAR((w.grid().total_momentum() - Vec3(0.003, 0.0, 0.0)).norm(), 0.0, 1e-12 * 0.003);
  EXPECT_NEAR(w.grid().total_mass(), 0.003, 1e-12 * 0.003);
}

TEST(Transfer, RandomParticlesConserveMassAndMomentum) {
  auto w = make_world();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(0.08, 0.24), vel(-1.0, 1.0), m(1e-4, 1e-3);
  for (int i = 0; i < 1000; ++i) {
    Particle p;
    p.x = Vec3(pos(rng), pos(rng), pos(rng));
    p.v = Vec3(vel(rng), vel(rng), vel(rng));
    p.mass = m(rng);
    p.volume = p.mass / 1050.0;
    w.particles.push_back(p);
  }
  w.clear_grid();
  w.p2g();
  const Vec3 pm = w.total_momentum();
  EXPECT_LT((w.grid().total_momentum() - pm).norm(), 1e-10 * pm.norm());
  EXPECT_LT(std::abs(w.grid().total_mass() - w.total_mass()), 1e-12 * w.total_mass());
}

TEST(Transfer, LinearFieldReproducedAsAffineVelocity) {
  auto w = make_world();
  Mat3 A;
  A << 0.3, -0.1, 0.2, 0.05, -0.4, 0.1, 0.2, 0.15, 0.25;
  const Vec3 c = Vec3::Constant(0.16);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> off(-0.03, 0.03);
  // Dense fill so every node around the probes is fully weighted.
  add_block(w, Vec3::Constant(0.1), 24, 0.005);
  for (auto& p : w.particles) {
    p.x += Vec3(off(rng), off(rng), off(rng)) * 0.01;
    p.v = A * (p.x - c);
    p.C = A;
  }
  w.clear_grid();
  w.p2g();
  // Zero stress: the block sits at F = I. No gravity, no tools.
  w.grid_update();
  w.g2p();
  int checked = 0;
  for (const auto& p : w.particles) {
    if (((p.x - c).cwiseAbs().array() > 0.04).any()) continue;
    EXPECT_LT((p.C - A).cwiseAbs().maxCoeff(), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Transfer, UniformFieldTranslatesRigidly) {
  auto w = make_world();
  add_block(w, Vec3::Constant(0.12), 10, 0.006);
  const Vec3 c(0.2, -0.1, 0.05);
  for (auto& p : w.particles) p.v = c;
  const auto before = w.particles;
  w.step();
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_LT((w.particles[i].v - c).norm(), 1e-12);
    EXPECT_LT(w.particles[i].C.norm(), 1e-9);
    EXPECT_LT((w.particles[i].x - (before[i].x + w.config.dt * c)).norm(), 1e-15);
  }
}

TEST(Step, ZeroGravityRestIsEquilibrium) {
  auto w = make_world();
  add_block(w, Vec3::Constant(0.12), 8, 0.005);
  const auto before = w.particles;
  for (int i = 0; i < 100; ++i) w.step();
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_LT((w.particles[i].x - before[i].x).norm(), 1e-12);
    EXPECT_EQ(w.particles[i].F, before[i].F);
  }
}

TEST(Step, FreeFallIsSymplecticEuler) {
  const Vec3 g(0.0, -9.81, 0.0);
  auto w = make_world(32, 0.32, g);
  Particle p;
  p.x = Vec3(0.16, 0.28, 0.16);
  p.mass = 1e-3;
  p.volume = 1e-6;
  w.particles.push_back(p);
  const int n = 200;
  for (int i = 0; i < n; ++i) w.step();
  EXPECT_NEAR((w.particles[0].v - n * w.config.dt * g).norm(), 0.0, 1e-12 * n * w.config.dt * 9.81);
}

TEST(Step, MassIsConservedEveryStep) {
  auto w = make_world(32, 0.32, Vec3(0.0, -9.81, 0.0));
  add_block(w, Vec3(0.12, 0.06, 0.12), 10, 0.004);
  add_ground(w, 0.05, 0.5);
  const double m0 = w.total_mass();
  for (int i = 0; i < 50; ++i) {
    w.clear_grid();
    w.p2g();
    EXPECT_LT(std::abs(w.grid().total_mass() - m0), 1e-12 * m0);
    w.grid_update();
    w.g2p();
  }
}

TEST(Step, GalileanInvariance) {
  auto base = make_world();
  add_block(base, Vec3::Constant(0.11), 8, 0.005);
  for (std::size_t i = 0; i < base.particles.size(); ++i) {
    base.particles[i].v = Vec3(0.02 * std::sin(i * 0.7), 0.03 * std::cos(i * 1.3), 0.0);
  }
  auto moved = base;
  const Vec3 c(0.05, -0.03, 0.04);
  for (auto& p : moved.particles) p.v += c;
  const double T = 0.2;
  base.run(T);
  moved.run(T);
  const double t_run = moved.time;
  for (std::size_t i = 0; i < base.particles.size(); ++i) {
    EXPECT_LT((moved.particles[i].x - base.particles[i].x - c * t_run).norm(), 1e-6);
  }
}

TEST(Step, DeterministicRuns) {
  auto make = [] {
    auto w = make_world(32, 0.32, Vec3(0.0, -9.81, 0.0));
    add_block(w, Vec3(0.12, 0.07, 0.12), 8, 0.005);
    add_ground(w, 0.05, 0.4);
    return w;
  };
  auto a = make(), b = make();
  a.run(0.1);
  b.run(0.1);
  ASSERT_EQ(a.particles.size(), b.particles.size());
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    EXPECT_EQ(a.particles[i].x, b.particles[i].x);
    EXPECT_EQ(a.particles[i].F, b.particles[i].F);
  }
}

TEST(Step, CflViolationIsReported) {
  auto w = make_world();
  Particle p;
  p.x = Vec3::Constant(0.16);
  p.v = Vec3(1000.0, 0.0, 0.0);
  p.mass = 1e-3;
  p.volume = 1e-6;
  w.particles.push_back(p);
  try {
    w.step();
    FAIL() << "expected a CFL violation";
  } catch (const SimulationError& e) {
    EXPECT_EQ(e.kind(), SimulationError::Kind::CflViolation);
    EXPECT_EQ(e.particle(), 0);
  }
}

TEST(Step, ParticleOutsideGridIsReported) {
  auto w = make_world();
  Particle p;
  p.x = Vec3(-0.1, 0.1, 0.1);
  p.mass = 1e-3;
  p.volume = 1e-6;
  w.particles.push_back(p);
  EXPECT_THROW(w.step(), SimulationError);
}

namespace {

constexpr double kPlateTop = 0.05;
constexpr double kCubeEdge = 0.02;

// Jello cube dropped 5 cm onto the plate and run for 1 s. Returns the final
// COM and, through max_dy, the largest particle height change over the final
// 0.1 s.
Vec3 drop_cube(double dt, double* max_dy = nullptr) {
  SimConfig cfg;
  cfg.grid_dims = 48;
  cfg.domain_size = 0.24;
  cfg.dt = dt;
  SimWorld w(cfg);
  w.materials.push_back(materials::MaterialRegistry::defaults().at("jello"));
  add_block(w, Vec3(0.11, kPlateTop + 0.05, 0.11), 8, kCubeEdge / 8);
  ToolBinding plate;
  plate.name = "plate";
  plate.role = ToolRole::Plate;
  plate.shape = std::make_shared<tools::ToolShape>(tools::make_plate(tools::PlateDims{}));
  tools::Pose pose;
  pose.translation = Vec3(0.12, kPlateTop, 0.12);
  plate.trajectory = tools::ToolTrajectory::stationary(pose);
  w.tools.push_back(plate);
  const auto n = steps_for(1.0, dt);
  const auto tail_start = n - steps_for(0.1, dt);
  std::vector<double> y0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i == tail_start) {
      for (const auto& p : w.particles) y0.push_back(p.x.y());
    }
    w.step();
  }
  if (max_dy) {
    *max_dy = 0.0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
      *max_dy = std::max(*max_dy, std::abs(w.particles[i].x.y() - y0[i]));
    }
  }
  return w.center_of_mass();
}

}  // namespace

TEST(Step, DroppedCubeSettlesAndConvergesInDt) {
  double max_dy = 0.0;
  const Vec3 coarse = drop_cube(2e-4, &max_dy);
  EXPECT_LT(max_dy, 0.05 * kCubeEdge);
  const Vec3 fine = drop_cube(1e-4);
  // COM height above the plate moves by under 2% when dt halves.
  EXPECT_LT(std::abs(fine.y() - coarse.y()), 0.02 * (coarse.y() - kPlateTop));
  EXPECT_LT(std::hypot(fine.x() - coarse.x(), fine.z() - coarse.z()), 1e-6);
}

namespace {

// Block resting on a ground slab under gravity tilted by theta about z.
// Returns the COM displacement along the slope over 0.5 s.
double incline_slip(double theta, double mu) {
  SimConfig cfg;
  cfg.grid_dims = 32;
  cfg.domain_size = 0.32;
  cfg.gravity = 9.81 * Vec3(std::sin(theta), -std::cos(theta), 0.0);
  SimWorld w(cfg);
  w.materials.push_back(materials::MaterialParams::make("block", materials::ModelClass::Elastic,
                                                        5e4, 0.3, 1000.0));
  add_block(w, Vec3(0.12, 0.05, 0.14), 8, 0.005);
  add_ground(w, 0.05, mu);
  w.run(0.05);
  const Vec3 start = w.center_of_mass();
  w.run(0.5);
  return std::abs(w.center_of_mass().x() - start.x());
}

}  // namespace

TEST(Step, FrictionHoldsOnShallowSlope) {
  const double mu = 0.5;
  EXPECT_LT(incline_slip(std::atan(0.7 * mu), mu), 1e-3);
}

TEST(Step, FrictionReleasesOnSteepSlope) {
  const double mu = 0.5;
  EXPECT_GT(incline_slip(std::atan(1.4 * mu), mu), 1e-2);
}

TEST(Step, EnergyNeverExceedsInitialWithoutTools) {
  auto w = make_world(32, 0.32, Vec3(0.0, -9.81, 0.0));
  w.materials[0] = materials::MaterialParams::make("block", materials::ModelClass::Elastic, 5e4,
                                                   0.3, 1000.0);
  add_block(w, Vec3(0.13, 0.06, 0.13), 8, 0.004);
  const double e0 = w.energy().total();
  double worst = e0;
  for (int i = 0; i < 1500; ++i) {
    w.step();
    worst = std::max(worst, w.energy().total());
  }
  EXPECT_LE(worst, 1.01 * e0);
}

TEST(Checkpoint, RoundTripIsExact) {
  auto w = make_world(32, 0.32, Vec3(0.0, -9.81, 0.0));
  add_block(w, Vec3(0.12, 0.07, 0.12), 6, 0.005, 3);
  add_ground(w, 0.05, 0.4);
  w.run(0.02);
  const auto path = (std::filesystem::temp_directory_path() / "preacq_test.ckpt").string();
  save_checkpoint(w, path);
  auto other = make_world(32, 0.32, Vec3(0.0, -9.81, 0.0));
  load_checkpoint(other, path);
  std::filesystem::remove(path);
  ASSERT_EQ(other.particles.size(), w.particles.size());
  EXPECT_EQ(other.time, w.time);
  EXPECT_EQ(other.step_index, w.step_index);
  for (std::size_t i = 0; i < w.particles.size(); ++i) {
    const auto& a = w.particles[i];
    const auto& b = other.particles[i];
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.C, b.C);
    EXPECT_EQ(a.F, b.F);
    EXPECT_EQ(a.mass, b.mass);
    EXPECT_EQ(a.item, b.item);
  }
}

TEST(Checkpoint, RejectsGarbage) {
  const auto path = (std::filesystem::temp_directory_path() / "preacq_bad.ckpt").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT";
  }
  auto w = make_world();
  EXPECT_THROW(load_checkpoint(w, path), IoError);
  std::filesystem::remove(path);
}

TEST(StepsFor, RoundsUpWithoutSpuriousExtraStep) {
  EXPECT_EQ(steps_for(0.1, 2e-4), 500);
  EXPECT_EQ(steps_for(0.10001, 2e-4), 501);
  EXPECT_EQ(steps_for(0.0, 2e-4), 0);
}
