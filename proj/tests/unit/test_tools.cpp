#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "preacq/tools/sdf.hpp"
#include "preacq/tools/trajectory.hpp"
#include "preacq/tools/utensils.hpp"

using namespace preacq;
using namespace preacq::tools;

namespace {

Pose at(const Vec3& t, const Quat& q = Quat::Identity()) {
  Pose p;
  p.translation = t;
  p.rotation = q;
  return p;
}

// Fraction of near-surface samples whose gradient norm is in [0.8, 1.2],
// together with the number of samples taken.
void check_gradient_norm(const ToolShape& shape, const Vec3& lo, const Vec3& hi, double dx,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Pose pose;
  int kept = 0;
  int attempts = 0;
  while (kept < 10000) {
    ASSERT_LT(++attempts, 5'000'000) << "too few near-surface samples";
    const Vec3 x = lo + (hi - lo).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    if (std::abs(sdf_eval(shape, pose, x)) > 2.0 * dx) continue;
    ++kept;
    const double g = sdf_gradient(shape, pose, x, 1e-4 * dx).norm();
    ASSERT_GE(g, 0.8) << "at " << x.transpose();
    ASSERT_LE(g, 1.2) << "at " << x.transpose();
  }
}

}  // namespace

TEST(Sdf, PlateCentreAbovePlateTop) {
  const auto plate = make_plate(PlateDims{});
  EXPECT_NEAR(sdf_eval(plate, Pose{}, Vec3(0.0, 0.05, 0.0)), 0.05, 1e-12);
  const Pose moved = at(Vec3(0.15, 0.03, 0.15));
  EXPECT_NEAR(sdf_eval(plate, moved, Vec3(0.15, 0.08, 0.15)), 0.05, 1e-12);
}

TEST(Sdf, TineAxisIsInsideByTineRadius) {
  ForkDims dims;
  dims.tine_web = false;
  const auto fork = make_fork(dims);
  // Outermost tine axis, halfway up the tine.
  const double x = 1.5 * dims.tine_spacing;
  EXPECT_NEAR(sdf_eval(fork, Pose{}, Vec3(x, 0.5 * dims.tine_length, 0.0)), -dims.tine_radius,
              1e-12);
}

TEST(Sdf, PlateTopNormalIsUp) {
  const auto plate = make_plate(PlateDims{});
  const double dx = 0.3 / 128;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.0, 0.09), a(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 200; ++i) {
    const double rr = r(rng), th = a(rng);
    const Vec3 x(rr * std::cos(th), 0.002, rr * std::sin(th));
    EXPECT_LT((sdf_normal(plate, Pose{}, x, 1e-4 * dx) - Vec3::UnitY()).norm(), 1e-6);
  }
}

TEST(Sdf, SphereIsExact) {
  const ToolShape s({Sphere{Vec3(0.01, 0.0, 0.0), 0.02}});
  const Pose pose = at(Vec3(0.1, 0.1, 0.1), Quat(Eigen::AngleAxisd(0.7, Vec3::UnitZ())));
  const Vec3 c = pose.apply(Vec3(0.01, 0.0, 0.0));
  EXPECT_NEAR(sdf_eval(s, pose, c + Vec3(0.0, 0.05, 0.0)), 0.03, 1e-15);
  EXPECT_NEAR(sdf_eval(s, pose, c), -0.02, 1e-15);
}

TEST(Sdf, PoseRotationMovesTheShape) {
  const ToolShape box({Box{Vec3::Zero(), Vec3(0.05, 0.01, 0.01)}});
  const Pose quarter = at(Vec3::Zero(), Quat(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitY())));
  // The long axis now runs along z.
  EXPECT_LT(sdf_eval(box, quarter, Vec3(0.0, 0.0, 0.04)), 0.0);
  EXPECT_GT(sdf_eval(box, quarter, Vec3(0.04, 0.0, 0.0)), 0.0);
}

TEST(Sdf, GradientNormNearFork) {
  const double dx = 0.3 / 128;
  check_gradient_norm(make_fork(ForkDims{}), Vec3(-0.02, -0.01, -0.01), Vec3(0.02, 0.16, 0.01),
                      dx, 1);
}

TEST(Sdf, GradientNormNearPlate) {
  const double dx = 0.3 / 128;
  check_gradient_norm(make_plate(PlateDims{}), Vec3(-0.14, -0.02, -0.14),
                      Vec3(0.14, 0.03, 0.14), dx, 2);
}

TEST(Sdf, SmoothUnionBounds) {
  EXPECT_EQ(smooth_union(0.3, 0.1, 0.0), 0.1);
  EXPECT_LE(smooth_union(0.3, 0.1, 0.05), 0.1);
  EXPECT_EQ(smooth_union(0.3, 0.1, 0.05), 0.1);  // outside the blend band
  EXPECT_LT(smooth_union(0.1, 0.1, 0.05), 0.1);
}

TEST(Trajectory, LinearSegmentMidpointAndVelocity) {
  const ToolTrajectory tr({{0.0, at(Vec3::Zero())}, {1.0, at(Vec3(0.1, 0.0, 0.0))}});
  EXPECT_LT((tr.pose_at(0.5).translation - Vec3(0.05, 0.0, 0.0)).norm(), 1e-15);
  EXPECT_LT((tr.velocity_at(0.5, Vec3(0.3, 0.2, 0.1)) - Vec3(0.1, 0.0, 0.0)).norm(), 1e-12);
  EXPECT_EQ(tr.end_time(), 1.0);
}

TEST(Trajectory, HoldsLastPoseWithZeroVelocity) {
  const ToolTrajectory tr({{0.0, at(Vec3::Zero())}, {1.0, at(Vec3(0.1, 0.2, 0.0))}});
  EXPECT_EQ(tr.pose_at(3.0).translation, Vec3(0.1, 0.2, 0.0));
  EXPECT_EQ(tr.velocity_at(3.0, Vec3::Zero()), Vec3::Zero());
}

TEST(Trajectory, PureRotationSpeedIsOmegaR) {
  const double omega = 2.0;
  const Quat q(Eigen::AngleAxisd(omega * 0.5, Vec3::UnitY()));
  const Vec3 c(0.1, 0.05, 0.1);
  const ToolTrajectory tr({{0.0, at(c)}, {0.5, at(c, q)}});
  for (double r : {0.01, 0.03, 0.1}) {
    const Vec3 x = tr.pose_at(0.2).apply(Vec3(r, 0.0, 0.0));
    EXPECT_NEAR(tr.velocity_at(0.2, x).norm(), omega * r, 1e-6);
  }
  Vec3 lin, ang;
  tr.twist_at(0.2, lin, ang);
  EXPECT_LT(lin.norm(), 1e-12);
  EXPECT_LT((ang - Vec3(0.0, omega, 0.0)).norm(), 1e-9);
}

TEST(Trajectory, PoseIsContinuous) {
  const ToolTrajectory tr({{0.0, at(Vec3::Zero())},
                           {0.3, at(Vec3(0.0, -0.05, 0.0))},
                           {0.8, at(Vec3(0.1, -0.05, 0.0),
                                    Quat(Eigen::AngleAxisd(1.0, Vec3::UnitX())))}});
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    const double eps = 1e-7;
    const Pose a = tr.pose_at(t), b = tr.pose_at(t + eps);
    EXPECT_LT((a.translation - b.translation).norm(), 1e-6);
    EXPECT_LT(a.rotation.angularDistance(b.rotation), 1e-6);
    EXPECT_NEAR(a.rotation.norm(), 1.0, 1e-9);
  }
}

TEST(Trajectory, RejectsBadKeyframes) {
  EXPECT_THROW(ToolTrajectory({{0.1, Pose{}}}), InvalidArgument);
  EXPECT_THROW(ToolTrajectory({{0.0, Pose{}}, {0.0, Pose{}}}), InvalidArgument);
  EXPECT_THROW(ToolTrajectory({{0.0, Pose{}}, {1.0, Pose{}}, {0.5, Pose{}}}), InvalidArgument);
}

TEST(Trajectory, EmptyTrajectoryThrows) {
  const ToolTrajectory empty;
  EXPECT_THROW(empty.pose_at(0.0), Error);
}

TEST(Trajectory, AppendExtendsFromTheEnd) {
  ToolTrajectory tr = ToolTrajectory::stationary(at(Vec3::Zero()));
  tr.append(0.5, at(Vec3(0.0, 0.1, 0.0)));
  EXPECT_DOUBLE_EQ(tr.end_time(), 0.5);
  EXPECT_LT((tr.velocity_at(0.25, Vec3::Zero()) - Vec3(0.0, 0.2, 0.0)).norm(), 1e-12);
}

TEST(Utensils, DimensionsAreConsistent) {
  ForkDims f;
  EXPECT_DOUBLE_EQ(f.tine_span(), 3 * 0.005 + 0.002);
  EXPECT_NO_THROW(f.validate());
  PlateDims p;
  EXPECT_DOUBLE_EQ(p.wall_radius(), 0.105);
  // Rim top sits rim_height above the face at the wall radius plus minor radius.
  const auto rim = make_plate_rim(p);
  EXPECT_NEAR(sdf_eval(rim, Pose{}, Vec3(p.radius, p.rim_height + 0.01, 0.0)), 0.01, 1e-9);
  f.tine_count = 0;
  EXPECT_THROW(f.validate(), InvalidArgument);
}
