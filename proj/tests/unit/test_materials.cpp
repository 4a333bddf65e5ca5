#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "preacq/materials/constitutive.hpp"
#include "preacq/materials/material.hpp"

using namespace preacq;
using namespace preacq::materials;

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Quat(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
}

// F = U diag(s) V^T with s drawn from [lo, hi].
Mat3 random_f(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> s(lo, hi);
  return random_rotation(rng) * Vec3(s(rng), s(rng), s(rng)).asDiagonal() *
         random_rotation(rng).transpose();
}

Mat3 fd_energy_gradient(const Mat3& F, double mu, double lambda, double h) {
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Mat3 a = F, b = F;
      a(i, j) += h;
      b(i, j) -= h;
      g(i, j) = (corotated_energy(a, mu, lambda) - corotated_energy(b, mu, lambda)) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace

TEST(Lame, MatchesClosedFormAtModerateNu) {
  // Reference values from a 40-digit evaluation of the closed form.
  const auto l = lame_from_young_poisson(1e4, 0.3);
  EXPECT_NEAR(l.lambda, 5769.2307692307692, 1e-9);
  EXPECT_NEAR(l.mu, 3846.1538461538462, 1e-9);
}

TEST(Lame, NearIncompressible) {
  const auto l = lame_from_young_poisson(1e4, 0.49);
  EXPECT_NEAR(l.lambda, 164429.53020134228, 1e-6);
  EXPECT_NEAR(l.mu, 3355.7046979865772, 1e-9);
}

TEST(Lame, ZeroPoissonRatio) {
  const auto l = lame_from_young_poisson(2e4, 0.0);
  EXPECT_EQ(l.lambda, 0.0);
  EXPECT_DOUBLE_EQ(l.mu, 1e4);
}

TEST(Lame, RejectsOutOfRangeInputs) {
  EXPECT_THROW(lame_from_young_poisson(0.0, 0.3), InvalidArgument);
  EXPECT_THROW(lame_from_young_poisson(1e4, 0.5), InvalidArgument);
  EXPECT_THROW(lame_from_young_poisson(1e4, -0.1), InvalidArgument);
}

TEST(Registry, DefaultsAreValidAndConsistent) {
  const auto reg = MaterialRegistry::defaults();
  for (const auto& name : {"jello", "tofu", "mashed_potato", "avocado", "oatmeal", "rice",
                           "red_velvet", "banana", "spaghetti", "mac_and_cheese"}) {
    ASSERT_TRUE(reg.contains(name)) << name;
    const auto& p = reg.at(name);
    EXPECT_NO_THROW(p.validate()) << name;
    const auto l = lame_from_young_poisson(p.young_modulus, p.poisson_ratio);
    EXPECT_NEAR(p.lame_lambda, l.lambda, 1e-9 * l.lambda) << name;
    EXPECT_NEAR(p.lame_mu, l.mu, 1e-9 * l.mu) << name;
  }
  EXPECT_EQ(reg.at("rice").model, ModelClass::Plastic);
  EXPECT_EQ(reg.at("mashed_potato").model, ModelClass::Elastoplastic);
  EXPECT_EQ(reg.at("jello").model, ModelClass::Elastic);
  EXPECT_THROW(reg.at("gravel"), InvalidArgument);
}

TEST(Registry, ValidateRejectsBadParams) {
  auto p = MaterialRegistry::defaults().at("mashed_potato");
  p.yield_stress = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = MaterialRegistry::defaults().at("tofu");
  p.lame_mu *= 1.01;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = MaterialRegistry::defaults().at("tofu");
  p.mass_density = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(ElasticStress, RestStateIsStressFree) {
  EXPECT_EQ(stress_elastic(Mat3::Identity(), 3846.15, 5769.23), Mat3::Zero());
}

TEST(ElasticStress, PureRotationIsStressFree) {
  const Mat3 R = Eigen::AngleAxisd(37.0 * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
  const double mu = 3846.15;
  EXPECT_LT(stress_elastic(R, mu, 5769.23).cwiseAbs().maxCoeff(), 1e-9 * mu);
}

TEST(ElasticStress, UniaxialStretchMatchesEnergyGradient) {
  const Mat3 F = Vec3(1.1, 1.0, 1.0).asDiagonal();
  const double mu = 3846.15, lambda = 5769.23;
  const Mat3 P = stress_elastic(F, mu, lambda);
  const Mat3 G = fd_energy_gradient(F, mu, lambda, 1e-6);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double scale = std::max(std::abs(G(i, j)), 1e-6 * G.norm());
      EXPECT_LT(std::abs(P(i, j) - G(i, j)), 1e-3 * scale) << i << "," << j;
    }
  }
}

TEST(ElasticStress, MatchesEnergyGradientForRandomF) {
  std::mt19937_64 rng(42);
  const double mu = 3846.15, lambda = 5769.23;
  for (int k = 0; k < 100; ++k) {
    const Mat3 F = random_f(rng, 0.7, 1.4);
    const Mat3 P = stress_elastic(F, mu, lambda);
    const Mat3 G = fd_energy_gradient(F, mu, lambda, 1e-6);
    EXPECT_LT((P - G).norm(), 1e-3 * std::max(G.norm(), 1e-6)) << "sample " << k;
  }
}

TEST(ElasticStress, KirchhoffIsPTimesFTransposed) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Mat3 F = random_f(rng, 0.6, 1.5);
    const Mat3 tau = kirchhoff_elastic(F, 1000.0, 2000.0);
    EXPECT_LT((tau - stress_elastic(F, 1000.0, 2000.0) * F.transpose()).norm(), 1e-9 * tau.norm());
  }
}

TEST(ElasticStress, InvertedFThrows) {
  EXPECT_THROW(stress_elastic(Vec3(-1.0, 1.0, 1.0).asDiagonal(), 1.0, 1.0), InvalidArgument);
}

TEST(PlasticStress, Examples) {
  EXPECT_EQ(stress_plastic(1.0, 1e4), Mat3::Zero());
  EXPECT_LT((stress_plastic(0.9, 1e4) + 1000.0 * Mat3::Identity()).norm(), 1e-9);
  EXPECT_LT((stress_plastic(1.2, 1e4) - 2000.0 * Mat3::Identity()).norm(), 1e-9);
}

TEST(PlasticStress, HasNoDeviatoricPart) {
  for (double J : {0.5, 0.93, 1.0, 1.07, 1.8}) {
    const Mat3 s = stress_plastic(J, 2.3e4);
    // Pure pressure: equal diagonal, zero shear.
    EXPECT_EQ(s, s(0, 0) * Mat3::Identity());
  }
}

TEST(ReturnMap, IdentityIsInsideYieldSurface) {
  EXPECT_LT((return_map_vonmises(Mat3::Identity(), 1e4, 100.0) - Mat3::Identity()).norm(), 1e-15);
}

TEST(ReturnMap, SmallShearIsUnchanged) {
  // Pick the shear so that |2 mu dev(eps)| is half the yield stress.
  const double mu = 1e4, yield = 100.0;
  Mat3 F = Mat3::Identity();
  double g = 1e-3;
  for (int it = 0; it < 60; ++it) {
    F(0, 1) = g;
    g *= std::sqrt(0.5 * yield / deviatoric_kirchhoff_norm(F, mu));
  }
  F(0, 1) = g;
  ASSERT_NEAR(deviatoric_kirchhoff_norm(F, mu), 0.5 * yield, 1e-9);
  EXPECT_LT((return_map_vonmises(F, mu, yield) - F).norm(), 1e-12);
}

TEST(ReturnMap, StretchProjectsOntoYieldSurface) {
  const Mat3 F = Vec3(2.0, 0.5, 1.0).asDiagonal();
  const double mu = 1e4, yield = 100.0;
  const Mat3 out = return_map_vonmises(F, mu, yield);
  EXPECT_NEAR(deviatoric_kirchhoff_norm(out, mu), yield, 1e-6 * yield);
  EXPECT_NEAR(out.determinant(), F.determinant(), 1e-9);
  // Independent 40-digit evaluation of exp(log(s) * yield / |2 mu dev log s|).
  EXPECT_NEAR(out(0, 0), 1.0035417912781434, 1e-12);
  EXPECT_NEAR(out(1, 1), 0.99647070873487744, 1e-12);
  EXPECT_NEAR(out(2, 2), 1.0, 1e-12);
}

TEST(ReturnMap, IdempotentAndIsochoricOnRandomF) {
  std::mt19937_64 rng(7);
  const double mu = 3703.7, yield = 150.0;
  for (int k = 0; k < 1000; ++k) {
    const Mat3 F = random_f(rng, 0.5, 2.0);
    const Mat3 once = return_map_vonmises(F, mu, yield);
    const Mat3 twice = return_map_vonmises(once, mu, yield);
    EXPECT_LT((twice - once).cwiseAbs().maxCoeff(), 1e-9) << "sample " << k;
    EXPECT_LT(std::abs(once.determinant() / F.determinant() - 1.0), 1e-9) << "sample " << k;
    EXPECT_LE(deviatoric_kirchhoff_norm(once, mu), yield * (1.0 + 1e-9));
  }
}

TEST(Svd, ProperRotationsAndPositiveSigma) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const Mat3 F = random_f(rng, 0.3, 3.0);
    const auto s = signed_svd(F);
    EXPECT_NEAR(s.U.determinant(), 1.0, 1e-12);
    EXPECT_NEAR(s.V.determinant(), 1.0, 1e-12);
    EXPECT_GT(s.sigma.minCoeff(), 0.0);
    EXPECT_LT((s.U * s.sigma.asDiagonal() * s.V.transpose() - F).norm(), 1e-12 * F.norm());
    const Mat3 R = polar_rotation(F);
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), 1e-12);
  }
}
