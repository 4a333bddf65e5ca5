#include "preacq/materials/constitutive.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace preacq::materials {

SignedSvd signed_svd(const Mat3& F) {
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SignedSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (out.U.determinant() < 0.0) {
    out.U.col(2) *= -1.0;
    out.sigma(2) *= -1.0;
  }
  if (out.V.determinant() < 0.0) {
    out.V.col(2) *= -1.0;
    out.sigma(2) *= -1.0;
  }
  return out;
}

Mat3 polar_rotation(const Mat3& F) {
  const SignedSvd svd = signed_svd(F);
  return svd.U * svd.V.transpose();
}

double corotated_energy(const Mat3& F, double mu, double lambda) {
  const double J = F.determinant();
  const Mat3 R = polar_rotation(F);
  return mu * (F - R).squaredNorm() + 0.5 * lambda * (J - 1.0) * (J - 1.0);
}

Mat3 stress_elastic(const Mat3& F, double mu, double lambda) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw InvalidArgument("stress_elastic: det(F) must be positive");
  const Mat3 R = polar_rotation(F);
  return 2.0 * mu * (F - R) + lambda * (J - 1.0) * J * F.inverse().transpose();
}

Mat3 stress_elastic(const Mat3& F, const MaterialParams& params) {
  return stress_elastic(F, params.lame_mu, params.lame_lambda);
}

Mat3 kirchhoff_elastic(const Mat3& F, double mu, double lambda) {
  const double J = F.determinant();
  const Mat3 R = polar_rotation(F);
  return 2.0 * mu * (F - R) * F.transpose() + lambda * (J - 1.0) * J * Mat3::Identity();
}

Mat3 stress_plastic(double J, double bulk_modulus) {
  if (!(J > 0.0)) throw InvalidArgument("stress_plastic: J must be positive");
  return bulk_modulus * (J - 1.0) * Mat3::Identity();
}

Mat3 stress_plastic(double J, const MaterialParams& params) {
  return stress_plastic(J, params.bulk_modulus());
}

namespace {

Vec3 deviatoric(const Vec3& eps) { return eps.array() - eps.sum() / 3.0; }

Vec3 hencky_strain(const SignedSvd& svd) {
  if (!(svd.sigma.minCoeff() > 0.0)) {
    throw InvalidArgument("return_map_vonmises: degenerate deformation (zero singular value)");
  }
  return svd.sigma.array().log();
}

}  // namespace

double deviatoric_kirchhoff_norm(const Mat3& F, double mu) {
  const SignedSvd svd = signed_svd(F);
  return 2.0 * mu * deviatoric(hencky_strain(svd)).norm();
}

Mat3 return_map_vonmises(const Mat3& F_trial, double mu, double yield_stress) {
  if (!(F_trial.determinant() > 0.0)) {
    throw InvalidArgument("return_map_vonmises: det(F) must be positive");
  }
  const SignedSvd svd = signed_svd(F_trial);
  const Vec3 eps = hencky_strain(svd);
  const double trace = eps.sum();
  const Vec3 dev = deviatoric(eps);
  const double dev_norm = dev.norm();
  const double tau_norm = 2.0 * mu * dev_norm;
  if (tau_norm <= yield_stress) return F_trial;
  const Vec3 projected = dev * (yield_stress / tau_norm);
  const Vec3 eps_new = projected.array() + trace / 3.0;
  return svd.U * eps_new.array().exp().matrix().asDiagonal() * svd.V.transpose();
}

Mat3 return_map_vonmises(const Mat3& F_trial, const MaterialParams& params) {
  return return_map_vonmises(F_trial, params.lame_mu, params.yield_stress);
}

}  // namespace preacq::materials
