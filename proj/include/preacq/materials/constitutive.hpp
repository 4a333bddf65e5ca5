#pragma once

#include "preacq/common.hpp"
#include "preacq/materials/material.hpp"

namespace preacq::materials {

/// F = U diag(sigma) V^T with U, V proper rotations. For det(F) > 0 every
/// sigma is positive.
struct SignedSvd {
  Mat3 U;
  Vec3 sigma;
  Mat3 V;
};
SignedSvd signed_svd(const Mat3& F);

/// Rotation part of F = R S with det(R) = +1. F must have det(F) > 0.
Mat3 polar_rotation(const Mat3& F);

/// Fixed-corotated energy density
///   psi(F) = mu |F - R|_F^2 + lambda/2 (J - 1)^2.
double corotated_energy(const Mat3& F, double mu, double lambda);

/// First Piola-Kirchhoff stress of the fixed-corotated model,
///   P(F) = 2 mu (F - R) + lambda (J - 1) J F^-T.
/// Throws InvalidArgument when det(F) <= 0.
Mat3 stress_elastic(const Mat3& F, double mu, double lambda);
Mat3 stress_elastic(const Mat3& F, const MaterialParams& params);

/// Kirchhoff stress P F^T of the fixed-corotated model. This is the form the
/// particle-to-grid transfer consumes; it avoids the inverse in P.
Mat3 kirchhoff_elastic(const Mat3& F, double mu, double lambda);

/// Cauchy stress of the fluid-like class: kappa (J - 1) I.
Mat3 stress_plastic(double J, double bulk_modulus);
Mat3 stress_plastic(double J, const MaterialParams& params);

/// Von Mises return map on Hencky strain. With F = U diag(s) V^T and
/// eps = log s, the deviatoric part is scaled back onto |2 mu dev(eps)| = yield
/// when it lies outside; tr(eps) is preserved, so det(F) is too.
Mat3 return_map_vonmises(const Mat3& F_trial, double mu, double yield_stress);
Mat3 return_map_vonmises(const Mat3& F_trial, const MaterialParams& params);

/// |2 mu dev(log s)| for the singular values s of F.
double deviatoric_kirchhoff_norm(const Mat3& F, double mu);

}  // namespace preacq::materials
