#pragma once

#include <map>
#include <string>
#include <vector>

#include "preacq/common.hpp"

namespace preacq::materials {

enum class ModelClass { Elastic, Plastic, Elastoplastic };

std::string to_string(ModelClass model);
ModelClass model_class_from_string(const std::string& name);

struct LameParams {
  double lambda = 0.0;
  double mu = 0.0;
};

/// lambda = E nu / ((1 + nu)(1 - 2 nu)), mu = E / (2 (1 + nu)).
/// Throws InvalidArgument for E <= 0 or nu outside [0, 0.5).
LameParams lame_from_young_poisson(double young_modulus, double poisson_ratio);

/// Per-category constitutive and contact parameters.
struct MaterialParams {
  std::string category;
  ModelClass model = ModelClass::Elastic;
  double young_modulus = 1e4;      // Pa
  double poisson_ratio = 0.35;
  double lame_lambda = 0.0;        // Pa
  double lame_mu = 0.0;            // Pa
  double yield_stress = 0.0;       // Pa, elastoplastic only
  double mass_density = 1000.0;    // kg/m^3
  double sampling_density = 1.7e7; // particles/m^3
  double friction_plate = 0.6;
  double friction_fork = 0.3;
  // True while the values are registry defaults rather than measured data.
  bool placeholder = true;

  double bulk_modulus() const { return lame_lambda + 2.0 * lame_mu / 3.0; }

  /// Builds params with lambda/mu derived from (E, nu).
  static MaterialParams make(std::string category, ModelClass model, double young_modulus,
                             double poisson_ratio, double mass_density, double yield_stress = 0.0);

  /// Recomputes lambda/mu after E or nu changed.
  void refresh_lame();

  void validate() const;
};

/// Category name -> default parameters.
class MaterialRegistry {
 public:
  /// The built-in table for the ten soft-diet foods plus generic classes.
  static MaterialRegistry defaults();

  bool contains(const std::string& category) const;
  const MaterialParams& at(const std::string& category) const;
  void set(MaterialParams params);
  std::vector<std::string> categories() const;

 private:
  std::map<std::string, MaterialParams> table_;
};

/// Categories that twirling applies to.
bool is_noodle(const std::string& category);

}  // namespace preacq::materials
