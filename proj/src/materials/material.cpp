#include "preacq/materials/material.hpp"

#include <cmath>

namespace preacq::materials {

std::string to_string(ModelClass model) {
  switch (model) {
    case ModelClass::Elastic:
      return "elastic";
    case ModelClass::Plastic:
      return "plastic";
    case ModelClass::Elastoplastic:
      return "elastoplastic";
  }
  return "unknown";
}

ModelClass model_class_from_string(const std::string& name) {
  if (name == "elastic") return ModelClass::Elastic;
  if (name == "plastic") return ModelClass::Plastic;
  if (name == "elastoplastic") return ModelClass::Elastoplastic;
  throw InvalidArgument("unknown material model class '" + name + "'");
}

LameParams lame_from_young_poisson(double young_modulus, double poisson_ratio) {
  if (!(young_modulus > 0.0)) {
    throw InvalidArgument("Young's modulus must be positive");
  }
  if (!(poisson_ratio >= 0.0)) {
    throw InvalidArgument("Poisson ratio must be non-negative");
  }
  if (!(poisson_ratio < 0.5)) {
    throw InvalidArgument("Poisson ratio >= 0.5 describes an incompressible material");
  }
  const double E = young_modulus;
  const double nu = poisson_ratio;
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

MaterialParams MaterialParams::make(std::string category, ModelClass model, double young_modulus,
                                    double poisson_ratio, double mass_density,
                                    double yield_stress) {
  MaterialParams p;
  p.category = std::move(category);
  p.model = model;
  p.young_modulus = young_modulus;
  p.poisson_ratio = poisson_ratio;
  p.mass_density = mass_density;
  p.yield_stress = yield_stress;
  p.refresh_lame();
  return p;
}

void MaterialParams::refresh_lame() {
  const LameParams lame = lame_from_young_poisson(young_modulus, poisson_ratio);
  lame_lambda = lame.lambda;
  lame_mu = lame.mu;
}

void MaterialParams::validate() const {
  const LameParams lame = lame_from_young_poisson(young_modulus, poisson_ratio);
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(b), 1e-300);
  };
  if (!close(lame_lambda, lame.lambda) && !(lame.lambda == 0.0 && lame_lambda == 0.0)) {
    throw InvalidArgument(category + ": lambda inconsistent with (E, nu)");
  }
  if (!close(lame_mu, lame.mu)) {
    throw InvalidArgument(category + ": mu inconsistent with (E, nu)");
  }
  if (model == ModelClass::Elastoplastic && !(yield_stress > 0.0)) {
    throw InvalidArgument(category + ": elastoplastic material needs a positive yield stress");
  }
  if (!(mass_density > 0.0)) throw InvalidArgument(category + ": mass density must be positive");
  if (!(sampling_density > 0.0)) {
    throw InvalidArgument(category + ": sampling density must be positive");
  }
  if (friction_plate < 0.0 || friction_fork < 0.0) {
    throw InvalidArgument(category + ": friction coefficients must be non-negative");
  }
}

MaterialRegistry MaterialRegistry::defaults() {
  using enum ModelClass;
  constexpr double nu = 0.35;
  MaterialRegistry r;
  // Elastic solids.
  r.set(MaterialParams::make("jello", Elastic, 5e3, nu, 1050.0));
  r.set(MaterialParams::make("tofu", Elastic, 1e4, nu, 1060.0));
  r.set(MaterialParams::make("banana", Elastic, 3e4, nu, 950.0));
  r.set(MaterialParams::make("avocado", Elastic, 2e4, nu, 1000.0));
  // Elastoplastic: Bingham-like pastes, noodles and crumbly cake.
  r.set(MaterialParams::make("red_velvet", Elastoplastic, 8e3, nu, 450.0, 200.0));
  r.set(MaterialParams::make("mashed_potato", Elastoplastic, 1e4, nu, 1100.0, 150.0));
  r.set(MaterialParams::make("oatmeal", Elastoplastic, 5e3, nu, 1050.0, 80.0));
  r.set(MaterialParams::make("spaghetti", Elastoplastic, 1e4, nu, 1100.0, 300.0));
  // Fluid-like surrogates for granular piles.
  r.set(MaterialParams::make("rice", Plastic, 2e4, nu, 800.0));
  r.set(MaterialParams::make("mac_and_cheese", Plastic, 2e4, nu, 1000.0));
  // Generic entries for tests and ad-hoc scenes.
  r.set(MaterialParams::make("elastic", Elastic, 1e4, nu, 1000.0));
  r.set(MaterialParams::make("plastic", Plastic, 2e4, nu, 1000.0));
  r.set(MaterialParams::make("elastoplastic", Elastoplastic, 1e4, nu, 1000.0, 150.0));
  return r;
}

bool MaterialRegistry::contains(const std::string& category) const {
  return table_.count(category) != 0;
}

const MaterialParams& MaterialRegistry::at(const std::string& category) const {
  auto it = table_.find(category);
  if (it == table_.end()) throw InvalidArgument("unknown food category '" + category + "'");
  return it->second;
}

void MaterialRegistry::set(MaterialParams params) {
  params.validate();
  std::string key = params.category;
  table_[key] = std::move(params);
}

std::vector<std::string> MaterialRegistry::categories() const {
  std::vector<std::string> out;
  out.reserve(table_.size());
  for (const auto& [name, _] : table_) out.push_back(name);
  return out;
}

bool is_noodle(const std::string& category) {
  return category == "spaghetti" || category == "noodle" || category == "noodles";
}

}  // namespace preacq::materials
