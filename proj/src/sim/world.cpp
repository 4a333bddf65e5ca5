#include "preacq/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "preacq/materials/constitutive.hpp"

namespace preacq::sim {

namespace {

struct Stencil {
  Eigen::Vector3i base;
  Vec3 fx;         // position relative to base, in cells
  double w[3][3];  // w[axis][offset]
};

// Returns false when the 3x3x3 stencil would leave the grid.
bool make_stencil(const Vec3& x, const Vec3& origin, double inv_dx, int dims, Stencil& s) {
  const Vec3 g = (x - origin) * inv_dx;
  for (int a = 0; a < 3; ++a) {
    if (!std::isfinite(g[a])) return false;
    const double b = std::floor(g[a] - 0.5);
    if (b < 0.0 || b + 2.0 >= dims) return false;
    s.base[a] = static_cast<int>(b);
    const double f = g[a] - b;
    s.fx[a] = f;
    s.w[a][0] = 0.5 * (1.5 - f) * (1.5 - f);
    s.w[a][1] = 0.75 - (f - 1.0) * (f - 1.0);
    s.w[a][2] = 0.5 * (f - 0.5) * (f - 0.5);
  }
  return true;
}

std::string particle_message(const char* what, std::size_t p, std::int64_t step) {
  std::ostringstream os;
  os << what << " (particle " << p << ", step " << step << ")";
  return os.str();
}

}  // namespace

void SimConfig::validate() const {
  if (!(domain_size > 0.0)) throw InvalidArgument("domain size must be positive");
  if (grid_dims < 8) throw InvalidArgument("grid needs at least 8 nodes per axis");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(contact_threshold >= 0.0)) throw InvalidArgument("contact threshold must be >= 0");
  if (sticky_layers < 0) throw InvalidArgument("sticky layer count must be >= 0");
  if (!(cfl > 0.0)) throw InvalidArgument("CFL bound must be positive");
}

void Grid::ensure(int dims) {
  if (dims_ == dims && !nodes_.empty()) return;
  dims_ = dims;
  const std::size_t n = static_cast<std::size_t>(dims) * dims * dims;
  nodes_.assign(n, Node{});
  touched_.assign(n, 0);
  active_.clear();
}

void Grid::reset() {
  for (std::uint32_t idx : active_) {
    nodes_[idx] = Node{};
    touched_[idx] = 0;
  }
  active_.clear();
}

void Grid::clear_storage() {
  dims_ = 0;
  nodes_.clear();
  nodes_.shrink_to_fit();
  touched_.clear();
  touched_.shrink_to_fit();
  active_.clear();
}

Eigen::Vector3i Grid::coords(std::size_t idx) const {
  const std::size_t n = static_cast<std::size_t>(dims_);
  return Eigen::Vector3i(static_cast<int>(idx / (n * n)), static_cast<int>((idx / n) % n),
                         static_cast<int>(idx % n));
}

double Grid::total_mass() const {
  CompensatedSum<double> m;
  for (std::uint32_t idx : active_) m.add(nodes_[idx].mass);
  return m.value();
}

Vec3 Grid::total_momentum() const {
  CompensatedSum<Vec3> p;
  for (std::uint32_t idx : active_) p.add(nodes_[idx].momentum);
  return p.value();
}

SimWorld::SimWorld(SimConfig cfg) : config(std::move(cfg)) { config.validate(); }

void SimWorld::clear_grid() {
  grid_.ensure(config.grid_dims);
  grid_.reset();
}

Mat3 SimWorld::kirchhoff(const Particle& p) const {
  const auto& mat = materials.at(p.material);
  switch (mat.model) {
    case materials::ModelClass::Plastic: {
      const double J = p.Jp;
      return (J * mat.bulk_modulus() * (J - 1.0)) * Mat3::Identity();
    }
    case materials::ModelClass::Elastic:
    case materials::ModelClass::Elastoplastic:
      return materials::kirchhoff_elastic(p.F, mat.lame_mu, mat.lame_lambda);
  }
  return Mat3::Zero();
}

void SimWorld::p2g() {
  grid_.ensure(config.grid_dims);
  const double dx = config.dx();
  const double inv_dx = 1.0 / dx;
  const double dt = config.dt;
  const int n = config.grid_dims;
  Stencil s;
  for (std::size_t pi = 0; pi < particles.size(); ++pi) {
    const Particle& p = particles[pi];
    if (!make_stencil(p.x, config.domain_origin, inv_dx, n, s)) {
      throw SimulationError(SimulationError::Kind::Blowup, static_cast<std::int64_t>(pi),
                            step_index,
                            particle_message("particle left the grid stencil region", pi,
                                             step_index));
    }
    const auto& mat = materials.at(p.material);
    const Mat3 affine = p.mass * p.C - (4.0 * inv_dx * inv_dx * dt * p.volume) * kirchhoff(p);
    const Vec3 mv = p.mass * p.v;
    const double m_plate = p.mass * mat.friction_plate;
    const double m_fork = p.mass * mat.friction_fork;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double wab = s.w[0][a] * s.w[1][b];
        for (int c = 0; c < 3; ++c) {
          const double w = wab * s.w[2][c];
          const Vec3 dpos = (Vec3(a, b, c) - s.fx) * dx;
          const std::size_t idx = grid_.index(s.base[0] + a, s.base[1] + b, s.base[2] + c);
          grid_.touch(idx);
          Grid::Node& node = grid_.node(idx);
          node.mass += w * p.mass;
          node.momentum += w * (mv + affine * dpos);
          node.friction_plate += w * m_plate;
          node.friction_fork += w * m_fork;
        }
      }
    }
  }
}

void SimWorld::grid_update() {
  const double dx = config.dx();
  const double dt = config.dt;
  const int n = config.grid_dims;
  const int lo = config.sticky_layers;
  const int hi = n - config.sticky_layers;
  const double threshold = config.contact_threshold * dx;
  const double h = 1e-4 * dx;

  struct ToolState {
    const ToolBinding* binding;
    tools::Pose pose;
    Vec3 linear;
    Vec3 angular;
  };
  std::vector<ToolState> states;
  states.reserve(tools.size());
  for (const auto& tb : tools) {
    if (!tb.shape || tb.trajectory.empty()) continue;
    ToolState st{&tb, {}, Vec3::Zero(), Vec3::Zero()};
    const double t = tb.local_time(time);
    st.pose = tb.trajectory.pose_at(t);
    tb.trajectory.twist_at(t, st.linear, st.angular);
    states.push_back(st);
  }

  for (std::uint32_t idx : grid_.active()) {
    Grid::Node& node = grid_.node(idx);
    if (node.mass <= 0.0) {
      node.momentum.setZero();
      continue;
    }
    Vec3 v = node.momentum / node.mass + dt * config.gravity;
    const Eigen::Vector3i ijk = grid_.coords(idx);
    if ((ijk.array() < lo).any() || (ijk.array() >= hi).any()) {
      node.momentum.setZero();
      continue;
    }
    const Vec3 xi = node_position(ijk[0], ijk[1], ijk[2]);
    for (const ToolState& st : states) {
      const double phi = sdf_eval(*st.binding->shape, st.pose, xi);
      if (!(phi < threshold)) continue;
      const Vec3 nrm = sdf_normal(*st.binding->shape, st.pose, xi, h);
      const Vec3 v_tool = st.linear + st.angular.cross(xi - st.pose.translation);
      double mu = st.binding->friction;
      if (st.binding->role == ToolRole::Plate) mu = node.friction_plate / node.mass;
      if (st.binding->role == ToolRole::Fork) mu = node.friction_fork / node.mass;
      v = coulomb_project(v - v_tool, nrm, mu) + v_tool;
    }
    node.momentum = v;
  }
}

Vec3 coulomb_project(const Vec3& v_rel, const Vec3& normal, double mu) {
  const double vn = v_rel.dot(normal);
  if (!(vn < 0.0)) return v_rel;
  const Vec3 vt = v_rel - vn * normal;
  const double vt_norm = vt.norm();
  if (vt_norm <= 0.0) return Vec3::Zero();
  const double speed = std::max(0.0, vt_norm + mu * vn);
  return vt * (speed / vt_norm);
}

void SimWorld::g2p() {
  const double dx = config.dx();
  const double inv_dx = 1.0 / dx;
  const double dt = config.dt;
  const int n = config.grid_dims;
  Stencil s;
  for (std::size_t pi = 0; pi < particles.size(); ++pi) {
    Particle& p = particles[pi];
    if (!make_stencil(p.x, config.domain_origin, inv_dx, n, s)) {
      throw SimulationError(SimulationError::Kind::Blowup, static_cast<std::int64_t>(pi),
                            step_index,
                            particle_message("particle left the grid stencil region", pi,
                                             step_index));
    }
    Vec3 v = Vec3::Zero();
    Mat3 B = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double wab = s.w[0][a] * s.w[1][b];
        for (int c = 0; c < 3; ++c) {
          const double w = wab * s.w[2][c];
          const Vec3 dpos = (Vec3(a, b, c) - s.fx) * dx;
          const std::size_t idx = grid_.index(s.base[0] + a, s.base[1] + b, s.base[2] + c);
          const Vec3& vi = grid_.node(idx).momentum;
          v += w * vi;
          B += (w * vi) * dpos.transpose();
        }
      }
    }
    p.v = v;
    p.C = (4.0 * inv_dx * inv_dx) * B;
    p.x += dt * v;
    const Mat3 dF = Mat3::Identity() + dt * p.C;
    const auto& mat = materials.at(p.material);
    switch (mat.model) {
      case materials::ModelClass::Elastic:
        p.F = dF * p.F;
        break;
      case materials::ModelClass::Elastoplastic:
        p.F = dF * p.F;
        if (p.F.determinant() > 0.0) p.F = materials::return_map_vonmises(p.F, mat.lame_mu, mat.yield_stress);
        break;
      case materials::ModelClass::Plastic:
        p.Jp *= dF.determinant();
        if (p.Jp > 0.0) p.F = std::cbrt(p.Jp) * Mat3::Identity();
        else p.F = dF * p.F;
        break;
    }
    if (!(p.F.determinant() > 0.0)) {
      throw SimulationError(SimulationError::Kind::Inversion, static_cast<std::int64_t>(pi),
                            step_index,
                            particle_message("deformation gradient inverted", pi, step_index));
    }
  }
}

void SimWorld::step() {
  clear_grid();
  p2g();
  grid_update();
  g2p();
  time += config.dt;
  ++step_index;
  const double limit = config.cfl * config.dx();
  for (std::size_t pi = 0; pi < particles.size(); ++pi) {
    if (!(particles[pi].v.norm() * config.dt <= limit)) {
      throw SimulationError(SimulationError::Kind::CflViolation, static_cast<std::int64_t>(pi),
                            step_index,
                            particle_message("CFL bound exceeded; dt too large", pi, step_index));
    }
  }
}

std::int64_t steps_for(double duration, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(duration > 0.0)) return 0;
  // Tolerate rounding in duration/dt so 0.1 / 2e-4 gives 500, not 501.
  return static_cast<std::int64_t>(std::ceil(duration / dt - 1e-9));
}

void SimWorld::run(double duration, const std::function<void(const SimWorld&)>& on_step) {
  const std::int64_t n = steps_for(duration, config.dt);
  for (std::int64_t i = 0; i < n; ++i) {
    step();
    if (on_step) on_step(*this);
  }
}

std::size_t SimWorld::tool_index(const std::string& name) const {
  for (std::size_t i = 0; i < tools.size(); ++i) {
    if (tools[i].name == name) return i;
  }
  throw InvalidArgument("no tool named '" + name + "'");
}

double SimWorld::total_mass() const {
  CompensatedSum<double> m;
  for (const auto& p : particles) m.add(p.mass);
  return m.value();
}

Vec3 SimWorld::total_momentum() const {
  CompensatedSum<Vec3> m;
  for (const auto& p : particles) m.add(p.mass * p.v);
  return m.value();
}

Vec3 SimWorld::center_of_mass() const {
  Vec3 s = Vec3::Zero();
  double m = 0.0;
  for (const auto& p : particles) {
    s += p.mass * p.x;
    m += p.mass;
  }
  if (m <= 0.0) throw InvalidArgument("center of mass of an empty world");
  return s / m;
}

Vec3 SimWorld::center_of_mass(ItemId item) const {
  Vec3 s = Vec3::Zero();
  double m = 0.0;
  for (const auto& p : particles) {
    if (p.item != item) continue;
    s += p.mass * p.x;
    m += p.mass;
  }
  if (m <= 0.0) throw InvalidArgument("item " + std::to_string(item) + " has no particles");
  return s / m;
}

double SimWorld::max_speed() const {
  double s = 0.0;
  for (const auto& p : particles) s = std::max(s, p.v.norm());
  return s;
}

EnergyReport SimWorld::energy() const {
  EnergyReport e;
  for (const auto& p : particles) {
    e.kinetic += 0.5 * p.mass * p.v.squaredNorm();
    e.gravitational -= p.mass * config.gravity.dot(p.x - config.domain_origin);
    const auto& mat = materials.at(p.material);
    if (mat.model == materials::ModelClass::Plastic) {
      e.elastic += p.volume * 0.5 * mat.bulk_modulus() * (p.Jp - 1.0) * (p.Jp - 1.0);
    } else if (p.F.determinant() > 0.0) {
      e.elastic += p.volume * materials::corotated_energy(p.F, mat.lame_mu, mat.lame_lambda);
    }
  }
  return e;
}

std::vector<ItemId> SimWorld::item_ids() const {
  std::set<ItemId> ids;
  for (const auto& p : particles) ids.insert(p.item);
  return {ids.begin(), ids.end()};
}

}  // namespace preacq::sim
