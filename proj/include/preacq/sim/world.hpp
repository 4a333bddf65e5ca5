#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "preacq/common.hpp"
#include "preacq/materials/material.hpp"
#include "preacq/tools/sdf.hpp"
#include "preacq/tools/trajectory.hpp"

namespace preacq::sim {

struct Particle {
  Vec3 x = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 C = Mat3::Zero();  // affine velocity, 1/s
  Mat3 F = Mat3::Identity();
  double Jp = 1.0;  // volume ratio carried by the fluid-like class
  double mass = 0.0;
  double volume = 0.0;  // rest volume
  std::uint32_t material = 0;
  ItemId item = kBackground;
};

enum class ToolRole : std::uint8_t { Plate, Fork, Other };

/// A kinematic tool. Its trajectory runs on a local clock that reads zero at
/// world time `clock_start`.
struct ToolBinding {
  std::string name;
  std::shared_ptr<const tools::ToolShape> shape;
  tools::ToolTrajectory trajectory;
  ToolRole role = ToolRole::Other;
  double clock_start = 0.0;
  // Coulomb coefficient used when the role does not pick one from the
  // particles' materials.
  double friction = 0.5;

  double local_time(double world_time) const { return world_time - clock_start; }
};

struct SimConfig {
  double domain_size = 0.5;  // m, cube edge
  Vec3 domain_origin = Vec3::Zero();
  int grid_dims = 64;        // nodes per axis
  double dt = 2e-4;          // s
  Vec3 gravity = Vec3(0.0, -9.81, 0.0);
  double contact_threshold = 0.5;  // in units of dx
  int sticky_layers = 2;
  double cfl = 0.5;  // max |v| dt / dx

  double dx() const { return domain_size / grid_dims; }
  void validate() const;
};

/// Scratch background grid. Copies are empty; storage is allocated on the
/// first transfer.
class Grid {
 public:
  Grid() = default;
  Grid(const Grid&) {}
  Grid& operator=(const Grid&) {
    clear_storage();
    return *this;
  }
  Grid(Grid&&) noexcept = default;
  Grid& operator=(Grid&&) noexcept = default;

  struct Node {
    double mass = 0.0;
    Vec3 momentum = Vec3::Zero();  // velocity after grid_update
    double friction_plate = 0.0;   // sum w m mu_plate
    double friction_fork = 0.0;    // sum w m mu_fork
  };

  void ensure(int dims);
  void reset();
  void clear_storage();

  int dims() const { return dims_; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_ + j) * dims_ + k;
  }
  Eigen::Vector3i coords(std::size_t idx) const;
  Node& node(std::size_t idx) { return nodes_[idx]; }
  const Node& node(std::size_t idx) const { return nodes_[idx]; }
  void touch(std::size_t idx) {
    if (!touched_[idx]) {
      touched_[idx] = 1;
      active_.push_back(static_cast<std::uint32_t>(idx));
    }
  }
  /// Nodes that received particle weight since the last reset, in first-touch order.
  const std::vector<std::uint32_t>& active() const { return active_; }

  double total_mass() const;
  Vec3 total_momentum() const;

 private:
  int dims_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint8_t> touched_;
  std::vector<std::uint32_t> active_;
};

struct EnergyReport {
  double kinetic = 0.0;
  double gravitational = 0.0;  // relative to the domain origin
  double elastic = 0.0;
  double total() const { return kinetic + gravitational + elastic; }
};

/// MLS-MPM state: particles, background grid and kinematic tools.
class SimWorld {
 public:
  SimWorld() = default;
  explicit SimWorld(SimConfig config);

  SimConfig config;
  std::vector<materials::MaterialParams> materials;
  std::vector<Particle> particles;
  std::vector<ToolBinding> tools;
  double time = 0.0;
  std::int64_t step_index = 0;

  double dx() const { return config.dx(); }
  Vec3 node_position(int i, int j, int k) const {
    return config.domain_origin + dx() * Vec3(i, j, k);
  }

  /// Zeroes the grid scratch.
  void clear_grid();
  /// Particle-to-grid transfer of mass, momentum and stress.
  void p2g();
  /// Grid velocities with gravity, tool contact and sticky walls.
  void grid_update();
  /// Grid-to-particle gather, advection, F update and plasticity.
  void g2p();
  /// One full timestep.
  void step();
  /// Runs ceil(duration / dt) steps. The callback sees the world after each step.
  void run(double duration, const std::function<void(const SimWorld&)>& on_step = {});

  std::size_t tool_index(const std::string& name) const;
  const Grid& grid() const { return grid_; }

  double total_mass() const;
  Vec3 total_momentum() const;
  Vec3 center_of_mass() const;
  Vec3 center_of_mass(ItemId item) const;
  double max_speed() const;
  EnergyReport energy() const;
  std::vector<ItemId> item_ids() const;

  /// Kirchhoff stress P F^T of one particle.
  Mat3 kirchhoff(const Particle& p) const;

 private:
  Grid grid_;
};

/// Coulomb projection of a relative velocity against a contact normal. Only
/// approaching motion (v.n < 0) is altered: the normal part is removed and
/// the tangential speed reduced by mu |v.n|, clamped at zero.
Vec3 coulomb_project(const Vec3& v_rel, const Vec3& normal, double mu);

/// Steps needed to cover `duration` at timestep dt.
std::int64_t steps_for(double duration, double dt);

}  // namespace preacq::sim
