#pragma once

#include <string>

#include "preacq/sim/world.hpp"

namespace preacq::sim {

// Checkpoint layout, all little-endian:
//   char[8]  magic "PQCKPT01"
//   u32      version (1)
//   u64      particle count N
//   f64      world time
//   i64      step index
//   N records of:
//     f64[3] x, f64[3] v, f64[9] C (row-major), f64[9] F (row-major),
//     f64 Jp, f64 mass, f64 volume, u32 material, u32 item
// Tools, materials and grid configuration are not stored; load into a world
// built from the same scene.

void save_checkpoint(const SimWorld& world, const std::string& path);

/// Replaces world.particles, time and step index. Throws IoError on malformed
/// files and InvalidArgument when a material index is out of range.
void load_checkpoint(SimWorld& world, const std::string& path);

}  // namespace preacq::sim
