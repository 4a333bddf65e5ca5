#pragma once

#include <filesystem>

#include "preacq/geometry/raster.hpp"

namespace preacq::geometry {

// PFM: "Pf" greyscale, scale -1 (little-endian float32), rows stored bottom
// to top. Row v = 0 of a DepthMap is the top row of the image. The pitch is
// not part of the format and must be supplied on read.
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_pfm(const std::filesystem::path& path, double pixel_pitch);

// PGM: binary "P5", maxval 255, label = pixel value, rows top to bottom.
void write_pgm(const std::filesystem::path& path, const SegMask& mask);
SegMask read_pgm(const std::filesystem::path& path);

}  // namespace preacq::geometry
