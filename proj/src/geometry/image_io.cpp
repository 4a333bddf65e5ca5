#include "preacq/geometry/image_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace preacq::geometry {
namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

int parse_dim(const std::string& tok, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad image dimension '" + tok + "'");
  }
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap32(v);
  }
  return v;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const DepthMap& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "Pf\n" << depth.width << ' ' << depth.height << "\n-1.0\n";
  for (int v = depth.height - 1; v >= 0; --v) {
    for (int u = 0; u < depth.width; ++u) {
      const float f = static_cast<float>(depth.at(u, v));
      const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

DepthMap read_pfm(const std::filesystem::path& path, double pixel_pitch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (next_token(in) != "Pf") throw IoError(path.string() + ": not a greyscale PFM");
  const int w = parse_dim(next_token(in), path);
  const int h = parse_dim(next_token(in), path);
  double scale = 0.0;
  try {
    scale = std::stod(next_token(in));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad PFM scale");
  }
  const bool little = scale < 0.0;
  DepthMap d = DepthMap::zeros(w, h, pixel_pitch);
  for (int v = h - 1; v >= 0; --v) {
    for (int u = 0; u < w; ++u) {
      std::uint32_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof(bits))) {
        throw IoError(path.string() + ": truncated PFM raster");
      }
      const bool swap = little != (std::endian::native == std::endian::little);
      if (swap) bits = __builtin_bswap32(bits);
      d.at(u, v) = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return d;
}

void write_pgm(const std::filesystem::path& path, const SegMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(mask.labels.data()),
            static_cast<std::streamsize>(mask.labels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

SegMask read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (next_token(in) != "P5") throw IoError(path.string() + ": not a binary PGM");
  const int w = parse_dim(next_token(in), path);
  const int h = parse_dim(next_token(in), path);
  const int maxval = parse_dim(next_token(in), path);
  if (maxval > 255) throw IoError(path.string() + ": only 8-bit PGM masks are supported");
  SegMask m = SegMask::background(w, h);
  if (!in.read(reinterpret_cast<char*>(m.labels.data()),
               static_cast<std::streamsize>(m.labels.size()))) {
    throw IoError(path.string() + ": truncated PGM raster");
  }
  return m;
}

}  // namespace preacq::geometry
