#include "preacq/sim/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace preacq::sim {

namespace {

constexpr char kMagic[8] = {'P', 'Q', 'C', 'K', 'P', 'T', '0', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    if constexpr (sizeof(T) == 4) return std::bit_cast<T>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
    if constexpr (sizeof(T) == 8) return std::bit_cast<T>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v)));
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put(const Vec3& v) {
    for (int i = 0; i < 3; ++i) put(v[i]);
  }
  void put(const Mat3& m) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) put(m(r, c));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, const std::string& path) : in_(in), path_(path) {}
  template <typename T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw IoError("truncated checkpoint " + path_);
    return to_little(v);
  }
  Vec3 vec() {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = get<double>();
    return v;
  }
  Mat3 mat() {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = get<double>();
    return m;
  }

 private:
  std::ifstream& in_;
  const std::string& path_;
};

}  // namespace

void save_checkpoint(const SimWorld& world, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, sizeof(kMagic));
  Writer w(out);
  w.put(kVersion);
  w.put(static_cast<std::uint64_t>(world.particles.size()));
  w.put(world.time);
  w.put(static_cast<std::int64_t>(world.step_index));
  for (const Particle& p : world.particles) {
    w.put(p.x);
    w.put(p.v);
    w.put(p.C);
    w.put(p.F);
    w.put(p.Jp);
    w.put(p.mass);
    w.put(p.volume);
    w.put(static_cast<std::uint32_t>(p.material));
    w.put(static_cast<std::uint32_t>(p.item));
  }
  if (!out) throw IoError("failed writing " + path);
}

void load_checkpoint(SimWorld& world, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError(path + " is not a checkpoint");
  }
  Reader r(in, path);
  if (r.get<std::uint32_t>() != kVersion) throw IoError("unsupported checkpoint version");
  const auto count = r.get<std::uint64_t>();
  const double time = r.get<double>();
  const auto step = r.get<std::int64_t>();
  std::vector<Particle> particles;
  particles.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) {
    Particle p;
    p.x = r.vec();
    p.v = r.vec();
    p.C = r.mat();
    p.F = r.mat();
    p.Jp = r.get<double>();
    p.mass = r.get<double>();
    p.volume = r.get<double>();
    p.material = r.get<std::uint32_t>();
    p.item = r.get<std::uint32_t>();
    if (p.material >= world.materials.size()) {
      throw InvalidArgument("checkpoint references unknown material index " +
                            std::to_string(p.material));
    }
    particles.push_back(p);
  }
  world.particles = std::move(particles);
  world.time = time;
  world.step_index = step;
}

}  // namespace preacq::sim
