#include "preacq/actions/item_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace preacq::actions {

namespace {

Vec3 sign_fixed(Vec3 axis) {
  Eigen::Index k = 0;
  axis.cwiseAbs().maxCoeff(&k);
  if (axis[k] < 0.0) axis = -axis;
  return axis;
}

std::int64_t cell_key(std::int64_t i, std::int64_t j, std::int64_t k) {
  // 21 bits per axis, offset so negative cells stay distinct.
  constexpr std::int64_t off = 1 << 20;
  return ((i + off) << 42) | ((j + off) << 21) | (k + off);
}

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

}  // namespace

ItemGeometry item_geometry(const std::vector<sim::Particle>& particles, double plane_height) {
  if (particles.size() < 4) throw InvalidArgument("item geometry needs at least 4 particles");
  ItemGeometry g;
  g.particle_count = particles.size();
  double m = 0.0;
  Vec3 c = Vec3::Zero();
  for (const auto& p : particles) {
    c += p.mass * p.x;
    m += p.mass;
  }
  if (!(m > 0.0)) throw InvalidArgument("item has no mass");
  c /= m;
  Mat3 cov = Mat3::Zero();
  for (const auto& p : particles) {
    const Vec3 d = p.x - c;
    cov += p.mass * d * d.transpose();
  }
  cov /= m;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  for (int k = 0; k < 3; ++k) {
    const int src = 2 - k;  // eigenvalues ascend
    g.axes.col(k) = sign_fixed(eig.eigenvectors().col(src));
    g.extents[k] = std::sqrt(12.0 * std::max(0.0, eig.eigenvalues()[src]));
  }
  g.centroid = c;

  // Column heights on a grid of particle-sized cells.
  double vol = 0.0;
  for (const auto& p : particles) vol += p.volume;
  const double cell = std::cbrt(vol / static_cast<double>(particles.size()));
  const double splat = 0.5 * cell;
  std::unordered_map<std::int64_t, double> tops;
  for (const auto& p : particles) {
    const auto i = static_cast<std::int64_t>(std::floor(p.x.x() / cell));
    const auto k = static_cast<std::int64_t>(std::floor(p.x.z() / cell));
    const double h = std::max(0.0, p.x.y() + splat - plane_height);
    auto [it, inserted] = tops.emplace(cell_key(i, 0, k), h);
    if (!inserted) it->second = std::max(it->second, h);
  }
  double sum = 0.0;
  for (const auto& [key, h] : tops) {
    sum += h;
    g.max_height = std::max(g.max_height, h);
  }
  g.footprint_area = static_cast<double>(tops.size()) * cell * cell;
  g.mean_height = sum / static_cast<double>(tops.size());
  return g;
}

ItemGeometry item_geometry(const sim::SimWorld& world, ItemId item, double plane_height) {
  std::vector<sim::Particle> sel;
  for (const auto& p : world.particles) {
    if (p.item == item) sel.push_back(p);
  }
  return item_geometry(sel, plane_height);
}

Vec3 horizontal_major_axis(const std::vector<sim::Particle>& particles) {
  if (particles.size() < 2) throw InvalidArgument("horizontal axis needs at least 2 particles");
  double m = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : particles) {
    c += p.mass * Eigen::Vector2d(p.x.x(), p.x.z());
    m += p.mass;
  }
  c /= m;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : particles) {
    const Eigen::Vector2d d = Eigen::Vector2d(p.x.x(), p.x.z()) - c;
    cov += p.mass * d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d a = eig.eigenvectors().col(1);
  return sign_fixed(Vec3(a.x(), 0.0, a.y()).normalized());
}

std::vector<std::uint32_t> connected_components(const std::vector<Vec3>& points, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("component radius must be positive");
  const std::size_t n = points.size();
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells;
  cells.reserve(n);
  auto cell_of = [&](const Vec3& x) {
    return Eigen::Matrix<std::int64_t, 3, 1>(static_cast<std::int64_t>(std::floor(x.x() / radius)),
                                             static_cast<std::int64_t>(std::floor(x.y() / radius)),
                                             static_cast<std::int64_t>(std::floor(x.z() / radius)));
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = cell_of(points[i]);
    cells[cell_key(c[0], c[1], c[2])].push_back(static_cast<std::uint32_t>(i));
  }
  const double r2 = radius * radius;
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = cell_of(points[i]);
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int d = -1; d <= 1; ++d) {
          auto it = cells.find(cell_key(c[0] + a, c[1] + b, c[2] + d));
          if (it == cells.end()) continue;
          for (std::uint32_t j : it->second) {
            if (j <= i) continue;
            if ((points[i] - points[j]).squaredNorm() <= r2) {
              uf.unite(static_cast<std::uint32_t>(i), j);
            }
          }
        }
  }
  std::vector<std::uint32_t> labels(n);
  std::unordered_map<std::uint32_t, std::uint32_t> dense;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
    auto [it, inserted] = dense.emplace(root, static_cast<std::uint32_t>(dense.size()));
    labels[i] = it->second;
  }
  return labels;
}

std::size_t component_count(const std::vector<std::uint32_t>& labels) {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

}  // namespace preacq::actions
