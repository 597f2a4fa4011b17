#pragma once

#include "mrav/types.hpp"

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace mrav {

/// Approximately uniform unit directions, closed under negation.
struct DirectionGrid {
  std::vector<Vec3> dirs;
  int resolution = 0;

  std::size_t size() const { return dirs.size(); }

  /// Fibonacci lattice on the upper hemisphere mirrored through the origin.
  /// `n` is rounded up to an even count.
  static DirectionGrid fibonacci(int n) {
    DirectionGrid g;
    const int half = std::max(1, (n + 1) / 2);
    g.resolution = 2 * half;
    g.dirs.reserve(2 * half);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < half; ++i) {
      const double z = 1.0 - (i + 0.5) / half;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * i;
      g.dirs.emplace_back(r * std::cos(th), r * std::sin(th), z);
    }
    for (int i = 0; i < half; ++i) g.dirs.push_back(-g.dirs[i]);
    return g;
  }

  /// Angular covering radius estimate [rad] for a uniform grid of this size.
  double spacing() const {
    return dirs.empty() ? kPi : std::sqrt(4.0 * kPi / static_cast<double>(dirs.size()));
  }
};

/// Vertices of a geodesic icosphere with `level` edge subdivisions
/// (12, 42, 162, 642, ... vertices).
inline std::vector<Vec3> icosphere_vertices(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  return v;
}

}  // namespace mrav
