#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgntk {

using Points = std::vector<std::vector<double>>;

enum class Geometry { Sphere, Freeform };

struct Dataset {
  Points inputs;
  Points targets;
  Geometry geometry = Geometry::Freeform;
  double radius = 1.0;  // meaningful for Sphere

  std::size_t size() const noexcept { return inputs.size(); }
  /// Sphere datasets: every input has norm `radius` within 1e-12.
  void validate() const;
};

/// 4 x y^2 - 0.8 x^3 + 1.2 y^2 - 0.8 x^2 y
double sphere_target(double x, double y) noexcept;

/// `count` points at seeded uniform angles on the circle of radius `radius`,
/// targets from sphere_target.
Dataset make_sphere_dataset(std::size_t count, std::uint64_t seed, double radius = 1.0);

/// -pi + 2 pi k / count for k = 0 .. count-1
std::vector<double> angle_grid(std::size_t count);

/// (r cos a, r sin a) for each angle
Points circle_points(const std::vector<double>& angles, double radius = 1.0);

}  // namespace sgntk
