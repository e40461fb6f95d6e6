#include "sgntk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgntk/errors.hpp"
#include "sgntk/rng.hpp"

namespace sgntk {

void Dataset::validate() const {
  if (inputs.size() != targets.size()) raise(Errc::DimensionMismatch, "inputs and targets differ in count");
  if (inputs.empty()) raise(Errc::InvalidArgument, "empty dataset");
  const std::size_t n0 = inputs.front().size();
  const std::size_t nl = targets.front().size();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != n0 || targets[i].size() != nl) {
      raise(Errc::DimensionMismatch, "ragged dataset at row " + std::to_string(i));
    }
    if (geometry == Geometry::Sphere) {
      double norm2 = 0.0;
      for (double v : inputs[i]) norm2 += v * v;
      if (std::abs(std::sqrt(norm2) - radius) > 1e-12 * std::max(1.0, radius)) {
        raise(Errc::PreconditionViolated, "point " + std::to_string(i) + " is off the sphere");
      }
    }
  }
}

double sphere_target(double x, double y) noexcept {
  return 4.0 * x * y * y - 0.8 * x * x * x + 1.2 * y * y - 0.8 * x * x * y;
}

Dataset make_sphere_dataset(std::size_t count, std::uint64_t seed, double radius) {
  if (count < 1) raise(Errc::InvalidArgument, "dataset needs count >= 1");
  if (!(radius > 0.0)) raise(Errc::InvalidArgument, "radius must be > 0");
  const CounterRng rng = CounterRng(seed).stream("sphere-dataset");
  Dataset d;
  d.geometry = Geometry::Sphere;
  d.radius = radius;
  for (std::size_t i = 0; i < count; ++i) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform(i);
    const double x = std::cos(angle);
    const double y = std::sin(angle);
    d.inputs.push_back({radius * x, radius * y});
    d.targets.push_back({sphere_target(x, y)});
  }
  return d;
}

std::vector<double> angle_grid(std::size_t count) {
  if (count < 1) raise(Errc::InvalidArgument, "angle grid needs count >= 1");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
  }
  return out;
}

Points circle_points(const std::vector<double>& angles, double radius) {
  Points out;
  out.reserve(angles.size());
  for (double a : angles) out.push_back({radius * std::cos(a), radius * std::sin(a)});
  return out;
}

}  // namespace sgntk
