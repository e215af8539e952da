#include <cmath>
#include <numbers>
#include <sstream>

#include "steklov/mesh.hpp"

namespace steklov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMinAngularSamples = 8;

// Triangulates the strip between two concentric rings listed counterclockwise,
// the inner ring closer to the centre. Each ring is uniformly sampled and may be
// rotated by half of its own angular step (half_offset = 1). Angles are compared
// in exact integer arithmetic so symmetric rings give symmetric strips.
void stitch_rings(const std::vector<int>& inner, int inner_half_offset, const std::vector<int>& outer,
                  int outer_half_offset, std::vector<std::array<int, 3>>& triangles) {
  const long na = static_cast<long>(inner.size());
  const long nb = static_cast<long>(outer.size());
  long i = 0;
  long j = 0;
  while (i < na || j < nb) {
    // angle of the next sample, in units of pi / (na * nb)
    const long next_a = (2 * (i + 1) + inner_half_offset) * nb;
    const long next_b = (2 * (j + 1) + outer_half_offset) * na;
    const bool advance_outer = (i == na) || (j < nb && next_b <= next_a);
    if (advance_outer) {
      triangles.push_back({inner[i % na], outer[j % nb], outer[(j + 1) % nb]});
      ++j;
    } else {
      triangles.push_back({inner[i % na], outer[j % nb], inner[(i + 1) % na]});
      ++i;
    }
  }
}

[[noreturn]] void reject(const std::string& what) { throw MeshError(what); }

std::string format_label(const char* kind, double a, double b, int res) {
  std::ostringstream os;
  os.precision(17);
  os << kind << "(" << a;
  if (b > 0) os << "," << b;
  os << ";res=" << res << ")";
  return os.str();
}

}  // namespace

SurfaceMesh generate_disk(double radius, int rings) {
  if (!(radius > 0.0) || !std::isfinite(radius)) reject("disk radius must be positive");
  if (rings < 2) reject("disk needs at least 2 rings (12 boundary samples)");

  MeshData data;
  data.vertices.emplace_back(0.0, 0.0);
  std::vector<std::vector<int>> ring_ids(rings + 1);
  ring_ids[0] = {0};
  for (int i = 1; i <= rings; ++i) {
    const int count = 6 * i;
    const double r = radius * static_cast<double>(i) / rings;
    for (int j = 0; j < count; ++j) {
      const double phi = kTwoPi * j / count;
      ring_ids[i].push_back(static_cast<int>(data.vertices.size()));
      data.vertices.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
  }
  for (int j = 0; j < 6; ++j) data.triangles.push_back({0, ring_ids[1][j], ring_ids[1][(j + 1) % 6]});
  for (int i = 1; i < rings; ++i) stitch_rings(ring_ids[i], 0, ring_ids[i + 1], 0, data.triangles);
  data.label = format_label("disk", radius, -1.0, rings);
  auto mesh = SurfaceMesh::create(std::move(data));
  require_counterclockwise(mesh);
  return mesh;
}

SurfaceMesh generate_annulus(double inner_radius, double outer_radius, int angular) {
  if (!(inner_radius > 0.0) || !std::isfinite(outer_radius)) reject("annulus radii must be positive");
  if (!(inner_radius < outer_radius)) reject("annulus requires r < R");
  if (angular < kMinAngularSamples) reject("annulus needs at least 8 angular samples");

  const double dtheta = kTwoPi / angular;
  const double log_ratio = std::log(outer_radius / inner_radius);
  // staggered rings form near-equilateral triangles when the log step is
  // sqrt(3)/2 of the angular step
  const int layers = std::max(1, static_cast<int>(std::lround(log_ratio / (0.5 * std::sqrt(3.0) * dtheta))));

  MeshData data;
  std::vector<std::vector<int>> ring_ids(layers + 1);
  for (int k = 0; k <= layers; ++k) {
    const double s = (k == layers) ? outer_radius : inner_radius * std::exp(log_ratio * k / layers);
    const double offset = (k % 2) * 0.5 * dtheta;
    for (int j = 0; j < angular; ++j) {
      const double phi = offset + dtheta * j;
      ring_ids[k].push_back(static_cast<int>(data.vertices.size()));
      data.vertices.emplace_back(s * std::cos(phi), s * std::sin(phi));
    }
  }
  for (int k = 0; k < layers; ++k) {
    stitch_rings(ring_ids[k], k % 2, ring_ids[k + 1], (k + 1) % 2, data.triangles);
  }
  data.label = format_label("annulus", inner_radius, outer_radius, angular);
  auto mesh = SurfaceMesh::create(std::move(data));
  require_counterclockwise(mesh);
  return mesh;
}

SurfaceMesh generate_cylinder(double half_length, int angular) {
  if (!(half_length > 0.0) || !std::isfinite(half_length)) reject("cylinder half-length T must be positive");
  if (angular < kMinAngularSamples) reject("cylinder needs at least 8 angular samples");

  const double dtheta = kTwoPi / angular;
  // even row count keeps a row on z = 0
  int rows = static_cast<int>(std::lround(2.0 * half_length / dtheta));
  rows = std::max(2, rows + (rows % 2));

  MeshData data;
  const int columns = angular + 1;  // last column duplicates theta = 0
  auto id = [columns](int row, int col) { return row * columns + col; };
  for (int i = 0; i <= rows; ++i) {
    const double z = -half_length + 2.0 * half_length * i / rows;
    for (int j = 0; j <= angular; ++j) data.vertices.emplace_back(dtheta * j, z);
    data.identifications.emplace_back(id(i, 0), id(i, angular));
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < angular; ++j) {
      data.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
      data.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
    }
  }
  data.label = format_label("cylinder", half_length, -1.0, angular);
  auto mesh = SurfaceMesh::create(std::move(data));
  require_counterclockwise(mesh);
  return mesh;
}

}  // namespace steklov
