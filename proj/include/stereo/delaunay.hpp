#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "stereo/image.hpp"

namespace stereo {

/// Vertex indices in counter-clockwise order (positive orientation in x-right,
/// y-down pixel coordinates as computed by orientation()).
using TriangleIndices = std::array<int, 3>;

struct Triangulation {
  std::vector<GridPoint> vertices;
  std::vector<TriangleIndices> triangles;
};

/// Twice the signed area of (a, b, c). Exact for coordinates below 2^30.
std::int64_t orientation(GridPoint a, GridPoint b, GridPoint c) noexcept;

/// Positive when p lies strictly inside the circumcircle of the positively
/// oriented triangle (a, b, c). Exact for coordinates below 16384.
std::int64_t in_circle(GridPoint a, GridPoint b, GridPoint c, GridPoint p) noexcept;

/// Delaunay triangulation of the rectangle [0, x_max] x [0, y_max] with the
/// given points inserted (Bowyer-Watson with exact integer predicates).
/// Vertices 0..3 are the rectangle corners; the remaining vertices follow in
/// input order. Every point must lie strictly inside the rectangle and be
/// unique. Cocircular configurations are resolved by insertion order.
Triangulation triangulate_rectangle(int x_max, int y_max, std::span<const GridPoint> interior);

}  // namespace stereo
