#include <gtest/gtest.h>

#include <random>
#include <set>

#include "stereo/delaunay.hpp"
#include "stereo/error.hpp"

using namespace stereo;

namespace {

// Exact in-circle test with long double on small integer coordinates.
bool strictly_inside_circumcircle(GridPoint a, GridPoint b, GridPoint c, GridPoint p) {
  const long double ax = a.x - p.x, ay = a.y - p.y, bx = b.x - p.x, by = b.y - p.y, cx = c.x - p.x, cy = c.y - p.y;
  const long double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                          (cx * cx + cy * cy) * (ax * by - bx * ay);
  const long double orient = (b.x - a.x) * (long double)(c.y - a.y) - (b.y - a.y) * (long double)(c.x - a.x);
  return orient > 0 ? det > 0 : det < 0;
}

std::vector<GridPoint> random_points(int n, int xmax, int ymax, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> ux(1, xmax - 1), uy(1, ymax - 1);
  std::set<std::pair<int, int>> seen;
  std::vector<GridPoint> pts;
  while (int(pts.size()) < n) {
    const int x = ux(rng), y = uy(rng);
    if (seen.insert({x, y}).second) pts.push_back({x, y});
  }
  return pts;
}

}  // namespace

TEST(Delaunay, EmptyCircumcircleBruteForce) {
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    const auto pts = random_points(150, 120, 90, seed);
    const auto tri = triangulate_rectangle(120, 90, pts);
    for (const auto& t : tri.triangles) {
      const GridPoint a = tri.vertices[t[0]], b = tri.vertices[t[1]], c = tri.vertices[t[2]];
      for (const auto& p : tri.vertices) EXPECT_FALSE(strictly_inside_circumcircle(a, b, c, p));
    }
  }
}

TEST(Delaunay, TrianglesTileTheRectangle) {
  const auto pts = random_points(80, 64, 48, 7);
  const auto tri = triangulate_rectangle(64, 48, pts);
  long twice_area = 0;
  for (const auto& t : tri.triangles) {
    const long o = orientation(tri.vertices[t[0]], tri.vertices[t[1]], tri.vertices[t[2]]);
    EXPECT_GT(o, 0);
    twice_area += o;
  }
  EXPECT_EQ(twice_area, 2L * 64 * 48);
  // Euler: a triangulated rectangle with n vertices (4 on the hull) has 2n - 6 triangles.
  EXPECT_EQ(tri.triangles.size(), 2 * tri.vertices.size() - 6);
}

TEST(Delaunay, GridOfCollinearPoints) {
  std::vector<GridPoint> pts;
  for (int y = 5; y < 40; y += 5)
    for (int x = 5; x < 60; x += 5) pts.push_back({x, y});
  const auto tri = triangulate_rectangle(60, 40, pts);
  long twice_area = 0;
  for (const auto& t : tri.triangles) twice_area += orientation(tri.vertices[t[0]], tri.vertices[t[1]], tri.vertices[t[2]]);
  EXPECT_EQ(twice_area, 2L * 60 * 40);
}

TEST(Delaunay, RejectsBoundaryAndDuplicatePoints) {
  const std::vector<GridPoint> on_edge{{0, 5}};
  EXPECT_THROW(triangulate_rectangle(10, 10, on_edge), Error);
  const std::vector<GridPoint> dup{{3, 3}, {3, 3}};
  EXPECT_THROW(triangulate_rectangle(10, 10, dup), Error);
}

TEST(Delaunay, NoInteriorPoints) {
  const auto tri = triangulate_rectangle(10, 10, {});
  EXPECT_EQ(tri.vertices.size(), 4u);
  EXPECT_EQ(tri.triangles.size(), 2u);
}
