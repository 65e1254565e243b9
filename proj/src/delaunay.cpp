#include "stereo/delaunay.hpp"

#include <string>
#include <unordered_map>

#include "stereo/error.hpp"

namespace stereo {

std::int64_t orientation(GridPoint a, GridPoint b, GridPoint c) noexcept {
  return std::int64_t(b.x - a.x) * (c.y - a.y) - std::int64_t(b.y - a.y) * (c.x - a.x);
}

std::int64_t in_circle(GridPoint a, GridPoint b, GridPoint c, GridPoint p) noexcept {
  const std::int64_t adx = a.x - p.x, ady = a.y - p.y;
  const std::int64_t bdx = b.x - p.x, bdy = b.y - p.y;
  const std::int64_t cdx = c.x - p.x, cdy = c.y - p.y;
  const std::int64_t ad = adx * adx + ady * ady;
  const std::int64_t bd = bdx * bdx + bdy * bdy;
  const std::int64_t cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

class Builder {
 public:
  Builder(int x_max, int y_max) {
    pts_ = {{0, 0}, {x_max, 0}, {x_max, y_max}, {0, y_max}};
    tris_.push_back({{0, 1, 2}, {-1, 1, -1}});
    tris_.push_back({{0, 2, 3}, {-1, -1, 0}});
  }

  void insert(GridPoint p) {
    const int pi = static_cast<int>(pts_.size());
    pts_.push_back(p);
    const int start = locate(p);

    // Cavity: triangles whose circumcircle strictly contains p, grown from
    // the containing triangle.
    std::vector<int> bad{start};
    marked_.resize(tris_.size(), -1);
    auto in_cavity = [&](int t) { return marked_[t] == pi; };
    marked_[start] = pi;
    for (std::size_t k = 0; k < bad.size(); ++k) {
      const Tri& t = tris_[bad[k]];
      for (int n : t.nb) {
        if (n < 0 || in_cavity(n)) continue;
        const Tri& tn = tris_[n];
        if (in_circle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0) {
          marked_[n] = pi;
          bad.push_back(n);
        }
      }
    }

    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> boundary;
    for (int ti : bad) {
      const Tri& t = tris_[ti];
      for (int i = 0; i < 3; ++i) {
        const int n = t.nb[i];
        if (n >= 0 && in_cavity(n)) continue;
        boundary.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], n});
      }
    }
    for (int ti : bad) tris_[ti].alive = false;

    std::unordered_map<int, int> by_start;
    std::unordered_map<int, int> by_end;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const Edge& e : boundary) {
      const int id = static_cast<int>(tris_.size());
      tris_.push_back({{e.a, e.b, pi}, {-1, -1, e.outside}});
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int j = 0; j < 3; ++j) {
          const int oa = o.v[(j + 1) % 3], ob = o.v[(j + 2) % 3];
          if (oa == e.b && ob == e.a) o.nb[j] = id;
        }
      }
      by_start[e.a] = id;
      by_end[e.b] = id;
      created.push_back(id);
    }
    for (int id : created) {
      Tri& t = tris_[id];
      t.nb[0] = by_start.at(t.v[1]);  // edge (b, p)
      t.nb[1] = by_end.at(t.v[0]);    // edge (p, a)
    }
    last_ = created.front();
  }

  Triangulation finish() && {
    Triangulation out;
    out.vertices = std::move(pts_);
    for (const Tri& t : tris_)
      if (t.alive) out.triangles.push_back(t.v);
    return out;
  }

 private:
  int locate(GridPoint p) const {
    int t = last_;
    while (!tris_[t].alive) --t;
    for (std::size_t steps = 0; steps <= 4 * tris_.size() + 8; ++steps) {
      const Tri& tri = tris_[t];
      bool moved = false;
      for (int i = 0; i < 3; ++i) {
        const GridPoint a = pts_[tri.v[(i + 1) % 3]];
        const GridPoint b = pts_[tri.v[(i + 2) % 3]];
        if (orientation(a, b, p) < 0 && tri.nb[i] >= 0) {
          t = tri.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    throw Error(Errc::InvalidParameter, "point location did not converge");
  }

  std::vector<GridPoint> pts_;
  std::vector<Tri> tris_;
  std::vector<int> marked_;  // cavity membership, stamped with the inserted vertex id
  int last_ = 0;
};

}  // namespace

Triangulation triangulate_rectangle(int x_max, int y_max, std::span<const GridPoint> interior) {
  require(x_max > 0 && y_max > 0 && x_max < 16384 && y_max < 16384, Errc::InvalidParameter,
          "rectangle extent must be in (0, 16384)");
  Builder builder(x_max, y_max);
  std::vector<char> seen(static_cast<std::size_t>(x_max + 1) * (y_max + 1), 0);
  for (const GridPoint& p : interior) {
    require(p.x > 0 && p.y > 0 && p.x < x_max && p.y < y_max, Errc::InvalidParameter,
            "point (" + std::to_string(p.x) + "," + std::to_string(p.y) + ") not strictly inside");
    char& s = seen[static_cast<std::size_t>(p.y) * (x_max + 1) + p.x];
    require(!s, Errc::InvalidParameter, "duplicate point");
    s = 1;
    builder.insert(p);
  }
  return std::move(builder).finish();
}

}  // namespace stereo
