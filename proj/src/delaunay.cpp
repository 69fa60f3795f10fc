#include "delaunay.hpp"

#include "specbound/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace specbound::detail {
namespace {

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

Point circumcenter(const Point& a, const Point& b, const Point& c) {
  const Point ab = b - a;
  const Point ac = c - a;
  const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  return a + Point((ac.y() * ab2 - ab.y() * ac2) / d, (ab.x() * ac2 - ac.x() * ab2) / d);
}

bool inside_polygon(const std::vector<Point>& loop, const Point& p) {
  bool in = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = loop[i];
    const Point& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xcross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < xcross) in = !in;
    }
  }
  return in;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

struct Tri {
  std::array<int, 3> v;
  Point cc;
  double r2 = 0.0;
  bool alive = true;
};

class Triangulator {
 public:
  Triangulator(const Point& lo, const Point& hi) {
    const Point mid = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).maxCoeff(), 1e-300) * 20.0;
    points_.push_back(mid + Point(-span, -span));
    points_.push_back(mid + Point(span, -span));
    points_.push_back(mid + Point(0.0, span));
    add_triangle(0, 1, 2);
  }

  const std::vector<Point>& points() const { return points_; }
  const std::vector<Tri>& triangles() const { return tris_; }

  int insert(const Point& p) {
    std::vector<int> bad;
    int seed = -1;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      const Tri& tri = tris_[t];
      if (!tri.alive) continue;
      if ((p - tri.cc).squaredNorm() < tri.r2 * (1.0 - 1e-12)) {
        bad.push_back(t);
        if (seed < 0 && contains(tri, p)) seed = t;
      }
    }
    if (seed < 0) throw NumericalError("mesh: inserted point is not covered by the triangulation");

    // Cavity: bad triangles edge-connected to the seed, shrunk until it is
    // star-shaped with respect to p.
    std::vector<int> cavity = connected_from(seed, bad);
    for (;;) {
      bool changed = false;
      auto edges = cavity_boundary(cavity);
      for (const auto& [edge, owner] : edges) {
        if (orient(points_[edge.first], points_[edge.second], p) <= 0.0 && owner != seed) {
          cavity.erase(std::find(cavity.begin(), cavity.end(), owner));
          cavity = connected_from(seed, cavity);
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }

    const int idx = static_cast<int>(points_.size());
    points_.push_back(p);
    const auto edges = cavity_boundary(cavity);
    for (int t : cavity) tris_[t].alive = false;
    for (const auto& [edge, owner] : edges) add_triangle(edge.first, edge.second, idx);
    ++dead_since_compact_;
    if (dead_since_compact_ > 4096) compact();
    return idx;
  }

 private:
  bool contains(const Tri& tri, const Point& p) const {
    const double eps = -1e-13;
    const Point& a = points_[tri.v[0]];
    const Point& b = points_[tri.v[1]];
    const Point& c = points_[tri.v[2]];
    const double scale = std::abs(orient(a, b, c));
    return orient(a, b, p) >= eps * scale && orient(b, c, p) >= eps * scale &&
           orient(c, a, p) >= eps * scale;
  }

  void add_triangle(int a, int b, int c) {
    Tri t;
    t.v = {a, b, c};
    t.cc = circumcenter(points_[a], points_[b], points_[c]);
    t.r2 = (points_[a] - t.cc).squaredNorm();
    tris_.push_back(t);
  }

  // Directed boundary edges of the cavity, each with the triangle owning it.
  std::map<std::pair<int, int>, int> cavity_boundary(const std::vector<int>& cavity) const {
    std::map<std::pair<int, int>, int> directed;
    for (int t : cavity)
      for (int k = 0; k < 3; ++k)
        directed[{tris_[t].v[k], tris_[t].v[(k + 1) % 3]}] = t;
    std::map<std::pair<int, int>, int> out;
    for (const auto& [edge, owner] : directed)
      if (!directed.contains({edge.second, edge.first})) out.emplace(edge, owner);
    return out;
  }

  std::vector<int> connected_from(int seed, const std::vector<int>& pool) const {
    std::map<std::pair<int, int>, int> owner;
    for (int t : pool)
      for (int k = 0; k < 3; ++k) owner[{tris_[t].v[k], tris_[t].v[(k + 1) % 3]}] = t;
    std::vector<int> out{seed};
    std::vector<bool> seen(tris_.size(), false);
    seen[seed] = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Tri& tri = tris_[out[i]];
      for (int k = 0; k < 3; ++k) {
        auto it = owner.find({tri.v[(k + 1) % 3], tri.v[k]});
        if (it != owner.end() && !seen[it->second]) {
          seen[it->second] = true;
          out.push_back(it->second);
        }
      }
    }
    return out;
  }

  void compact() {
    std::erase_if(tris_, [](const Tri& t) { return !t.alive; });
    dead_since_compact_ = 0;
  }

  std::vector<Point> points_;
  std::vector<Tri> tris_;
  int dead_since_compact_ = 0;
};

struct Segment {
  int a;
  int b;
  int edge;  // polygon edge it lies on
};

double min_angle(const Point& a, const Point& b, const Point& c) {
  const double la = (b - c).norm();
  const double lb = (a - c).norm();
  const double lc = (a - b).norm();
  const auto angle = [](double opp, double s1, double s2) {
    return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0));
  };
  return std::min({angle(la, lb, lc), angle(lb, la, lc), angle(lc, la, lb)});
}

double max_edge(const Point& a, const Point& b, const Point& c) {
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

bool encroaches(const Point& q, const Point& a, const Point& b) {
  return (q - a).dot(q - b) < -1e-14 * (a - b).squaredNorm();
}

}  // namespace

TriangleMesh triangulate_polygon(const std::vector<Point>& loop, double h, double min_angle_deg) {
  const std::size_t nloop = loop.size();
  Point lo = loop.front(), hi = loop.front();
  for (const Point& p : loop) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Triangulator tr(lo, hi);

  // Boundary vertices, each polygon edge split uniformly to spacing <= h.
  std::vector<Segment> segments;
  std::vector<int> corner_index(nloop);
  for (std::size_t i = 0; i < nloop; ++i) corner_index[i] = tr.insert(loop[i]);
  for (std::size_t i = 0; i < nloop; ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % nloop];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
    int prev = corner_index[i];
    for (int k = 1; k < pieces; ++k) {
      const int idx = tr.insert(a + (b - a) * (static_cast<double>(k) / pieces));
      segments.push_back({prev, idx, static_cast<int>(i)});
      prev = idx;
    }
    segments.push_back({prev, corner_index[(i + 1) % nloop], static_cast<int>(i)});
  }

  // Equilateral interior lattice kept clear of the boundary.
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int rows = static_cast<int>(std::ceil((hi.y() - lo.y()) / dy));
  const int cols = static_cast<int>(std::ceil((hi.x() - lo.x()) / h)) + 1;
  for (int r = 1; r < rows; ++r) {
    const double y = lo.y() + r * dy;
    const double shift = (r % 2) ? 0.5 * h : 0.0;
    for (int c = 0; c <= cols; ++c) {
      const Point p(lo.x() + shift + c * h, y);
      if (!inside_polygon(loop, p)) continue;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nloop; ++i)
        dist = std::min(dist, segment_distance(p, loop[i], loop[(i + 1) % nloop]));
      if (dist > 0.55 * h) tr.insert(p);
    }
  }

  const auto split_encroached = [&]() {
    bool any = false;
    for (bool again = true; again;) {
      again = false;
      for (std::size_t s = 0; s < segments.size(); ++s) {
        const Segment seg = segments[s];
        const Point a = tr.points()[seg.a];
        const Point b = tr.points()[seg.b];
        bool hit = false;
        for (int q = 3; q < static_cast<int>(tr.points().size()); ++q) {
          if (q == seg.a || q == seg.b) continue;
          if (encroaches(tr.points()[q], a, b)) {
            hit = true;
            break;
          }
        }
        if (!hit) continue;
        const int mid = tr.insert(0.5 * (a + b));
        segments[s] = {seg.a, mid, seg.edge};
        segments.push_back({mid, seg.b, seg.edge});
        again = any = true;
      }
    }
    return any;
  };

  const double min_angle_rad = min_angle_deg * std::numbers::pi / 180.0;
  const double size_cap = 1.45 * h;
  const auto is_inside = [&](const Tri& t) {
    if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) return false;
    const auto& P = tr.points();
    return inside_polygon(loop, (P[t.v[0]] + P[t.v[1]] + P[t.v[2]]) / 3.0);
  };

  split_encroached();
  const std::size_t point_cap = 50 * (tr.points().size() + 1000);
  for (;;) {
    if (tr.points().size() > point_cap)
      throw NumericalError("mesh: refinement did not terminate");
    const Tri* worst = nullptr;
    double worst_score = 0.0;
    for (const Tri& t : tr.triangles()) {
      if (!t.alive || !is_inside(t)) continue;
      const auto& P = tr.points();
      const Point &a = P[t.v[0]], &b = P[t.v[1]], &c = P[t.v[2]];
      const double angle = min_angle(a, b, c);
      const double edge = max_edge(a, b, c);
      double score = 0.0;
      if (angle < min_angle_rad) score = 1.0 + (min_angle_rad - angle);
      else if (edge > size_cap) score = edge / size_cap - 1.0;
      if (score > worst_score) {
        worst_score = score;
        worst = &t;
      }
    }
    if (worst == nullptr) break;
    const Point c = worst->cc;
    const Point centroid =
        (tr.points()[worst->v[0]] + tr.points()[worst->v[1]] + tr.points()[worst->v[2]]) / 3.0;

    std::vector<std::size_t> hit;
    for (std::size_t s = 0; s < segments.size(); ++s)
      if (encroaches(c, tr.points()[segments[s].a], tr.points()[segments[s].b])) hit.push_back(s);
    if (!hit.empty()) {
      for (std::size_t s : hit) {
        const Segment seg = segments[s];
        const int mid = tr.insert(0.5 * (tr.points()[seg.a] + tr.points()[seg.b]));
        segments[s] = {seg.a, mid, seg.edge};
        segments.push_back({mid, seg.b, seg.edge});
      }
      split_encroached();
      continue;
    }
    tr.insert(inside_polygon(loop, c) ? c : centroid);
    split_encroached();
  }

  // Extract: drop super-triangle vertices, keep inside triangles.
  TriangleMesh mesh;
  mesh.h = h;
  const auto& P = tr.points();
  std::vector<int> remap(P.size(), -1);
  for (int i = 3; i < static_cast<int>(P.size()); ++i) {
    remap[i] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(P[i]);
  }
  std::map<std::pair<int, int>, int> edge_count;
  for (const Tri& t : tr.triangles()) {
    if (!t.alive || !is_inside(t)) continue;
    mesh.triangles.push_back({remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]});
    for (int k = 0; k < 3; ++k) {
      const int a = remap[t.v[k]], b = remap[t.v[(k + 1) % 3]];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  // Boundary edges in loop order.
  std::vector<std::pair<double, Segment>> ordered;
  for (const Segment& seg : segments) {
    const Point& pa = loop[seg.edge];
    const Point& pb = loop[(seg.edge + 1) % nloop];
    const double t = (P[seg.a] - pa).dot(pb - pa) / (pb - pa).squaredNorm();
    ordered.emplace_back(seg.edge + t, seg);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [key, seg] : ordered) {
    const int a = remap[seg.a], b = remap[seg.b];
    if (edge_count[{std::min(a, b), std::max(a, b)}] != 1)
      throw NumericalError("mesh: boundary segment missing from the triangulation");
    const Point& pa = loop[seg.edge];
    const Point& pb = loop[(seg.edge + 1) % nloop];
    const Point tangent = (pb - pa).normalized();
    BoundaryEdge e;
    e.a = a;
    e.b = b;
    e.normal = Point(tangent.y(), -tangent.x());
    e.length = (mesh.vertices[b] - mesh.vertices[a]).norm();
    mesh.boundary.push_back(e);
  }
  return mesh;
}

}  // namespace specbound::detail
