#include "specbound/geometry.hpp"

#include "delaunay.hpp"
#include "specbound/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace specbound {
namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  const auto on_segment = [](const Point& a, const Point& b, const Point& p) {
    return std::abs(cross(b - a, p - a)) <= 1e-14 * (b - a).squaredNorm() &&
           p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
           p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
  };
  return on_segment(p1, p2, q1) || on_segment(p1, p2, q2) || on_segment(q1, q2, p1) ||
         on_segment(q1, q2, p2);
}

double polygon_signed_area(const std::vector<Point>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::vector<Point> boundary_loop(const DomainSpec& spec) {
  switch (spec.kind()) {
    case DomainKind::rectangle: {
      const Point& c = spec.corner();
      return {c, c + Point(spec.width(), 0.0), c + Point(spec.width(), spec.height()),
              c + Point(0.0, spec.height())};
    }
    case DomainKind::polygon:
      return spec.vertices();
    case DomainKind::disk:
      break;
  }
  return {};
}

TriangleMesh structured_rectangle(const DomainSpec& spec, double h) {
  const int nx = std::max(1, static_cast<int>(std::ceil(spec.width() / h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(spec.height() / h - 1e-9)));
  const double dx = spec.width() / nx;
  const double dy = spec.height() / ny;
  TriangleMesh mesh;
  mesh.h = h;
  const auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back(spec.corner() + Point(i * dx, j * dy));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  const auto edge = [&](int a, int b, Point normal) {
    mesh.boundary.push_back({a, b, normal, (mesh.vertices[b] - mesh.vertices[a]).norm()});
  };
  for (int i = 0; i < nx; ++i) edge(id(i, 0), id(i + 1, 0), Point(0, -1));
  for (int j = 0; j < ny; ++j) edge(id(nx, j), id(nx, j + 1), Point(1, 0));
  for (int i = nx; i > 0; --i) edge(id(i, ny), id(i - 1, ny), Point(0, 1));
  for (int j = ny; j > 0; --j) edge(id(0, j), id(0, j - 1), Point(-1, 0));
  return mesh;
}

}  // namespace

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disk: return "disk";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::polygon: return "polygon";
  }
  return "unknown";
}

DomainSpec DomainSpec::disk(double radius, Point center) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("disk: radius must be positive");
  DomainSpec s;
  s.kind_ = DomainKind::disk;
  s.radius_ = radius;
  s.center_ = center;
  return s;
}

DomainSpec DomainSpec::rectangle(double width, double height, Point corner) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
    throw DomainError("rectangle: side lengths must be positive");
  DomainSpec s;
  s.kind_ = DomainKind::rectangle;
  s.width_ = width;
  s.height_ = height;
  s.corner_ = corner;
  return s;
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw DomainError("polygon: need at least 3 vertices");
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((vertices[i] - vertices[(i + 1) % n]).norm() == 0.0)
      throw DomainError("polygon: repeated vertex");
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]))
        throw DomainError("polygon: self-intersecting vertex loop (edges " + std::to_string(i) +
                          " and " + std::to_string(j) + ")");
    }
  }
  if (polygon_signed_area(vertices) <= 0.0)
    throw DomainError("polygon: vertex loop must be counterclockwise");
  DomainSpec s;
  s.kind_ = DomainKind::polygon;
  s.vertices_ = std::move(vertices);
  return s;
}

double DomainSpec::area() const {
  switch (kind_) {
    case DomainKind::disk: return std::numbers::pi * radius_ * radius_;
    case DomainKind::rectangle: return width_ * height_;
    case DomainKind::polygon: return polygon_signed_area(vertices_);
  }
  return 0.0;
}

double DomainSpec::perimeter() const {
  if (kind_ == DomainKind::disk) return 2.0 * std::numbers::pi * radius_;
  const auto loop = boundary_loop(*this);
  double len = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) len += (loop[(i + 1) % loop.size()] - loop[i]).norm();
  return len;
}

Point DomainSpec::centroid() const {
  switch (kind_) {
    case DomainKind::disk: return center_;
    case DomainKind::rectangle: return corner_ + Point(0.5 * width_, 0.5 * height_);
    case DomainKind::polygon: {
      Point c = Point::Zero();
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % n];
        c += (a + b) * cross(a, b);
      }
      return c / (6.0 * area());
    }
  }
  return Point::Zero();
}

bool DomainSpec::contains(const Point& p, double tol) const {
  switch (kind_) {
    case DomainKind::disk: return (p - center_).norm() <= radius_ + tol;
    case DomainKind::rectangle:
      return p.x() >= corner_.x() - tol && p.x() <= corner_.x() + width_ + tol &&
             p.y() >= corner_.y() - tol && p.y() <= corner_.y() + height_ + tol;
    case DomainKind::polygon: {
      if (boundary_distance(p) <= tol) return true;
      bool in = false;
      const std::size_t n = vertices_.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
          const double xc = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
          if (p.x() < xc) in = !in;
        }
      }
      return in;
    }
  }
  return false;
}

double DomainSpec::boundary_distance(const Point& p) const {
  if (kind_ == DomainKind::disk) return std::abs((p - center_).norm() - radius_);
  const auto loop = boundary_loop(*this);
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < loop.size(); ++i)
    d = std::min(d, distance_to_segment(p, loop[i], loop[(i + 1) % loop.size()]));
  return d;
}

Point DomainSpec::outward_normal(const Point& p) const {
  constexpr double tol = 1e-10;
  if (kind_ == DomainKind::disk) {
    const Point r = p - center_;
    if (std::abs(r.norm() - radius_) > tol) throw DomainError("outward_normal: point is off the boundary");
    return r.normalized();
  }
  const auto loop = boundary_loop(*this);
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % loop.size()];
    if (distance_to_segment(p, a, b) <= tol) {
      const Point t = (b - a).normalized();
      return Point(t.y(), -t.x());
    }
  }
  throw DomainError("outward_normal: point is off the boundary");
}

DomainSpec DomainSpec::rigidly_moved(double angle, const Point& shift) const {
  const Eigen::Rotation2Dd rot(angle);
  const auto move = [&](const Point& p) -> Point { return rot * p + shift; };
  switch (kind_) {
    case DomainKind::disk: return disk(radius_, move(center_));
    case DomainKind::rectangle:
    case DomainKind::polygon: {
      std::vector<Point> v;
      for (const Point& p : boundary_loop(*this)) v.push_back(move(p));
      return polygon(std::move(v));
    }
  }
  return *this;
}

double diameter(const DomainSpec& spec) {
  switch (spec.kind()) {
    case DomainKind::disk: return 2.0 * spec.radius();
    case DomainKind::rectangle: return std::hypot(spec.width(), spec.height());
    case DomainKind::polygon: {
      // Attained at a pair of hull vertices, hence at a pair of loop vertices.
      const auto& v = spec.vertices();
      double d = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
      return d;
    }
  }
  return 0.0;
}

double x_dot_nu(const DomainSpec& spec, const Point& boundary_point, const Point& origin) {
  return (boundary_point - origin).dot(spec.outward_normal(boundary_point));
}

double TriangleMesh::signed_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

double TriangleMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += signed_area(t);
  return a;
}

double TriangleMesh::boundary_length() const {
  double len = 0.0;
  for (const auto& e : boundary) len += e.length;
  return len;
}

double TriangleMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) m = std::max(m, (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm());
  return m;
}

double TriangleMesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) {
      const Point u = vertices[t[(k + 1) % 3]] - vertices[t[k]];
      const Point v = vertices[t[(k + 2) % 3]] - vertices[t[k]];
      m = std::min(m, std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)));
    }
  return m;
}

std::vector<bool> TriangleMesh::boundary_vertex_mask() const {
  std::vector<bool> mask(vertices.size(), false);
  for (const auto& e : boundary) mask[e.a] = mask[e.b] = true;
  return mask;
}

void TriangleMesh::validate() const {
  const int nv = static_cast<int>(vertices.size());
  std::map<std::pair<int, int>, int> edge_count;
  std::map<std::pair<int, int>, int> edge_owner;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t])
      if (v < 0 || v >= nv) throw DomainError("mesh: triangle " + std::to_string(t) + " has a bad vertex index");
    if (!(signed_area(t) > 0.0))
      throw DomainError("mesh: triangle " + std::to_string(t) + " has non-positive area");
    for (int k = 0; k < 3; ++k) {
      const int a = triangles[t][k], b = triangles[t][(k + 1) % 3];
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      ++edge_count[key];
      edge_owner[key] = static_cast<int>(t);
    }
  }
  std::map<int, int> degree;
  std::size_t boundary_edges_in_mesh = 0;
  for (const auto& [key, count] : edge_count)
    if (count == 1) ++boundary_edges_in_mesh;
  if (boundary_edges_in_mesh != boundary.size())
    throw DomainError("mesh: boundary edge list does not match the triangulation");
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto& e = boundary[i];
    const std::pair<int, int> key{std::min(e.a, e.b), std::max(e.a, e.b)};
    auto it = edge_count.find(key);
    if (it == edge_count.end() || it->second != 1)
      throw DomainError("mesh: boundary edge " + std::to_string(i) + " is not owned by exactly one triangle");
    if (std::abs(e.normal.norm() - 1.0) > 1e-12)
      throw DomainError("mesh: boundary edge " + std::to_string(i) + " normal is not unit length");
    const auto& t = triangles[edge_owner[key]];
    const Point centroid = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    const Point mid = 0.5 * (vertices[e.a] + vertices[e.b]);
    if (e.normal.dot(mid - centroid) <= 0.0)
      throw DomainError("mesh: boundary edge " + std::to_string(i) + " normal points inward");
    ++degree[e.a];
    ++degree[e.b];
  }
  for (const auto& [v, d] : degree)
    if (d != 2) throw DomainError("mesh: boundary edges do not form closed loops at vertex " + std::to_string(v));
}

TriangleMesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("build_mesh: h must be positive");
  TriangleMesh mesh;
  switch (spec.kind()) {
    case DomainKind::rectangle:
      mesh = structured_rectangle(spec, h);
      break;
    case DomainKind::polygon: {
      const auto& v = spec.vertices();
      double shortest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < v.size(); ++i) shortest = std::min(shortest, (v[(i + 1) % v.size()] - v[i]).norm());
      if (!(h < shortest)) throw DomainError("build_mesh: h must be smaller than the shortest polygon edge");
      mesh = detail::triangulate_polygon(v, h, options.min_angle_deg);
      break;
    }
    case DomainKind::disk: {
      const int sides = std::max({options.disk_sides, 8,
                                  static_cast<int>(std::ceil(2.0 * std::numbers::pi * spec.radius() / h - 1e-9))});
      std::vector<Point> loop;
      loop.reserve(sides);
      for (int i = 0; i < sides; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / sides;
        loop.push_back(spec.center() + spec.radius() * Point(std::cos(theta), std::sin(theta)));
      }
      mesh = detail::triangulate_polygon(loop, h, options.min_angle_deg);
      break;
    }
  }
  mesh.h = h;
  mesh.validate();
  return mesh;
}

void write_mesh(std::ostream& os, const TriangleMesh& mesh) {
  os.precision(17);
  os << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' ' << mesh.boundary.size() << '\n';
  for (const auto& p : mesh.vertices) os << p.x() << ' ' << p.y() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary)
    os << e.a << ' ' << e.b << ' ' << e.normal.x() << ' ' << e.normal.y() << '\n';
}

TriangleMesh read_mesh(std::istream& is) {
  TriangleMesh mesh;
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw DomainError("read_mesh: missing header line");
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices)
    if (!(is >> p.x() >> p.y())) throw DomainError("read_mesh: truncated vertex block");
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw DomainError("read_mesh: truncated triangle block");
  mesh.boundary.resize(nb);
  for (auto& e : mesh.boundary) {
    if (!(is >> e.a >> e.b >> e.normal.x() >> e.normal.y()))
      throw DomainError("read_mesh: truncated boundary block");
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(std::max(e.a, e.b)) >= nv)
      throw DomainError("read_mesh: boundary vertex index out of range");
    e.length = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
  }
  double hmax = 0.0;
  for (const auto& e : mesh.boundary) hmax = std::max(hmax, e.length);
  mesh.h = hmax;
  mesh.validate();
  return mesh;
}

}  // namespace specbound
