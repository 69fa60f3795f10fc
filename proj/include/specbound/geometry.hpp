#ifndef SPECBOUND_GEOMETRY_HPP
#define SPECBOUND_GEOMETRY_HPP

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace specbound {

using Point = Eigen::Vector2d;

enum class DomainKind { disk, rectangle, polygon };

std::string to_string(DomainKind kind);

/// Planar domain description. Construct through the named factories, which
/// validate their input.
class DomainSpec {
 public:
  static DomainSpec disk(double radius, Point center = Point::Zero());
  static DomainSpec rectangle(double width, double height, Point corner = Point::Zero());
  /// Counterclockwise, simple vertex loop (last vertex not repeated).
  static DomainSpec polygon(std::vector<Point> vertices);

  DomainKind kind() const { return kind_; }
  double radius() const { return radius_; }
  const Point& center() const { return center_; }
  double width() const { return width_; }
  double height() const { return height_; }
  const Point& corner() const { return corner_; }
  const std::vector<Point>& vertices() const { return vertices_; }

  double area() const;
  double perimeter() const;
  /// Area centroid; the default origin for the multiplier x . grad.
  Point centroid() const;

  /// Closed domain membership with absolute tolerance `tol`.
  bool contains(const Point& p, double tol = 1e-12) const;
  /// Distance from p to the boundary curve.
  double boundary_distance(const Point& p) const;
  /// Outward unit normal at a boundary point (within 1e-10). Throws
  /// DomainError for points off the boundary; at polygon corners the normal
  /// of the first incident edge is returned.
  Point outward_normal(const Point& p) const;

  /// Same domain after x -> R x + t (R rotation by `angle`).
  DomainSpec rigidly_moved(double angle, const Point& shift) const;

 private:
  DomainKind kind_ = DomainKind::disk;
  double radius_ = 1.0;
  Point center_ = Point::Zero();
  double width_ = 0.0;
  double height_ = 0.0;
  Point corner_ = Point::Zero();
  std::vector<Point> vertices_;
};

/// Diameter max |x - y| over the closed domain.
double diameter(const DomainSpec& spec);

/// (x - origin) . nu(x) for a boundary point x.
double x_dot_nu(const DomainSpec& spec, const Point& boundary_point, const Point& origin);

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  Point normal = Point::Zero();
  double length = 0.0;
};

struct TriangleMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;
  double h = 0.0;

  double area() const;
  double boundary_length() const;
  double max_edge_length() const;
  /// Smallest interior angle over all triangles, radians.
  double min_angle() const;
  double signed_area(std::size_t tri) const;
  std::vector<bool> boundary_vertex_mask() const;

  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

struct MeshOptions {
  /// Lower bound on the number of sides of the polygon inscribed in a disk.
  int disk_sides = 0;
  /// Minimum angle target for unstructured meshes, degrees.
  double min_angle_deg = 20.0;
};

/// Structured triangulation for rectangles; conforming Delaunay with
/// Ruppert-style refinement for polygons and for the polygon inscribed in a
/// disk. Maximum edge length is at most 1.5 h.
TriangleMesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});

void write_mesh(std::ostream& os, const TriangleMesh& mesh);
TriangleMesh read_mesh(std::istream& is);

}  // namespace specbound

#endif  // SPECBOUND_GEOMETRY_HPP
