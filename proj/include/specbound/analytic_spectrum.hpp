#ifndef SPECBOUND_ANALYTIC_SPECTRUM_HPP
#define SPECBOUND_ANALYTIC_SPECTRUM_HPP

// Closed-form Dirichlet eigenpairs on disks and rectangles, with exact
// boundary normal-derivative traces.

#include "specbound/geometry.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace specbound {

enum class Parity { cos, sin };

/// sin(m pi x / a) sin(n pi y / b) on a rectangle.
struct RectMode {
  int m = 1;
  int n = 1;
  auto operator<=>(const RectMode&) const = default;
};

/// J_n(j_{n,k} rho / R) times cos(n theta) or sin(n theta) on a disk.
struct DiskMode {
  int n = 0;
  int k = 1;
  Parity parity = Parity::cos;
  auto operator<=>(const DiskMode&) const = default;
};

using Mode = std::variant<RectMode, DiskMode>;

std::string mode_label(const Mode& mode);

struct EigenPair {
  DomainSpec domain = DomainSpec::disk(1.0);
  Mode mode;
  double lambda = 0.0;     // frequency lambda_j
  double lambda_sq = 0.0;  // eigenvalue lambda_j^2
  double norm_const = 0.0; // positive factor making ||e||_{L2} = 1

  int angular_order() const;  // disk n, 0 for rectangles
};

/// Exact pair for one mode. Throws DomainError for an invalid descriptor.
EigenPair make_eigenpair(const DomainSpec& domain, const Mode& mode);

/// All eigenpairs with lambda_j < cutoff, ascending in lambda, ties broken by
/// the mode descriptor. Polygons are unsupported (use the FEM solver).
std::vector<EigenPair> eigenpairs_below(const DomainSpec& domain, double cutoff);

/// Two-term Weyl count |M| L^2 / (4 pi) - |dM| L / (4 pi).
double weyl_count(const DomainSpec& domain, double cutoff);

double evaluate(const EigenPair& pair, const Point& p);
Point gradient(const EigenPair& pair, const Point& p);
/// Laplacian from second derivatives of the closed form (disk: J_n'' from
/// the order-shift identity, not from Bessel's equation).
double laplacian(const EigenPair& pair, const Point& p);

/// Pointwise outward normal derivative at a boundary point.
double normal_derivative(const EigenPair& pair, const Point& boundary_point);

/// Function on the boundary curve. Fourier form lives on a circle of radius
/// `radius`: f(theta) = a_0 + sum_n a_n cos(n theta) + b_n sin(n theta).
/// Nodal form stores samples at boundary quadrature nodes.
struct BoundaryTrace {
  enum class Kind { fourier, nodal };
  Kind kind = Kind::fourier;

  double radius = 1.0;
  Eigen::VectorXd cos_coeffs;  // index n
  Eigen::VectorXd sin_coeffs;

  std::vector<Point> nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd values;

  double measure = 0.0;  // |dM|

  /// Value at boundary angle theta (Fourier form only).
  double at_angle(double theta) const;
  /// this += alpha * other; representations must match.
  BoundaryTrace& add_scaled(double alpha, const BoundaryTrace& other);
};

/// Normal derivative of the eigenfunction on the boundary. Disks give a single
/// Fourier coefficient; rectangles give Gauss-Legendre samples with
/// `nodes_per_side` nodes on each side (0 picks a size resolving the mode).
BoundaryTrace normal_trace(const EigenPair& pair, int nodes_per_side = 0);

/// Trace of the eigenfunction itself at the same boundary nodes (identically
/// zero for Dirichlet eigenfunctions up to rounding).
BoundaryTrace value_trace(const EigenPair& pair, int nodes_per_side = 64);

/// Nodes per side that resolve products of rectangle traces up to `lambda`.
int rectangle_trace_nodes(const DomainSpec& domain, double lambda);

double trace_inner(const BoundaryTrace& a, const BoundaryTrace& b);
double trace_l2(const BoundaryTrace& t);
/// H^k norm with weights (1 + n^2)^k on the Fourier coefficients; any real
/// k >= 0. Nodal traces throw UnsupportedError.
double trace_hk(const BoundaryTrace& t, double k);
double trace_hk_inner(const BoundaryTrace& a, const BoundaryTrace& b, double k);

/// Closed form ||d_nu e||^2 / lambda^2: 2 on every disk, and
/// 4 pi^2 (m^2/a^3 + n^2/b^3) / lambda^2 on an a x b rectangle.
double normal_ratio_squared(const EigenPair& pair);

/// Tensor-product interior rule: polar (Gauss-Legendre radius, uniform angle)
/// on disks, Gauss-Legendre squared on rectangles.
struct DomainQuadrature {
  DomainSpec domain = DomainSpec::disk(1.0);
  Eigen::VectorXd radial_nodes, radial_weights;  // disk: weights include rho
  Eigen::VectorXd angles;                        // disk: uniform, weight 2 pi / size
  Eigen::VectorXd x_nodes, x_weights, y_nodes, y_weights;

  std::size_t size() const;
  Point point(std::size_t i) const;
  double weight(std::size_t i) const;
};

/// Sizes of 0 pick defaults resolving modes with frequency below
/// `lambda_max` (at least 64 radial x 256 angular, 64 x 64).
DomainQuadrature domain_quadrature(const DomainSpec& domain, double lambda_max, int n1 = 0, int n2 = 0);

/// Values and gradients of several eigenpairs at every quadrature node
/// (rows: nodes, columns: pairs). Separable evaluation, so disk Bessel
/// factors are computed once per radius.
struct QuadratureSamples {
  Eigen::MatrixXd value, dx, dy;
  Eigen::VectorXd weights;
  Eigen::Matrix2Xd points;
};

QuadratureSamples sample(const std::vector<EigenPair>& pairs, const DomainQuadrature& quad);

/// CSV with header lambda,mode_m_or_n,mode_n_or_k,parity,norm_const.
void write_spectrum_csv(std::ostream& os, const std::vector<EigenPair>& pairs);

}  // namespace specbound

#endif  // SPECBOUND_ANALYTIC_SPECTRUM_HPP
