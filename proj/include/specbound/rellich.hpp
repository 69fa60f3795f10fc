#ifndef SPECBOUND_RELLICH_HPP
#define SPECBOUND_RELLICH_HPP

// Rellich-type identity with the dilation multiplier A = (x - x0).grad.

#include "specbound/cluster.hpp"

#include <json.hpp>

#include <optional>

namespace specbound {

struct RellichReport {
  double lhs = 0.0;  // int_Y d_nu u Au = int_Y (x - x0).nu (d_nu u)^2
  double t1 = 0.0;   // <u, [-Delta, A] u> = 2 ||grad u||^2
  double t2 = 0.0;   // -<w, Au>,  w = (-Delta - lambda^2) u
  double t3 = 0.0;   // +<u, Aw>
  double residual = 0.0;   // |lhs - (t1 + t2 + t3)|
  double tolerance = 0.0;  // scaled by lambda^2 ||u||^2
  double mass_defect = 0.0;  // max |<e_i, e_j> - delta_ij| under the quadrature
  Point origin = Point::Zero();
  bool discrete = false;
  bool valid = true;

  bool passed() const { return valid && residual <= tolerance; }
};

/// 2 sum lambda_j^2 c_j^2.
double commutator_term(const SpectralCluster& u);

/// ||d_nu u||^2 = c^T G c.
double normal_norm_sq(const SpectralCluster& u);

/// int_Y (x - origin).nu (d_nu u)^2.
double multiplier_lhs(const SpectralCluster& u, const Point& origin);

/// R_M with the domain inside the ball |x - origin| <= R_M / 2.
double multiplier_radius(const DomainSpec& domain, const Point& origin);

/// (2 lambda^2 - 2 R_M s (lambda + s)^2) ||u||^2.
double lower_bound_rhs(const SpectralCluster& u, double r_m);

/// Origin defaults to the centroid. Tolerance 1e-7 lambda^2 ||u||^2 for
/// closed forms and 5e-2 lambda^2 ||u||^2 for FEM unless overridden.
RellichReport rellich_check(const SpectralCluster& u, std::optional<Point> origin = std::nullopt,
                            std::optional<double> relative_tolerance = std::nullopt);

nlohmann::json to_json(const RellichReport& r);

}  // namespace specbound

#endif  // SPECBOUND_RELLICH_HPP
