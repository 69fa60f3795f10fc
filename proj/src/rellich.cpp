#include "specbound/rellich.hpp"

#include <algorithm>
#include <cmath>

namespace specbound {

double commutator_term(const SpectralCluster& u) {
  const double g = gradient_norm(u);
  return 2.0 * g * g;
}

double normal_norm_sq(const SpectralCluster& u) {
  if (u.empty()) return 0.0;
  return u.coeffs.dot(u.spectrum->trace_gram(u.members) * u.coeffs);
}

double multiplier_lhs(const SpectralCluster& u, const Point& origin) {
  if (u.empty()) return 0.0;
  return u.coeffs.dot(u.spectrum->weighted_trace_gram(u.members, origin) * u.coeffs);
}

double multiplier_radius(const DomainSpec& domain, const Point& origin) {
  if (domain.kind() == DomainKind::disk) return 2.0 * ((domain.center() - origin).norm() + domain.radius());
  std::vector<Point> corners = domain.vertices();
  if (domain.kind() == DomainKind::rectangle) {
    const Point& c = domain.corner();
    corners = {c, c + Point(domain.width(), 0), c + Point(domain.width(), domain.height()),
               c + Point(0, domain.height())};
  }
  double r = 0.0;
  for (const auto& v : corners) r = std::max(r, (v - origin).norm());
  return 2.0 * r;
}

double lower_bound_rhs(const SpectralCluster& u, double r_m) {
  const double n = l2_norm(u);
  const double l = u.lambda, s = u.s;
  return (2.0 * l * l - 2.0 * r_m * s * (l + s) * (l + s)) * n * n;
}

RellichReport rellich_check(const SpectralCluster& u, std::optional<Point> origin,
                            std::optional<double> relative_tolerance) {
  RellichReport r;
  r.origin = origin.value_or(u.spectrum->domain().centroid());
  r.discrete = u.spectrum->is_discrete();
  const double n = l2_norm(u);
  r.tolerance = relative_tolerance.value_or(r.discrete ? 5e-2 : 1e-7) * u.lambda * u.lambda * n * n;
  if (u.empty()) return r;

  const Eigen::MatrixXd X = u.spectrum->multiplier_matrix(u.members, r.origin);
  const Eigen::VectorXd d = u.defect_coeffs();
  const Eigen::MatrixXd mass = u.spectrum->mass_matrix(u.members);
  r.mass_defect = (mass - Eigen::MatrixXd::Identity(mass.rows(), mass.cols())).cwiseAbs().maxCoeff();

  r.lhs = multiplier_lhs(u, r.origin);
  r.t1 = commutator_term(u);
  r.t2 = -d.dot(X * u.coeffs);
  r.t3 = u.coeffs.dot(X * d);
  r.residual = std::abs(r.lhs - (r.t1 + r.t2 + r.t3));
  r.valid = std::isfinite(r.residual) && r.mass_defect <= 1e-8;
  return r;
}

nlohmann::json to_json(const RellichReport& r) {
  nlohmann::json j;
  j["lhs"] = r.lhs;
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["t3"] = r.t3;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["origin"] = {r.origin.x(), r.origin.y()};
  j["quadrature"] = {{"kind", r.discrete ? "p1_edge_midpoint" : "tensor_gauss"}, {"mass_defect", r.mass_defect}};
  j["valid"] = r.valid;
  return j;
}

}  // namespace specbound
