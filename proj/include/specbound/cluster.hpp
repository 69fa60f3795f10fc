#ifndef SPECBOUND_CLUSTER_HPP
#define SPECBOUND_CLUSTER_HPP

// Spectral clusters u = sum over [lambda, lambda + s) of c_j e_j and their
// exact coefficient-space norms.

#include "specbound/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

namespace specbound {

struct SpectralCluster {
  double lambda = 0.0;
  double s = 0.0;
  Indices members;
  Eigen::VectorXd coeffs;
  std::optional<std::uint64_t> seed;
  std::shared_ptr<const Spectrum> spectrum;

  bool empty() const { return members.empty(); }
  Eigen::VectorXd member_frequencies() const { return spectrum->frequencies(members); }
  /// (lambda_j^2 - lambda^2) c_j, the coefficients of (-Delta - lambda^2) u.
  Eigen::VectorXd defect_coeffs() const;
};

/// Throws DomainError if the coefficient count differs from the member count.
SpectralCluster make_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s,
                             const Eigen::VectorXd& coeffs);
/// Coefficients uniform on the unit sphere of the member span.
SpectralCluster random_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s, std::uint64_t seed);
/// Coefficients <f, e_j> by interior quadrature (or the FEM mass matrix).
SpectralCluster project_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s,
                                const std::function<double(const Point&)>& f);

/// Uniform point on the unit sphere in R^n (zero-length for n = 0).
Eigen::VectorXd random_unit_vector(Eigen::Index n, std::uint64_t seed);

double l2_norm(const SpectralCluster& u);         // sqrt(sum c^2)
double gradient_norm(const SpectralCluster& u);   // sqrt(sum lambda_j^2 c^2)
double defect_norm(const SpectralCluster& u);     // ||(-Delta - lambda^2) u||
double defect_grad_norm(const SpectralCluster& u);  // ||grad (-Delta - lambda^2) u||

double evaluate(const SpectralCluster& u, const Point& p);
Point gradient(const SpectralCluster& u, const Point& p);

nlohmann::json to_json(const SpectralCluster& u);

}  // namespace specbound

#endif  // SPECBOUND_CLUSTER_HPP
