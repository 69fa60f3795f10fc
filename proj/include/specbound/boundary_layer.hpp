#ifndef SPECBOUND_BOUNDARY_LAYER_HPP
#define SPECBOUND_BOUNDARY_LAYER_HPP

// Collar quantities of a unit-disk cluster in boundary normal coordinates:
// r = 1 - |x| is the distance to the boundary, theta the boundary
// coordinate, and v = k u with k = sqrt(1 - r).

#include "specbound/cluster.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace specbound {

inline constexpr double collar_depth = 1.0 / 3.0;

struct CollarData {
  double r = 0.0;
  double k = 1.0;      // sqrt(1 - r)
  double F = 0.25;     // (1/4)(1 - r)^{-2}
  double h_tt = 1.0;   // h^{theta theta} = (1 - r)^{-2}
  double det_h = 1.0;  // (1 - r)^2
};

/// Throws DomainError for r outside [0, collar_depth].
CollarData collar(double r);

/// Integrals over the circle Y_r with the coordinate measure d theta.
struct LayerSample {
  double r = 0.0;
  double L = 0.0;       // int v^2
  double dL = 0.0;      // dL/dr = int 2 v v_r
  double vr_sq = 0.0;   // int v_r^2
  double E = 0.0;       // (1/2) int (v_r^2 + (lambda^2 + F) v^2 - h v_theta^2 - H v)
  double h_term = 0.0;  // int H v
};

/// Closed-form sample from the Fourier content of u. Clusters must live on
/// an analytic unit disk (UnsupportedError otherwise).
LayerSample layer_sample(const SpectralCluster& u, double r);
double layer_norm(const SpectralCluster& u, double r);
double energy(const SpectralCluster& u, double r);

/// |v_rr + d_theta(h v_theta) + (lambda^2 + F) v - H| at one collar point.
double v_equation_residual(const SpectralCluster& u, double r, double theta);
/// v and H at one collar point, for cross-checks.
double v_value(const SpectralCluster& u, double r, double theta);
double h_value(const SpectralCluster& u, double r, double theta);

/// int_0^{collar_depth} L(r) dr by Gauss-Legendre.
double collar_integral(const SpectralCluster& u);

/// n uniform points on [a, b] parsed from "a:b:n".
std::vector<double> parse_linear_grid(const std::string& text);
std::vector<double> linear_grid(double a, double b, int n);

/// sqrt(1+s)(lambda+s)^2 ||u||^2.
double layer_scale(const SpectralCluster& u);

struct BdyEstReport {
  std::vector<double> rho;  // L / (scale r^2); NaN at r = 0
  double max_rho = 0.0;
};
BdyEstReport bdy_est_check(const SpectralCluster& u, const std::vector<double>& r_grid);

struct EnergyReport {
  std::vector<double> rho;  // |E| / scale
  double max_rho = 0.0;     // measured energy constant
};
EnergyReport energy_bound_check(const SpectralCluster& u, const std::vector<double>& r_grid);

struct DiffIneqReport {
  std::vector<double> slack;  // NaN where not evaluated
  double c_hat = 0.0;
  double min_slack = 0.0;
  double tolerance = 0.0;       // 1e-4 lambda^4 ||u||^2
  double richardson_gap = 0.0;  // max |L''_h - L''_{2h}| over interior points
  std::size_t excluded = 0;     // interior points with L < 1e-14
  bool passed = true;
};

/// Slack L'' - (L')^2 / L + c_scale at interior points of a uniform grid;
/// L'' by central differences, L' as given.
DiffIneqReport diff_ineq_slack(const std::vector<double>& r, const std::vector<double>& L,
                               const std::vector<double>& dL, double c_scale, double tolerance);

/// c_hat defaults to 4 times the measured energy constant on the same grid.
DiffIneqReport diff_ineq_check(const SpectralCluster& u, const std::vector<double>& r_grid,
                               std::optional<double> c_hat = std::nullopt);

struct LayerProfile {
  double lambda = 0.0;
  double s = 0.0;
  double u_norm = 0.0;
  std::vector<LayerSample> samples;
  BdyEstReport bdy;
  EnergyReport energy;
  DiffIneqReport diff;
};

/// Samples are computed on `jobs` threads; results do not depend on it.
LayerProfile layer_profile(const SpectralCluster& u, const std::vector<double>& r_grid, int jobs = 1);

/// Columns r,L,E,rho_bdy,rho_energy,slack.
void write_profile_csv(std::ostream& os, const LayerProfile& p);
nlohmann::json to_json(const LayerProfile& p);

}  // namespace specbound

#endif  // SPECBOUND_BOUNDARY_LAYER_HPP
