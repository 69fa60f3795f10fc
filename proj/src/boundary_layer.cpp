#include "specbound/boundary_layer.hpp"

#include "specbound/bounds_lab.hpp"
#include "specbound/errors.hpp"
#include "specbound/specfun.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace specbound {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

const AnalyticSpectrum& disk_spectrum(const SpectralCluster& u) {
  const auto* sp = dynamic_cast<const AnalyticSpectrum*>(u.spectrum.get());
  if (sp == nullptr || sp->domain().kind() != DomainKind::disk || sp->domain().radius() != 1.0)
    throw UnsupportedError("collar quantities need a closed-form unit-disk spectrum");
  return *sp;
}

double angular_weight(int n) { return n == 0 ? 2.0 * pi : pi; }

// One member at radius rho: N J, N j J', N j^2 J''.
struct RadialValues {
  double f = 0.0, df = 0.0, ddf = 0.0;
};

RadialValues radial(const EigenPair& p, double rho) {
  const auto& d = std::get<DiskMode>(p.mode);
  const double j = p.lambda, x = j * rho;
  const double J = bessel_j(d.n, x), dJ = bessel_j_deriv(d.n, x);
  // Bessel's equation
  const double ddJ = -dJ / x - (1.0 - static_cast<double>(d.n * d.n) / (x * x)) * J;
  return {p.norm_const * J, p.norm_const * j * dJ, p.norm_const * j * j * ddJ};
}

double trig(const DiskMode& d, double theta) {
  return d.parity == Parity::cos ? std::cos(d.n * theta) : std::sin(d.n * theta);
}

struct PointValues {
  double u = 0.0, u_r = 0.0, u_rr = 0.0, u_tt = 0.0, H = 0.0;  // u_r, u_rr in rho
};

PointValues point_values(const SpectralCluster& u, double rho, double theta) {
  const auto& sp = disk_spectrum(u);
  PointValues pv;
  for (std::size_t m = 0; m < u.members.size(); ++m) {
    const double c = u.coeffs[static_cast<Eigen::Index>(m)];
    const auto& p = sp.pair(u.members[m]);
    const auto& d = std::get<DiskMode>(p.mode);
    const auto rv = radial(p, rho);
    const double t = trig(d, theta);
    pv.u += c * rv.f * t;
    pv.u_r += c * rv.df * t;
    pv.u_rr += c * rv.ddf * t;
    pv.u_tt -= c * d.n * d.n * rv.f * t;
    pv.H += (u.lambda * u.lambda - p.lambda_sq) * c * rv.f * t;
  }
  return pv;
}

std::vector<LayerSample> sample_grid(const SpectralCluster& u, const std::vector<double>& r_grid, int jobs) {
  std::vector<LayerSample> out(r_grid.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) { out[i] = layer_sample(u, r_grid[i]); });
  return out;
}

BdyEstReport bdy_from(const std::vector<LayerSample>& samples, double scale) {
  BdyEstReport rep;
  for (const auto& s : samples) {
    const double rho = s.r > 0.0 && scale > 0.0 ? s.L / (scale * s.r * s.r) : (s.r > 0.0 ? 0.0 : nan_value);
    rep.rho.push_back(rho);
    if (std::isfinite(rho)) rep.max_rho = std::max(rep.max_rho, rho);
  }
  return rep;
}

EnergyReport energy_from(const std::vector<LayerSample>& samples, double scale) {
  EnergyReport rep;
  for (const auto& s : samples) {
    const double rho = scale > 0.0 ? std::abs(s.E) / scale : 0.0;
    rep.rho.push_back(rho);
    rep.max_rho = std::max(rep.max_rho, rho);
  }
  return rep;
}

DiffIneqReport diff_from(const SpectralCluster& u, const std::vector<LayerSample>& samples,
                         const std::vector<double>& r_grid, double c_hat) {
  std::vector<double> L, dL;
  for (const auto& s : samples) {
    L.push_back(s.L);
    dL.push_back(s.dL);
  }
  const double n = l2_norm(u);
  const double l = u.lambda;
  auto rep = diff_ineq_slack(r_grid, L, dL, c_hat * layer_scale(u), 1e-4 * l * l * l * l * n * n);
  rep.c_hat = c_hat;
  return rep;
}

}  // namespace

CollarData collar(double r) {
  if (!(r >= 0.0 && r <= collar_depth)) throw DomainError("collar: r outside [0, 1/3]");
  const double rho = 1.0 - r;
  return {r, std::sqrt(rho), 0.25 / (rho * rho), 1.0 / (rho * rho), rho * rho};
}

LayerSample layer_sample(const SpectralCluster& u, double r) {
  collar(r);
  const auto& sp = disk_spectrum(u);
  LayerSample s;
  s.r = r;
  if (u.empty()) return s;
  const double rho = 1.0 - r;
  // Fourier coefficients of u, u_rho and H / sqrt(rho) per (order, parity)
  struct Coeffs {
    double a = 0.0, da = 0.0, b = 0.0;
  };
  std::map<std::pair<int, Parity>, Coeffs> modes;
  for (std::size_t m = 0; m < u.members.size(); ++m) {
    const double c = u.coeffs[static_cast<Eigen::Index>(m)];
    const auto& p = sp.pair(u.members[m]);
    const auto& d = std::get<DiskMode>(p.mode);
    const auto rv = radial(p, rho);
    auto& q = modes[{d.n, d.parity}];
    q.a += c * rv.f;
    q.da += c * rv.df;
    q.b += (u.lambda * u.lambda - p.lambda_sq) * c * rv.f;
  }
  double s0 = 0, s1 = 0, s2 = 0, sn = 0, sb = 0;
  for (const auto& [key, q] : modes) {
    const double w = angular_weight(key.first);
    const double n2 = static_cast<double>(key.first) * key.first;
    s0 += w * q.a * q.a;
    s1 += w * q.a * q.da;
    s2 += w * q.da * q.da;
    sn += w * n2 * q.a * q.a;
    sb += w * q.a * q.b;
  }
  const double l2 = u.lambda * u.lambda;
  s.L = rho * s0;
  s.dL = -(s0 + 2.0 * rho * s1);
  s.vr_sq = s0 / (4.0 * rho) + s1 + rho * s2;
  s.h_term = rho * sb;
  s.E = 0.5 * (s.vr_sq + (l2 * rho + 0.25 / rho) * s0 - sn / rho - s.h_term);
  return s;
}

double layer_norm(const SpectralCluster& u, double r) { return layer_sample(u, r).L; }

double energy(const SpectralCluster& u, double r) { return layer_sample(u, r).E; }

double v_value(const SpectralCluster& u, double r, double theta) {
  collar(r);
  return std::sqrt(1.0 - r) * point_values(u, 1.0 - r, theta).u;
}

double h_value(const SpectralCluster& u, double r, double theta) {
  collar(r);
  return std::sqrt(1.0 - r) * point_values(u, 1.0 - r, theta).H;
}

double v_equation_residual(const SpectralCluster& u, double r, double theta) {
  const auto cd = collar(r);
  const double rho = 1.0 - r, sq = std::sqrt(rho);
  const auto pv = point_values(u, rho, theta);
  const double v = sq * pv.u;
  // d/dr = -d/drho, so the second derivative keeps its sign
  const double v_rr = sq * pv.u_rr + pv.u_r / sq - pv.u / (4.0 * rho * sq);
  const double v_tt = sq * pv.u_tt;
  const double H = sq * pv.H;
  return std::abs(v_rr + cd.h_tt * v_tt + (u.lambda * u.lambda + cd.F) * v - H);
}

double collar_integral(const SpectralCluster& u) {
  const int m = 2 * static_cast<int>(std::ceil(u.lambda)) + 64;
  const auto rule = gauss_legendre(m).mapped(0.0, collar_depth);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += rule.weights[i] * layer_norm(u, rule.nodes[i]);
  return sum;
}

std::vector<double> linear_grid(double a, double b, int n) {
  if (n < 2 || !(b > a)) throw DomainError("linear grid needs n >= 2 and a < b");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

std::vector<double> parse_linear_grid(const std::string& text) {
  std::istringstream is(text);
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !is.eof())
    throw DomainError("grid must look like a:b:n, got '" + text + "'");
  return linear_grid(a, b, n);
}

double layer_scale(const SpectralCluster& u) {
  const double n = l2_norm(u);
  return std::sqrt(1.0 + u.s) * (u.lambda + u.s) * (u.lambda + u.s) * n * n;
}

BdyEstReport bdy_est_check(const SpectralCluster& u, const std::vector<double>& r_grid) {
  return bdy_from(sample_grid(u, r_grid, 1), layer_scale(u));
}

EnergyReport energy_bound_check(const SpectralCluster& u, const std::vector<double>& r_grid) {
  return energy_from(sample_grid(u, r_grid, 1), layer_scale(u));
}

DiffIneqReport diff_ineq_slack(const std::vector<double>& r, const std::vector<double>& L,
                               const std::vector<double>& dL, double c_scale, double tolerance) {
  const std::size_t n = r.size();
  if (L.size() != n || dL.size() != n || n < 3) throw DomainError("diff_ineq: need matching grids of >= 3 points");
  const double h = (r.back() - r.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(r[i] - r[i - 1] - h) > 1e-9 * h) throw DomainError("diff_ineq: r grid must be uniform");

  DiffIneqReport rep;
  rep.tolerance = tolerance;
  rep.slack.assign(n, nan_value);
  bool any = false;
  rep.min_slack = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = (L[i + 1] - 2.0 * L[i] + L[i - 1]) / (h * h);
    if (i >= 2 && i + 2 < n) {
      const double d2w = (L[i + 2] - 2.0 * L[i] + L[i - 2]) / (4.0 * h * h);
      rep.richardson_gap = std::max(rep.richardson_gap, std::abs(d2 - d2w));
    }
    if (L[i] < 1e-14) {
      ++rep.excluded;
      continue;
    }
    const double slack = d2 - dL[i] * dL[i] / L[i] + c_scale;
    rep.slack[i] = slack;
    rep.min_slack = any ? std::min(rep.min_slack, slack) : slack;
    any = true;
  }
  rep.passed = rep.min_slack >= -tolerance;
  return rep;
}

DiffIneqReport diff_ineq_check(const SpectralCluster& u, const std::vector<double>& r_grid,
                               std::optional<double> c_hat) {
  const auto samples = sample_grid(u, r_grid, 1);
  const double c = c_hat.value_or(4.0 * energy_from(samples, layer_scale(u)).max_rho);
  return diff_from(u, samples, r_grid, c);
}

LayerProfile layer_profile(const SpectralCluster& u, const std::vector<double>& r_grid, int jobs) {
  LayerProfile p;
  p.lambda = u.lambda;
  p.s = u.s;
  p.u_norm = l2_norm(u);
  p.samples = sample_grid(u, r_grid, jobs);
  const double scale = layer_scale(u);
  p.bdy = bdy_from(p.samples, scale);
  p.energy = energy_from(p.samples, scale);
  p.diff = diff_from(u, p.samples, r_grid, 4.0 * p.energy.max_rho);
  return p;
}

void write_profile_csv(std::ostream& os, const LayerProfile& p) {
  os << "r,L,E,rho_bdy,rho_energy,slack\n";
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i];
    os << format_double(s.r) << ',' << format_double(s.L) << ',' << format_double(s.E) << ','
       << format_double(p.bdy.rho[i]) << ',' << format_double(p.energy.rho[i]) << ','
       << format_double(p.diff.slack[i]) << '\n';
  }
}

nlohmann::json to_json(const LayerProfile& p) {
  nlohmann::json j;
  j["lambda"] = p.lambda;
  j["s"] = p.s;
  j["u_norm"] = p.u_norm;
  j["points"] = p.samples.size();
  j["L0"] = p.samples.empty() ? 0.0 : p.samples.front().L;
  j["E0"] = p.samples.empty() ? 0.0 : p.samples.front().E;
  j["max_rho_bdy"] = p.bdy.max_rho;
  j["energy_constant"] = p.energy.max_rho;
  j["diff_ineq"] = {{"c_hat", p.diff.c_hat},
                    {"min_slack", p.diff.min_slack},
                    {"tolerance", p.diff.tolerance},
                    {"richardson_gap", p.diff.richardson_gap},
                    {"excluded_points", p.diff.excluded},
                    {"passed", p.diff.passed}};
  return j;
}

}  // namespace specbound
