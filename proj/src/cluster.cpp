#include "specbound/cluster.hpp"

#include "specbound/errors.hpp"

#include <cmath>
#include <random>

namespace specbound {

Eigen::VectorXd SpectralCluster::defect_coeffs() const {
  if (members.empty()) return {};
  const Eigen::ArrayXd f = member_frequencies().array();
  return ((f * f - lambda * lambda) * coeffs.array()).matrix();
}

SpectralCluster make_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s,
                             const Eigen::VectorXd& coeffs) {
  if (!(lambda > 0.0) || !(s > 0.0)) throw DomainError("cluster needs lambda > 0 and s > 0");
  SpectralCluster u;
  u.lambda = lambda;
  u.s = s;
  u.members = spectrum->window(lambda, s);
  if (static_cast<std::size_t>(coeffs.size()) != u.members.size())
    throw DomainError("cluster has " + std::to_string(u.members.size()) + " members but " +
                      std::to_string(coeffs.size()) + " coefficients");
  u.coeffs = coeffs;
  u.spectrum = std::move(spectrum);
  return u;
}

Eigen::VectorXd random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  if (n == 0) return v;
  do {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

SpectralCluster random_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(spectrum->window(lambda, s).size());
  auto u = make_cluster(std::move(spectrum), lambda, s, random_unit_vector(n, seed));
  u.seed = seed;
  return u;
}

SpectralCluster project_cluster(std::shared_ptr<const Spectrum> spectrum, double lambda, double s,
                                const std::function<double(const Point&)>& f) {
  const auto members = spectrum->window(lambda, s);
  Eigen::VectorXd c = members.empty() ? Eigen::VectorXd() : spectrum->project(members, f);
  return make_cluster(std::move(spectrum), lambda, s, c);
}

double l2_norm(const SpectralCluster& u) { return u.empty() ? 0.0 : u.coeffs.norm(); }

double gradient_norm(const SpectralCluster& u) {
  if (u.empty()) return 0.0;
  return (u.member_frequencies().array() * u.coeffs.array()).matrix().norm();
}

double defect_norm(const SpectralCluster& u) { return u.empty() ? 0.0 : u.defect_coeffs().norm(); }

double defect_grad_norm(const SpectralCluster& u) {
  if (u.empty()) return 0.0;
  return (u.member_frequencies().array() * u.defect_coeffs().array()).matrix().norm();
}

double evaluate(const SpectralCluster& u, const Point& p) {
  if (!u.spectrum->domain().contains(p, 1e-12)) throw DomainError("cluster evaluated outside the domain");
  double v = 0.0;
  for (std::size_t k = 0; k < u.members.size(); ++k)
    v += u.coeffs[static_cast<Eigen::Index>(k)] * u.spectrum->value(u.members[k], p);
  return v;
}

Point gradient(const SpectralCluster& u, const Point& p) {
  if (!u.spectrum->domain().contains(p, 1e-12)) throw DomainError("cluster evaluated outside the domain");
  Point g = Point::Zero();
  for (std::size_t k = 0; k < u.members.size(); ++k)
    g += u.coeffs[static_cast<Eigen::Index>(k)] * u.spectrum->gradient(u.members[k], p);
  return g;
}

nlohmann::json to_json(const SpectralCluster& u) {
  nlohmann::json j;
  j["lambda"] = u.lambda;
  j["s"] = u.s;
  auto members = nlohmann::json::array();
  for (auto i : u.members)
    members.push_back({{"lambda_j", u.spectrum->frequency(i)}, {"mode", u.spectrum->label(i)}});
  j["members"] = members;
  j["coeffs"] = std::vector<double>(u.coeffs.data(), u.coeffs.data() + u.coeffs.size());
  if (u.seed)
    j["seed"] = *u.seed;
  else
    j["seed"] = nullptr;
  return j;
}

}  // namespace specbound
