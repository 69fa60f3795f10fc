#include "specbound/spectrum.hpp"

#include "specbound/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <cmath>
#include <numbers>

namespace specbound {

Indices Spectrum::window(double lo, double width, WindowKind kind) const {
  Indices out;
  if (kind == WindowKind::upper_closed) {
    if (lo >= complete_below()) throw DomainError("window (0, lambda] exceeds the computed spectrum");
    for (std::size_t i = 0; i < size() && frequency(i) <= lo; ++i)
      if (frequency(i) > 0.0) out.push_back(i);
    return out;
  }
  if (!(width > 0.0)) throw DomainError("window width must be positive");
  if (lo + width > complete_below()) throw DomainError("window [lambda, lambda+s) exceeds the computed spectrum");
  for (std::size_t i = 0; i < size() && frequency(i) < lo + width; ++i)
    if (frequency(i) >= lo) out.push_back(i);
  return out;
}

Eigen::VectorXd Spectrum::frequencies(const Indices& idx) const {
  Eigen::VectorXd f(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) f[static_cast<Eigen::Index>(i)] = frequency(idx[i]);
  return f;
}

// ---------------------------------------------------------------------------

AnalyticSpectrum::AnalyticSpectrum(const DomainSpec& domain, double cutoff)
    : domain_(domain), cutoff_(cutoff), pairs_(eigenpairs_below(domain, cutoff)) {
  const int q = domain.kind() == DomainKind::rectangle ? rectangle_trace_nodes(domain, cutoff) : 0;
  traces_.reserve(pairs_.size());
  for (const auto& p : pairs_) traces_.push_back(normal_trace(p, q));
}

double AnalyticSpectrum::value(std::size_t i, const Point& p) const { return evaluate(pairs_[i], p); }
Point AnalyticSpectrum::gradient(std::size_t i, const Point& p) const { return specbound::gradient(pairs_[i], p); }

Eigen::MatrixXd AnalyticSpectrum::trace_gram(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd G(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto& a = traces_[idx[static_cast<std::size_t>(i)]];
      const auto& b = traces_[idx[static_cast<std::size_t>(j)]];
      double v = 0.0;
      if (a.kind == BoundaryTrace::Kind::fourier) {
        // only matching angular orders and parities overlap
        const auto& da = std::get<DiskMode>(pairs_[idx[static_cast<std::size_t>(i)]].mode);
        const auto& db = std::get<DiskMode>(pairs_[idx[static_cast<std::size_t>(j)]].mode);
        if (da.n == db.n && da.parity == db.parity) v = trace_inner(a, b);
      } else {
        v = trace_inner(a, b);
      }
      G(i, j) = G(j, i) = v;
    }
  return G;
}

Eigen::MatrixXd AnalyticSpectrum::trace_factor(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (domain_.kind() != DomainKind::disk) {
    if (m == 0) return {};
    const auto& first = traces_[idx[0]];
    Eigen::MatrixXd B(first.values.size(), m);
    for (Eigen::Index c = 0; c < m; ++c) B.col(c) = traces_[idx[static_cast<std::size_t>(c)]].values;
    return first.weights.cwiseSqrt().asDiagonal() * B;
  }
  // one row per (order, parity) present in the window
  std::map<std::pair<int, Parity>, Eigen::Index> rows;
  for (auto i : idx) {
    const auto& d = std::get<DiskMode>(pairs_[i].mode);
    rows.try_emplace({d.n, d.parity}, static_cast<Eigen::Index>(rows.size()));
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const auto& d = std::get<DiskMode>(pairs_[idx[static_cast<std::size_t>(c)]].mode);
    const auto& t = traces_[idx[static_cast<std::size_t>(c)]];
    const double a = (d.parity == Parity::cos ? t.cos_coeffs : t.sin_coeffs)[d.n];
    const double w = d.n == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
    B(rows.at({d.n, d.parity}), c) = std::sqrt(t.radius * w) * a;
  }
  return B;
}

Eigen::MatrixXd AnalyticSpectrum::weighted_trace_gram(const Indices& idx, const Point& origin) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (m == 0) return {};
  Eigen::MatrixXd T;  // boundary nodes x members
  Eigen::VectorXd w;
  if (domain_.kind() == DomainKind::disk) {
    const double R = domain_.radius();
    int nmax = 0;
    for (auto i : idx) nmax = std::max(nmax, pairs_[i].angular_order());
    const int N = 4 * nmax + 16;
    T.resize(N, m);
    w.resize(N);
    for (int k = 0; k < N; ++k) {
      const double th = 2.0 * std::numbers::pi * k / N;
      const Point nu(std::cos(th), std::sin(th));
      w[k] = (domain_.center() + R * nu - origin).dot(nu) * 2.0 * std::numbers::pi * R / N;
      for (Eigen::Index c = 0; c < m; ++c) T(k, c) = traces_[idx[static_cast<std::size_t>(c)]].at_angle(th);
    }
  } else {
    const auto& first = traces_[idx[0]];
    const auto n = first.values.size();
    T.resize(n, m);
    w.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Point& x = first.nodes[static_cast<std::size_t>(k)];
      w[k] = first.weights[k] * (x - origin).dot(domain_.outward_normal(x));
    }
    for (Eigen::Index c = 0; c < m; ++c) T.col(c) = traces_[idx[static_cast<std::size_t>(c)]].values;
  }
  return T.transpose() * w.asDiagonal() * T;
}

QuadratureSamples AnalyticSpectrum::samples(const Indices& idx) const {
  double lmax = 0.0;
  std::vector<EigenPair> sub;
  sub.reserve(idx.size());
  for (auto i : idx) {
    sub.push_back(pairs_[i]);
    lmax = std::max(lmax, pairs_[i].lambda);
  }
  return sample(sub, domain_quadrature(domain_, lmax));
}

Eigen::MatrixXd AnalyticSpectrum::multiplier_matrix(const Indices& idx, const Point& origin) const {
  if (idx.empty()) return {};
  const auto s = samples(idx);
  const Eigen::VectorXd rx = s.points.row(0).transpose().array() - origin.x();
  const Eigen::VectorXd ry = s.points.row(1).transpose().array() - origin.y();
  const Eigen::MatrixXd Av = rx.asDiagonal() * s.dx + ry.asDiagonal() * s.dy;
  return s.value.transpose() * s.weights.asDiagonal() * Av;
}

Eigen::MatrixXd AnalyticSpectrum::mass_matrix(const Indices& idx) const {
  if (idx.empty()) return {};
  const auto s = samples(idx);
  return s.value.transpose() * s.weights.asDiagonal() * s.value;
}

Eigen::MatrixXd AnalyticSpectrum::stiffness_matrix(const Indices& idx) const {
  if (idx.empty()) return {};
  const auto s = samples(idx);
  return s.dx.transpose() * s.weights.asDiagonal() * s.dx + s.dy.transpose() * s.weights.asDiagonal() * s.dy;
}

Eigen::VectorXd AnalyticSpectrum::project(const Indices& idx, const std::function<double(const Point&)>& f) const {
  if (idx.empty()) return {};
  const auto s = samples(idx);
  Eigen::VectorXd fw(s.weights.size());
  for (Eigen::Index i = 0; i < fw.size(); ++i) fw[i] = s.weights[i] * f(s.points.col(i));
  return s.value.transpose() * fw;
}

// ---------------------------------------------------------------------------

FemSpectrum::FemSpectrum(const DomainSpec& domain, std::shared_ptr<const FemSystem> system, int count,
                         const EigOptions& options)
    : domain_(domain), system_(std::move(system)) {
  pairs_ = solve_eigs(system_, count, options);
  nodal_.resize(static_cast<Eigen::Index>(system_->mesh.vertices.size()), count);
  for (int i = 0; i < count; ++i) {
    fluxes_.push_back(recover_flux(pairs_[static_cast<std::size_t>(i)]));
    nodal_.col(i) = pairs_[static_cast<std::size_t>(i)].nodal_values();
  }
}

double FemSpectrum::complete_below() const { return pairs_.empty() ? 0.0 : pairs_.back().lambda; }

std::pair<std::size_t, Eigen::Vector3d> FemSpectrum::locate(const Point& p) const {
  const auto& mesh = system_->mesh;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Point& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Point& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const Point d = p - a;
    const double l1 = (d.x() * (c - a).y() - d.y() * (c - a).x()) / det;
    const double l2 = ((b - a).x() * d.y() - (b - a).y() * d.x()) / det;
    const double l0 = 1.0 - l1 - l2;
    const double tol = -1e-12;
    if (l0 >= tol && l1 >= tol && l2 >= tol) return {t, Eigen::Vector3d(l0, l1, l2)};
  }
  throw DomainError("point outside the mesh");
}

double FemSpectrum::value(std::size_t i, const Point& p) const {
  const auto [t, bary] = locate(p);
  const auto& tri = system_->mesh.triangles[t];
  double v = 0.0;
  for (int k = 0; k < 3; ++k) v += bary[k] * nodal_(tri[k], static_cast<Eigen::Index>(i));
  return v;
}

Point FemSpectrum::gradient(std::size_t i, const Point& p) const {
  const auto [t, bary] = locate(p);
  (void)bary;
  const auto& mesh = system_->mesh;
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
  const Point e1 = mesh.vertices[static_cast<std::size_t>(tri[1])] - a;
  const Point e2 = mesh.vertices[static_cast<std::size_t>(tri[2])] - a;
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  const auto c = static_cast<Eigen::Index>(i);
  const double d1 = nodal_(tri[1], c) - nodal_(tri[0], c);
  const double d2 = nodal_(tri[2], c) - nodal_(tri[0], c);
  // solve [e1 e2]^T g = [d1 d2]
  return Point((d1 * e2.y() - d2 * e1.y()) / det, (e1.x() * d2 - e2.x() * d1) / det);
}

Eigen::MatrixXd FemSpectrum::trace_gram(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd P(system_->matrices.B.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) P.col(c) = fluxes_[idx[static_cast<std::size_t>(c)]].psi;
  return P.transpose() * (system_->matrices.B * P);
}

Eigen::MatrixXd FemSpectrum::weighted_trace_gram(const Indices& idx, const Point& origin) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  const auto& mesh = system_->mesh;
  for (const auto& e : mesh.boundary) {
    const double w = (mesh.vertices[static_cast<std::size_t>(e.a)] - origin).dot(e.normal) * e.length / 6.0;
    Eigen::VectorXd pa(m), pb(m);
    for (Eigen::Index c = 0; c < m; ++c) {
      pa[c] = fluxes_[idx[static_cast<std::size_t>(c)]].at_vertex(e.a);
      pb[c] = fluxes_[idx[static_cast<std::size_t>(c)]].at_vertex(e.b);
    }
    // exact P1 edge mass: (L/6) [2 1; 1 2]
    G += w * (2.0 * pa * pa.transpose() + 2.0 * pb * pb.transpose() + pa * pb.transpose() + pb * pa.transpose());
  }
  return G;
}

Eigen::MatrixXd FemSpectrum::trace_factor(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  const auto& mesh = system_->mesh;
  Eigen::MatrixXd B(2 * static_cast<Eigen::Index>(mesh.boundary.size()), m);
  // (L/6) [2 1; 1 2] = F^T F with F = sqrt(L/6) [sqrt2 1/sqrt2; 0 sqrt(3/2)]
  Eigen::Index row = 0;
  for (const auto& e : mesh.boundary) {
    const double g = std::sqrt(e.length / 6.0);
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto& f = fluxes_[idx[static_cast<std::size_t>(c)]];
      const double pa = f.at_vertex(e.a), pb = f.at_vertex(e.b);
      B(row, c) = g * (std::sqrt(2.0) * pa + pb / std::sqrt(2.0));
      B(row + 1, c) = g * std::sqrt(1.5) * pb;
    }
    row += 2;
  }
  return B;
}

Eigen::MatrixXd FemSpectrum::multiplier_matrix(const Indices& idx, const Point& origin) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(m, m);
  const auto& mesh = system_->mesh;
  Eigen::Matrix<double, 3, Eigen::Dynamic> U(3, m);
  for (const auto& tri : mesh.triangles) {
    const Point& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Point& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Point& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const Point e1 = p1 - p0, e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    const double area = 0.5 * std::abs(det);
    Eigen::Matrix<double, 2, 3> G;
    G.col(1) = Point(e2.y(), -e2.x()) / det;
    G.col(2) = Point(-e1.y(), e1.x()) / det;
    G.col(0) = -G.col(1) - G.col(2);
    for (int k = 0; k < 3; ++k)
      for (Eigen::Index c = 0; c < m; ++c) U(k, c) = nodal_(tri[k], static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
    const Eigen::Matrix<double, 2, Eigen::Dynamic> grads = G * U;
    const Point pts[3] = {p0, p1, p2};
    // edge-midpoint rule, exact for the quadratic integrand
    for (int k = 0; k < 3; ++k) {
      const int l = (k + 1) % 3;
      const Point mid = 0.5 * (pts[k] + pts[l]);
      const Eigen::RowVectorXd ev = 0.5 * (U.row(k) + U.row(l));
      const Eigen::RowVectorXd av = (mid - origin).transpose() * grads;
      X += (area / 3.0) * ev.transpose() * av;
    }
  }
  return X;
}

Eigen::MatrixXd FemSpectrum::mass_matrix(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd C(nodal_.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) C.col(c) = nodal_.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
  return C.transpose() * (system_->matrices.M * C);
}

Eigen::MatrixXd FemSpectrum::stiffness_matrix(const Indices& idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd C(nodal_.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) C.col(c) = nodal_.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
  return C.transpose() * (system_->matrices.K * C);
}

Eigen::VectorXd FemSpectrum::project(const Indices& idx, const std::function<double(const Point&)>& f) const {
  const auto& mesh = system_->mesh;
  Eigen::VectorXd fv(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) fv[static_cast<Eigen::Index>(v)] = f(mesh.vertices[v]);
  const Eigen::VectorXd Mf = system_->matrices.M * fv;
  Eigen::VectorXd c(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
    c[static_cast<Eigen::Index>(k)] = nodal_.col(static_cast<Eigen::Index>(idx[k])).dot(Mf);
  return c;
}

}  // namespace specbound
