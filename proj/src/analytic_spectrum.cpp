#include "specbound/analytic_spectrum.hpp"

#include "specbound/errors.hpp"
#include "specbound/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace specbound {
namespace {

constexpr double pi = std::numbers::pi;

const DiskMode* as_disk(const EigenPair& pair) { return std::get_if<DiskMode>(&pair.mode); }
const RectMode* as_rect(const EigenPair& pair) { return std::get_if<RectMode>(&pair.mode); }

// J_n(x) / x, finite at x = 0.
double bessel_over_x(int n, double x) {
  if (n == 0) return bessel_j(0, x) / x;
  return (bessel_j(n - 1, x) + bessel_j(n + 1, x)) / (2.0 * n);
}

// J_{-m} = (-1)^m J_m
double bessel_j_signed(int n, double x) {
  if (n >= 0) return bessel_j(n, x);
  return (-n % 2 == 0 ? 1.0 : -1.0) * bessel_j(-n, x);
}

struct Angular {
  double value;
  double deriv;  // d/dtheta
};

Angular angular(const DiskMode& mode, double theta) {
  const double c = std::cos(mode.n * theta);
  const double s = std::sin(mode.n * theta);
  if (mode.parity == Parity::cos) return {c, -mode.n * s};
  return {s, mode.n * c};
}

struct Polar {
  double rho;
  double theta;
};

Polar to_polar(const DomainSpec& d, const Point& p) {
  const Point r = p - d.center();
  return {r.norm(), std::atan2(r.y(), r.x())};
}

void require_inside(const EigenPair& pair, const Point& p) {
  const double scale = pair.domain.kind() == DomainKind::disk ? pair.domain.radius()
                                                              : std::max(pair.domain.width(), pair.domain.height());
  if (!pair.domain.contains(p, 1e-12 * scale)) throw DomainError("eigenfunction evaluated outside the domain");
}

struct RectFactors {
  double alpha, beta, sx, cx, sy, cy;
};

RectFactors rect_factors(const EigenPair& pair, const Point& p) {
  const auto& mode = *as_rect(pair);
  const auto& d = pair.domain;
  RectFactors f;
  f.alpha = mode.m * pi / d.width();
  f.beta = mode.n * pi / d.height();
  const double X = p.x() - d.corner().x();
  const double Y = p.y() - d.corner().y();
  f.sx = std::sin(f.alpha * X);
  f.cx = std::cos(f.alpha * X);
  f.sy = std::sin(f.beta * Y);
  f.cy = std::cos(f.beta * Y);
  return f;
}

// Rectangle sides in counterclockwise order: start corner, direction, length, normal.
struct Side {
  Point start;
  Point dir;
  double length;
  Point normal;
};

std::vector<Side> rectangle_sides(const DomainSpec& d) {
  const Point c = d.corner();
  const double a = d.width(), b = d.height();
  return {{c, {1, 0}, a, {0, -1}},
          {c + Point(a, 0), {0, 1}, b, {1, 0}},
          {c + Point(a, b), {-1, 0}, a, {0, 1}},
          {c + Point(0, b), {0, -1}, b, {-1, 0}}};
}

BoundaryTrace rectangle_nodal(const EigenPair& pair, int q, bool derivative) {
  BoundaryTrace t;
  t.kind = BoundaryTrace::Kind::nodal;
  t.measure = pair.domain.perimeter();
  const auto rule = gauss_legendre(q);
  const auto sides = rectangle_sides(pair.domain);
  t.nodes.reserve(4 * q);
  t.weights.resize(4 * q);
  t.values.resize(4 * q);
  int idx = 0;
  for (const auto& side : sides) {
    const auto mapped = rule.mapped(0.0, side.length);
    for (int i = 0; i < q; ++i, ++idx) {
      const Point p = side.start + mapped.nodes[i] * side.dir;
      t.nodes.push_back(p);
      t.weights[idx] = mapped.weights[i];
      t.values[idx] = derivative ? gradient(pair, p).dot(side.normal) : evaluate(pair, p);
    }
  }
  return t;
}

}  // namespace

std::string mode_label(const Mode& mode) {
  if (const auto* r = std::get_if<RectMode>(&mode))
    return "(" + std::to_string(r->m) + "," + std::to_string(r->n) + ")";
  const auto& d = std::get<DiskMode>(mode);
  return "(" + std::to_string(d.n) + "," + std::to_string(d.k) + "," +
         (d.parity == Parity::cos ? "cos" : "sin") + ")";
}

int EigenPair::angular_order() const {
  if (const auto* d = std::get_if<DiskMode>(&mode)) return d->n;
  return 0;
}

EigenPair make_eigenpair(const DomainSpec& domain, const Mode& mode) {
  EigenPair pair;
  pair.domain = domain;
  pair.mode = mode;
  if (domain.kind() == DomainKind::rectangle) {
    const auto* r = std::get_if<RectMode>(&mode);
    if (r == nullptr || r->m < 1 || r->n < 1) throw DomainError("rectangle mode needs m, n >= 1");
    const double a = domain.width(), b = domain.height();
    pair.lambda_sq = pi * pi * (static_cast<double>(r->m) * r->m / (a * a) + static_cast<double>(r->n) * r->n / (b * b));
    pair.lambda = std::sqrt(pair.lambda_sq);
    pair.norm_const = 2.0 / std::sqrt(a * b);
    return pair;
  }
  if (domain.kind() == DomainKind::disk) {
    const auto* d = std::get_if<DiskMode>(&mode);
    if (d == nullptr || d->n < 0 || d->k < 1 || (d->parity == Parity::sin && d->n == 0))
      throw DomainError("disk mode needs n >= 0, k >= 1, and n >= 1 for the sine parity");
    const double R = domain.radius();
    const double j = bessel_zero(d->n, d->k);
    pair.lambda = j / R;
    pair.lambda_sq = pair.lambda * pair.lambda;
    const double jn1 = std::abs(bessel_j(d->n + 1, j));
    pair.norm_const = (d->n == 0 ? 1.0 : std::sqrt(2.0)) / (R * std::sqrt(pi) * jn1);
    return pair;
  }
  throw UnsupportedError("no closed-form spectrum for polygons; use the FEM solver");
}

std::vector<EigenPair> eigenpairs_below(const DomainSpec& domain, double cutoff) {
  std::vector<EigenPair> out;
  if (domain.kind() == DomainKind::polygon)
    throw UnsupportedError("no closed-form spectrum for polygons; use the FEM solver");
  if (domain.kind() == DomainKind::rectangle) {
    const double a = domain.width(), b = domain.height();
    for (int m = 1; m * pi / a < cutoff; ++m)
      for (int n = 1; n * pi / b < cutoff; ++n) {
        auto pair = make_eigenpair(domain, RectMode{m, n});
        if (pair.lambda < cutoff) out.push_back(std::move(pair));
      }
  } else {
    const double R = domain.radius();
    for (int n = 0; n < cutoff * R; ++n) {
      const auto zeros = bessel_zeros_below(n, cutoff * R);
      for (std::size_t k = 0; k < zeros.size(); ++k) {
        out.push_back(make_eigenpair(domain, DiskMode{n, static_cast<int>(k) + 1, Parity::cos}));
        if (n > 0) out.push_back(make_eigenpair(domain, DiskMode{n, static_cast<int>(k) + 1, Parity::sin}));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& x, const EigenPair& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return x.mode < y.mode;
  });
  return out;
}

double weyl_count(const DomainSpec& domain, double cutoff) {
  return domain.area() * cutoff * cutoff / (4.0 * pi) - domain.perimeter() * cutoff / (4.0 * pi);
}

double evaluate(const EigenPair& pair, const Point& p) {
  require_inside(pair, p);
  if (const auto* d = as_disk(pair)) {
    const auto [rho, theta] = to_polar(pair.domain, p);
    return pair.norm_const * bessel_j(d->n, pair.lambda * rho) * angular(*d, theta).value;
  }
  const auto f = rect_factors(pair, p);
  return pair.norm_const * f.sx * f.sy;
}

Point gradient(const EigenPair& pair, const Point& p) {
  require_inside(pair, p);
  if (const auto* d = as_disk(pair)) {
    const auto [rho, theta] = to_polar(pair.domain, p);
    const double x = pair.lambda * rho;
    const auto ang = angular(*d, theta);
    const double radial = pair.norm_const * pair.lambda * bessel_j_deriv(d->n, x) * ang.value;
    const double tangential =
        d->n == 0 ? 0.0 : pair.norm_const * pair.lambda * bessel_over_x(d->n, x) * ang.deriv;
    const Point er(std::cos(theta), std::sin(theta));
    const Point et(-std::sin(theta), std::cos(theta));
    return radial * er + tangential * et;
  }
  const auto f = rect_factors(pair, p);
  return pair.norm_const * Point(f.alpha * f.cx * f.sy, f.beta * f.sx * f.cy);
}

double laplacian(const EigenPair& pair, const Point& p) {
  require_inside(pair, p);
  if (const auto* d = as_disk(pair)) {
    const auto [rho, theta] = to_polar(pair.domain, p);
    if (rho <= 0.0) throw DomainError("laplacian: polar form undefined at the center");
    const int n = d->n;
    const double x = pair.lambda * rho;
    const double j = bessel_j(n, x);
    const double jp = bessel_j_deriv(n, x);
    const double jpp = (bessel_j_signed(n - 2, x) - 2.0 * j + bessel_j(n + 2, x)) / 4.0;
    const double l2 = pair.lambda_sq;
    const double radial = l2 * (jpp + jp / x - static_cast<double>(n) * n * j / (x * x));
    return pair.norm_const * radial * angular(*d, theta).value;
  }
  const auto f = rect_factors(pair, p);
  return -pair.norm_const * (f.alpha * f.alpha + f.beta * f.beta) * f.sx * f.sy;
}

double normal_derivative(const EigenPair& pair, const Point& boundary_point) {
  const Point nu = pair.domain.outward_normal(boundary_point);
  if (const auto* d = as_disk(pair)) {
    const auto [rho, theta] = to_polar(pair.domain, boundary_point);
    (void)rho;
    return pair.norm_const * pair.lambda * bessel_j_deriv(d->n, pair.lambda * pair.domain.radius()) *
           angular(*d, theta).value;
  }
  return gradient(pair, boundary_point).dot(nu);
}

double BoundaryTrace::at_angle(double theta) const {
  if (kind != Kind::fourier) throw UnsupportedError("at_angle needs a Fourier trace");
  double v = 0.0;
  for (Eigen::Index n = 0; n < cos_coeffs.size(); ++n) v += cos_coeffs[n] * std::cos(n * theta);
  for (Eigen::Index n = 0; n < sin_coeffs.size(); ++n) v += sin_coeffs[n] * std::sin(n * theta);
  return v;
}

BoundaryTrace& BoundaryTrace::add_scaled(double alpha, const BoundaryTrace& other) {
  if (kind != other.kind) throw UnsupportedError("add_scaled: trace representations differ");
  if (kind == Kind::fourier) {
    const auto grow = [](Eigen::VectorXd& v, Eigen::Index n) {
      if (v.size() < n) v.conservativeResizeLike(Eigen::VectorXd::Zero(n));
    };
    grow(cos_coeffs, other.cos_coeffs.size());
    grow(sin_coeffs, other.sin_coeffs.size());
    cos_coeffs.head(other.cos_coeffs.size()) += alpha * other.cos_coeffs;
    sin_coeffs.head(other.sin_coeffs.size()) += alpha * other.sin_coeffs;
    radius = other.radius;
    measure = other.measure;
  } else {
    if (values.size() == 0) {
      nodes = other.nodes;
      weights = other.weights;
      values = Eigen::VectorXd::Zero(other.values.size());
      measure = other.measure;
    }
    if (values.size() != other.values.size()) throw UnsupportedError("add_scaled: nodal grids differ");
    values += alpha * other.values;
  }
  return *this;
}

int rectangle_trace_nodes(const DomainSpec& domain, double lambda) {
  return std::max(48, static_cast<int>(std::ceil(lambda * std::max(domain.width(), domain.height()))) + 32);
}

BoundaryTrace normal_trace(const EigenPair& pair, int nodes_per_side) {
  if (const auto* d = as_disk(pair)) {
    BoundaryTrace t;
    t.kind = BoundaryTrace::Kind::fourier;
    t.radius = pair.domain.radius();
    t.measure = pair.domain.perimeter();
    t.cos_coeffs = Eigen::VectorXd::Zero(d->n + 1);
    t.sin_coeffs = Eigen::VectorXd::Zero(d->n + 1);
    const double coeff = pair.norm_const * pair.lambda * bessel_j_deriv(d->n, pair.lambda * t.radius);
    (d->parity == Parity::cos ? t.cos_coeffs : t.sin_coeffs)[d->n] = coeff;
    return t;
  }
  const int q = nodes_per_side > 0 ? nodes_per_side : rectangle_trace_nodes(pair.domain, pair.lambda);
  return rectangle_nodal(pair, q, true);
}

BoundaryTrace value_trace(const EigenPair& pair, int nodes_per_side) {
  if (pair.domain.kind() == DomainKind::rectangle) return rectangle_nodal(pair, nodes_per_side, false);
  BoundaryTrace t;
  t.kind = BoundaryTrace::Kind::nodal;
  const double R = pair.domain.radius();
  t.measure = pair.domain.perimeter();
  const int m = 4 * nodes_per_side;
  t.weights = Eigen::VectorXd::Constant(m, 2.0 * pi * R / m);
  t.values.resize(m);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * pi * i / m;
    const Point p = pair.domain.center() + R * Point(std::cos(theta), std::sin(theta));
    t.nodes.push_back(p);
    t.values[i] = evaluate(pair, p);
  }
  return t;
}

double trace_hk_inner(const BoundaryTrace& a, const BoundaryTrace& b, double k) {
  if (a.kind != BoundaryTrace::Kind::fourier || b.kind != BoundaryTrace::Kind::fourier)
    throw UnsupportedError("H^k norms need Fourier traces (disk domains)");
  const auto sum = [k](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = std::min(x.size(), y.size());
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = (i == 0 ? 2.0 * pi : pi) * std::pow(1.0 + static_cast<double>(i * i), k);
      s += w * x[i] * y[i];
    }
    return s;
  };
  // sine coefficient at n = 0 multiplies sin(0) and carries no mass
  Eigen::VectorXd as = a.sin_coeffs, bs = b.sin_coeffs;
  if (as.size() > 0) as[0] = 0.0;
  if (bs.size() > 0) bs[0] = 0.0;
  return a.radius * (sum(a.cos_coeffs, b.cos_coeffs) + sum(as, bs));
}

double trace_inner(const BoundaryTrace& a, const BoundaryTrace& b) {
  if (a.kind != b.kind) throw UnsupportedError("trace_inner: trace representations differ");
  if (a.kind == BoundaryTrace::Kind::fourier) return trace_hk_inner(a, b, 0.0);
  if (a.values.size() != b.values.size()) throw UnsupportedError("trace_inner: nodal grids differ");
  return (a.weights.array() * a.values.array() * b.values.array()).sum();
}

double trace_l2(const BoundaryTrace& t) { return std::sqrt(std::max(0.0, trace_inner(t, t))); }

double trace_hk(const BoundaryTrace& t, double k) {
  if (t.kind != BoundaryTrace::Kind::fourier)
    throw UnsupportedError("H^k norms need Fourier traces (disk domains)");
  return std::sqrt(std::max(0.0, trace_hk_inner(t, t, k)));
}

double normal_ratio_squared(const EigenPair& pair) {
  if (as_disk(pair)) return 2.0;
  const auto& r = *as_rect(pair);
  const double a = pair.domain.width(), b = pair.domain.height();
  return 4.0 * pi * pi * (r.m * r.m / (a * a * a) + r.n * r.n / (b * b * b)) / pair.lambda_sq;
}

std::size_t DomainQuadrature::size() const {
  if (domain.kind() == DomainKind::disk) return static_cast<std::size_t>(radial_nodes.size() * angles.size());
  return static_cast<std::size_t>(x_nodes.size() * y_nodes.size());
}

Point DomainQuadrature::point(std::size_t i) const {
  if (domain.kind() == DomainKind::disk) {
    const auto na = static_cast<std::size_t>(angles.size());
    const double rho = radial_nodes[static_cast<Eigen::Index>(i / na)];
    const double theta = angles[static_cast<Eigen::Index>(i % na)];
    return domain.center() + rho * Point(std::cos(theta), std::sin(theta));
  }
  const auto ny = static_cast<std::size_t>(y_nodes.size());
  return Point(x_nodes[static_cast<Eigen::Index>(i / ny)], y_nodes[static_cast<Eigen::Index>(i % ny)]);
}

double DomainQuadrature::weight(std::size_t i) const {
  if (domain.kind() == DomainKind::disk) {
    const auto na = static_cast<std::size_t>(angles.size());
    return radial_weights[static_cast<Eigen::Index>(i / na)] * 2.0 * pi / static_cast<double>(na);
  }
  const auto ny = static_cast<std::size_t>(y_nodes.size());
  return x_weights[static_cast<Eigen::Index>(i / ny)] * y_weights[static_cast<Eigen::Index>(i % ny)];
}

DomainQuadrature domain_quadrature(const DomainSpec& domain, double lambda_max, int n1, int n2) {
  DomainQuadrature q;
  q.domain = domain;
  if (domain.kind() == DomainKind::disk) {
    const double R = domain.radius();
    const int nr = n1 > 0 ? n1 : std::max(64, static_cast<int>(std::ceil(lambda_max * R)) + 48);
    const int na = n2 > 0 ? n2 : std::max(256, 4 * static_cast<int>(std::ceil(lambda_max * R)) + 16);
    const auto rule = gauss_legendre(nr).mapped(0.0, R);
    q.radial_nodes = rule.nodes;
    q.radial_weights = (rule.weights.array() * rule.nodes.array()).matrix();
    q.angles.resize(na);
    for (int i = 0; i < na; ++i) q.angles[i] = 2.0 * pi * i / na;
    return q;
  }
  if (domain.kind() == DomainKind::rectangle) {
    const int def = std::max(64, static_cast<int>(std::ceil(lambda_max * std::max(domain.width(), domain.height()))) + 48);
    const int nx = n1 > 0 ? n1 : def;
    const int ny = n2 > 0 ? n2 : def;
    const auto rx = gauss_legendre(nx).mapped(domain.corner().x(), domain.corner().x() + domain.width());
    const auto ry = gauss_legendre(ny).mapped(domain.corner().y(), domain.corner().y() + domain.height());
    q.x_nodes = rx.nodes;
    q.x_weights = rx.weights;
    q.y_nodes = ry.nodes;
    q.y_weights = ry.weights;
    return q;
  }
  throw UnsupportedError("domain_quadrature: disks and rectangles only");
}

QuadratureSamples sample(const std::vector<EigenPair>& pairs, const DomainQuadrature& quad) {
  const auto nq = static_cast<Eigen::Index>(quad.size());
  const auto m = static_cast<Eigen::Index>(pairs.size());
  QuadratureSamples s;
  s.value.resize(nq, m);
  s.dx.resize(nq, m);
  s.dy.resize(nq, m);
  s.weights.resize(nq);
  s.points.resize(2, nq);
  for (Eigen::Index i = 0; i < nq; ++i) {
    s.weights[i] = quad.weight(static_cast<std::size_t>(i));
    s.points.col(i) = quad.point(static_cast<std::size_t>(i));
  }

  if (quad.domain.kind() == DomainKind::disk) {
    const Eigen::Index nr = quad.radial_nodes.size();
    const Eigen::Index na = quad.angles.size();
    Eigen::VectorXd cosa = quad.angles.array().cos();
    Eigen::VectorXd sina = quad.angles.array().sin();
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto& pair = pairs[static_cast<std::size_t>(c)];
      const auto& d = std::get<DiskMode>(pair.mode);
      Eigen::VectorXd J(nr), Jp(nr), Jx(nr);
      for (Eigen::Index r = 0; r < nr; ++r) {
        const double x = pair.lambda * quad.radial_nodes[r];
        J[r] = bessel_j(d.n, x);
        Jp[r] = bessel_j_deriv(d.n, x);
        Jx[r] = d.n == 0 ? 0.0 : bessel_over_x(d.n, x);
      }
      Eigen::VectorXd T(na), dT(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        const auto ang = angular(d, quad.angles[a]);
        T[a] = ang.value;
        dT[a] = ang.deriv;
      }
      const double cst = pair.norm_const;
      const double lam = pair.lambda;
      for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index a = 0; a < na; ++a) {
          const Eigen::Index i = r * na + a;
          const double radial = cst * lam * Jp[r] * T[a];
          const double tangential = cst * lam * Jx[r] * dT[a];
          s.value(i, c) = cst * J[r] * T[a];
          s.dx(i, c) = radial * cosa[a] - tangential * sina[a];
          s.dy(i, c) = radial * sina[a] + tangential * cosa[a];
        }
    }
    return s;
  }

  const Eigen::Index nx = quad.x_nodes.size();
  const Eigen::Index ny = quad.y_nodes.size();
  for (Eigen::Index c = 0; c < m; ++c) {
    const auto& pair = pairs[static_cast<std::size_t>(c)];
    const auto& r = std::get<RectMode>(pair.mode);
    const double alpha = r.m * pi / pair.domain.width();
    const double beta = r.n * pi / pair.domain.height();
    const Eigen::ArrayXd X = quad.x_nodes.array() - pair.domain.corner().x();
    const Eigen::ArrayXd Y = quad.y_nodes.array() - pair.domain.corner().y();
    const Eigen::ArrayXd sx = (alpha * X).sin(), cx = (alpha * X).cos();
    const Eigen::ArrayXd sy = (beta * Y).sin(), cy = (beta * Y).cos();
    const double N = pair.norm_const;
    for (Eigen::Index ix = 0; ix < nx; ++ix)
      for (Eigen::Index iy = 0; iy < ny; ++iy) {
        const Eigen::Index i = ix * ny + iy;
        s.value(i, c) = N * sx[ix] * sy[iy];
        s.dx(i, c) = N * alpha * cx[ix] * sy[iy];
        s.dy(i, c) = N * beta * sx[ix] * cy[iy];
      }
  }
  return s;
}

void write_spectrum_csv(std::ostream& os, const std::vector<EigenPair>& pairs) {
  os << "lambda,mode_m_or_n,mode_n_or_k,parity,norm_const\n";
  char buf[160];
  for (const auto& p : pairs) {
    int first = 0, second = 0;
    const char* parity = "none";
    if (const auto* r = std::get_if<RectMode>(&p.mode)) {
      first = r->m;
      second = r->n;
    } else {
      const auto& d = std::get<DiskMode>(p.mode);
      first = d.n;
      second = d.k;
      parity = d.parity == Parity::cos ? "cos" : "sin";
    }
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%s,%.17g\n", p.lambda, first, second, parity, p.norm_const);
    os << buf;
  }
}

}  // namespace specbound
