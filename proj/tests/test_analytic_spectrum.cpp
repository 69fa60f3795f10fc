#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/analytic_spectrum.hpp"
#include "specbound/errors.hpp"
#include "specbound/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace specbound;

namespace {

constexpr double pi = std::numbers::pi;

// J_n through Bessel's integral; independent of the library's recurrences.
double j_integral(int n, double x) {
  const int m = 2048;
  double sum = 0.0;
  for (int i = 0; i < 2 * m; ++i) {
    const double t = pi * (i + 0.5) / m;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / (2.0 * m);
}

// ||d_nu e||^2 on an a x b rectangle by the midpoint rule on each side,
// using the hand-differentiated closed form.
double rect_flux_oracle(double a, double b, int m, int n) {
  const double N = 2.0 / std::sqrt(a * b);
  const double al = m * pi / a, be = n * pi / b;
  const int q = 20000;
  double s = 0.0;
  for (int i = 0; i < q; ++i) {
    const double x = a * (i + 0.5) / q;
    const double y = b * (i + 0.5) / q;
    const double bottom = N * be * std::sin(al * x);              // y = 0 and y = b
    const double left = N * al * std::sin(be * y);                // x = 0 and x = a
    s += 2.0 * bottom * bottom * a / q + 2.0 * left * left * b / q;
  }
  return s;
}

}  // namespace

TEST_CASE("eigenpairs_below examples") {
  const auto square = DomainSpec::rectangle(1.0, 1.0);
  const auto s5 = eigenpairs_below(square, 5.0);
  REQUIRE(s5.size() == 1);
  CHECK(std::get<RectMode>(s5[0].mode) == RectMode{1, 1});
  CHECK(s5[0].lambda == doctest::Approx(pi * std::sqrt(2.0)).epsilon(1e-15));

  CHECK(eigenpairs_below(square, pi * std::sqrt(2.0)).empty());
  CHECK(eigenpairs_below(square, 1.0).empty());

  const auto disk = DomainSpec::disk(1.0);
  const auto d4 = eigenpairs_below(disk, 4.0);
  REQUIRE(d4.size() == 3);
  CHECK(std::get<DiskMode>(d4[0].mode) == DiskMode{0, 1, Parity::cos});
  CHECK(std::get<DiskMode>(d4[1].mode) == DiskMode{1, 1, Parity::cos});
  CHECK(std::get<DiskMode>(d4[2].mode) == DiskMode{1, 1, Parity::sin});
  CHECK(d4[0].lambda == doctest::Approx(2.404825557695773).epsilon(1e-12));
  CHECK(d4[1].lambda == doctest::Approx(3.831705970207512).epsilon(1e-12));

  const auto L = DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  CHECK_THROWS_AS(eigenpairs_below(L, 10.0), UnsupportedError);
}

TEST_CASE("ordering, ties, and the disk radius scaling") {
  const auto square = DomainSpec::rectangle(1.0, 1.0);
  const auto pairs = eigenpairs_below(square, 12.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    REQUIRE(pairs[i - 1].lambda <= pairs[i].lambda);
    if (pairs[i - 1].lambda == pairs[i].lambda) REQUIRE(pairs[i - 1].mode < pairs[i].mode);
  }
  // (1,2) before (2,1)
  CHECK(std::get<RectMode>(pairs[1].mode) == RectMode{1, 2});
  CHECK(std::get<RectMode>(pairs[2].mode) == RectMode{2, 1});

  const auto big = DomainSpec::disk(2.0);
  const auto p = make_eigenpair(big, DiskMode{2, 3, Parity::sin});
  CHECK(p.lambda == doctest::Approx(bessel_zero(2, 3) / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_eigenpair(big, DiskMode{0, 1, Parity::sin}), DomainError);
  CHECK_THROWS_AS(make_eigenpair(big, RectMode{1, 1}), DomainError);
}

TEST_CASE("Weyl count within 15% on the unit disk") {
  const auto disk = DomainSpec::disk(1.0);
  for (double cutoff : {20.0, 30.0, 45.0}) {
    const double count = static_cast<double>(eigenpairs_below(disk, cutoff).size());
    const double weyl = weyl_count(disk, cutoff);
    CHECK(std::abs(count - weyl) <= 0.15 * weyl);
  }
}

TEST_CASE("evaluate examples") {
  const auto square = DomainSpec::rectangle(1.0, 1.0);
  const auto e11 = make_eigenpair(square, RectMode{1, 1});
  CHECK(evaluate(e11, Point(0.5, 0.5)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(evaluate(e11, Point(1.5, 0.5)), DomainError);

  const auto disk = DomainSpec::disk(1.0);
  const auto e01 = make_eigenpair(disk, DiskMode{0, 1, Parity::cos});
  CHECK(std::abs(evaluate(e01, Point(1.0, 0.0))) <= 1e-10);
  CHECK(std::abs(evaluate(e01, Point(std::cos(2.0), std::sin(2.0)))) <= 1e-10);

  // normalization oracle: int_0^1 J_0(j r)^2 r dr by Gauss-Legendre on the
  // integral representation
  const double j = 2.404825557695773;
  const auto rule = gauss_legendre(60).mapped(0.0, 1.0);
  double integral = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double v = j_integral(0, j * rule.nodes[i]);
    integral += rule.weights[i] * v * v * rule.nodes[i];
  }
  const double center_oracle = 1.0 / std::sqrt(2.0 * pi * integral);
  CHECK(evaluate(e01, Point(0, 0)) == doctest::Approx(center_oracle).epsilon(1e-11));
  CHECK(evaluate(e01, Point(0, 0)) == doctest::Approx(1.0 / (std::sqrt(pi) * std::abs(j_integral(1, j)))).epsilon(1e-11));
}

TEST_CASE("values vanish on the boundary") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto disk = DomainSpec::disk(1.0);
  for (const auto& pair : eigenpairs_below(disk, 25.0))
    for (int i = 0; i < 5; ++i) {
      const double t = 2 * pi * u(rng);
      REQUIRE(std::abs(evaluate(pair, Point(std::cos(t), std::sin(t)))) <= 1e-10);
    }
  const auto rect = DomainSpec::rectangle(2.0, 1.0, {-1.0, 0.5});
  for (const auto& pair : eigenpairs_below(rect, 25.0)) {
    REQUIRE(std::abs(evaluate(pair, Point(-1.0 + 2.0 * u(rng), 0.5))) <= 1e-10);
    REQUIRE(std::abs(evaluate(pair, Point(1.0, 0.5 + u(rng)))) <= 1e-10);
    const auto vt = value_trace(pair, 16);
    REQUIRE(vt.values.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("orthonormality under tensor quadrature") {
  for (const auto& domain : {DomainSpec::disk(1.0), DomainSpec::rectangle(1.0, 1.0)}) {
    const auto pairs = eigenpairs_below(domain, 30.0);
    const auto quad = domain.kind() == DomainKind::disk ? domain_quadrature(domain, 30.0, 64, 256)
                                                        : domain_quadrature(domain, 30.0, 64, 64);
    const auto s = sample(pairs, quad);
    const Eigen::MatrixXd gram = s.value.transpose() * s.weights.asDiagonal() * s.value;
    const auto n = static_cast<Eigen::Index>(pairs.size());
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("default quadrature keeps orthonormality up to lambda 60") {
  const auto disk = DomainSpec::disk(1.0);
  const auto pairs = eigenpairs_below(disk, 60.0);
  const auto s = sample(pairs, domain_quadrature(disk, 60.0));
  const Eigen::MatrixXd gram = s.value.transpose() * s.weights.asDiagonal() * s.value;
  const auto n = static_cast<Eigen::Index>(pairs.size());
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("sampled gradients match pointwise gradients and the Dirichlet energy") {
  const auto disk = DomainSpec::disk(1.0);
  const auto pairs = eigenpairs_below(disk, 12.0);
  const auto quad = domain_quadrature(disk, 12.0);
  const auto s = sample(pairs, quad);
  for (std::size_t c = 0; c < pairs.size(); ++c)
    for (std::size_t i = 0; i < quad.size(); i += 997) {
      const Point g = gradient(pairs[c], quad.point(i));
      REQUIRE(std::abs(g.x() - s.dx(i, c)) <= 1e-10 * pairs[c].lambda);
      REQUIRE(std::abs(g.y() - s.dy(i, c)) <= 1e-10 * pairs[c].lambda);
      REQUIRE(std::abs(evaluate(pairs[c], quad.point(i)) - s.value(i, c)) <= 1e-12);
    }
  const Eigen::MatrixXd stiff =
      s.dx.transpose() * s.weights.asDiagonal() * s.dx + s.dy.transpose() * s.weights.asDiagonal() * s.dy;
  for (std::size_t c = 0; c < pairs.size(); ++c)
    CHECK(stiff(c, c) == doctest::Approx(pairs[c].lambda_sq).epsilon(1e-9));
}

TEST_CASE("eigen-equation residual at random interior points") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto disk = DomainSpec::disk(1.0);
  const auto rect = DomainSpec::rectangle(1.5, 0.75);
  for (const auto& domain : {disk, rect})
    for (const auto& pair : eigenpairs_below(domain, 20.0)) {
      for (int i = 0; i < 100; ++i) {
        Point p;
        if (domain.kind() == DomainKind::disk) {
          const double r = 0.05 + 0.95 * std::sqrt(u(rng)), t = 2 * pi * u(rng);
          p = Point(r * std::cos(t), r * std::sin(t));
        } else {
          p = Point(1.5 * u(rng), 0.75 * u(rng));
        }
        const double res = -laplacian(pair, p) - pair.lambda_sq * evaluate(pair, p);
        REQUIRE(std::abs(res) <= 1e-8 * pair.lambda_sq);
      }
    }
}

TEST_CASE("gradient against central differences") {
  const auto disk = DomainSpec::disk(1.0);
  const auto pair = make_eigenpair(disk, DiskMode{3, 2, Parity::sin});
  const double d = 1e-6;
  for (const Point p : {Point(0.3, 0.2), Point(-0.5, 0.6), Point(0.0, 0.0), Point(0.1, -0.9)}) {
    const Point g = gradient(pair, p);
    const double fx = (evaluate(pair, p + Point(d, 0)) - evaluate(pair, p - Point(d, 0))) / (2 * d);
    const double fy = (evaluate(pair, p + Point(0, d)) - evaluate(pair, p - Point(0, d))) / (2 * d);
    CHECK(std::abs(g.x() - fx) <= 1e-6 * pair.lambda);
    CHECK(std::abs(g.y() - fy) <= 1e-6 * pair.lambda);
  }
  // n = 1 at the center
  const auto p1 = make_eigenpair(disk, DiskMode{1, 1, Parity::cos});
  const Point g0 = gradient(p1, Point(0, 0));
  CHECK(g0.x() == doctest::Approx(p1.norm_const * p1.lambda / 2).epsilon(1e-14));
  CHECK(std::abs(g0.y()) <= 1e-15);
}

TEST_CASE("disk ratio law and Parseval on the trace") {
  const auto disk = DomainSpec::disk(1.0);
  for (const auto& pair : eigenpairs_below(disk, 40.0)) {
    const auto t = normal_trace(pair);
    const double norm = trace_l2(t);
    REQUIRE(std::abs(norm - std::sqrt(2.0) * pair.lambda) <= 1e-10 * pair.lambda);
    REQUIRE(normal_ratio_squared(pair) == 2.0);
    REQUIRE(trace_hk(t, 0.0) == norm);
    const int n = pair.angular_order();
    REQUIRE(trace_hk(t, 1.0) ==
            doctest::Approx(std::sqrt(1.0 + n * n) * std::sqrt(2.0) * pair.lambda).epsilon(1e-12));
  }
  // Parseval against direct boundary quadrature of the pointwise derivative
  for (const auto& mode : {DiskMode{0, 3, Parity::cos}, DiskMode{4, 2, Parity::sin}, DiskMode{11, 1, Parity::cos}}) {
    const auto pair = make_eigenpair(disk, mode);
    const auto t = normal_trace(pair);
    const int m = 512;
    double direct = 0.0;
    for (int i = 0; i < m; ++i) {
      const double th = 2 * pi * i / m;
      const double v = normal_derivative(pair, Point(std::cos(th), std::sin(th)));
      direct += v * v * 2 * pi / m;
      REQUIRE(std::abs(v - t.at_angle(th)) <= 1e-10 * pair.lambda);
    }
    CHECK(std::abs(direct - trace_inner(t, t)) <= 1e-10 * pair.lambda_sq);
  }
}

TEST_CASE("rectangle ratio law") {
  const auto square = DomainSpec::rectangle(1.0, 1.0);
  for (const auto& pair : eigenpairs_below(square, 30.0)) {
    const double norm = trace_l2(normal_trace(pair));
    REQUIRE(std::abs(norm - 2.0 * pair.lambda) <= 1e-10 * pair.lambda);
  }
  for (auto [a, b] : {std::pair{2.0, 1.0}, {0.7, 1.3}}) {
    const auto rect = DomainSpec::rectangle(a, b, {0.25, -0.5});
    for (const auto& mode : {RectMode{1, 1}, RectMode{3, 2}, RectMode{5, 7}}) {
      const auto pair = make_eigenpair(rect, mode);
      const double quad = trace_inner(normal_trace(pair), normal_trace(pair));
      const double closed = normal_ratio_squared(pair) * pair.lambda_sq;
      CHECK(std::abs(quad - closed) <= 1e-9 * closed);
      CHECK(std::abs(rect_flux_oracle(a, b, mode.m, mode.n) - closed) <= 1e-6 * closed);
    }
  }
  // trace of the pair is Gauss nodal, H^k unsupported
  const auto pair = make_eigenpair(square, RectMode{2, 3});
  CHECK_THROWS_AS(trace_hk(normal_trace(pair), 1.0), UnsupportedError);
}

TEST_CASE("H^k of a pure Fourier mode") {
  BoundaryTrace t;
  t.cos_coeffs = Eigen::VectorXd::Zero(6);
  t.sin_coeffs = Eigen::VectorXd::Zero(6);
  t.cos_coeffs[5] = 1.0;
  CHECK(trace_hk(t, 1.0) == doctest::Approx(std::sqrt(26.0 * pi)).epsilon(1e-15));
  CHECK(trace_hk(t, 0.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(trace_hk(t, 0.5) == doctest::Approx(std::sqrt(std::sqrt(26.0) * pi)).epsilon(1e-15));
  t.cos_coeffs[0] = 2.0;
  CHECK(trace_l2(t) == doctest::Approx(std::sqrt(pi + 8.0 * pi)).epsilon(1e-15));

  BoundaryTrace sum = t;
  sum.add_scaled(-1.0, t);
  CHECK(trace_l2(sum) == 0.0);
}

TEST_CASE("spectrum CSV") {
  std::ostringstream os;
  write_spectrum_csv(os, eigenpairs_below(DomainSpec::disk(1.0), 4.0));
  const std::string out = os.str();
  CHECK(out.rfind("lambda,mode_m_or_n,mode_n_or_k,parity,norm_const\n", 0) == 0);
  CHECK(out.find(",1,1,sin,") != std::string::npos);
  std::ostringstream sq;
  write_spectrum_csv(sq, eigenpairs_below(DomainSpec::rectangle(1.0, 1.0), 5.0));
  CHECK(sq.str().find(",1,1,none,2\n") != std::string::npos);
}
