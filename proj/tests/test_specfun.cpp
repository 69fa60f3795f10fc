#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/specfun.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace specbound;

namespace {

// Bessel's integral J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt. The
// integrand extends to a 2pi-periodic trigonometric polynomial-like function
// of bandwidth ~ n + x, so the midpoint rule with 2048 nodes is exact to
// rounding for the ranges tested here.
double bessel_integral_oracle(int n, double x) {
  const int m = 2048;
  double sum = 0.0;
  for (int i = 0; i < 2 * m; ++i) {
    const double t = std::numbers::pi * (i + 0.5) / m;  // covers [0, 2pi)
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / (2.0 * m);
}

// Zero of J_n by plain bisection on the oracle over [lo, hi].
double bisect_zero_oracle(int n, double lo, double hi) {
  double flo = bessel_integral_oracle(n, lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_integral_oracle(n, mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("bessel_j at the origin") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(bessel_j(7, 0.0) == 0.0);
  CHECK(bessel_j_deriv(0, 0.0) == 0.0);
}

TEST_CASE("bessel_j matches the integral representation") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> order(0, 120);
  std::uniform_real_distribution<double> arg(0.0, 200.0);
  double worst = 0.0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = order(rng);
    const double x = arg(rng);
    worst = std::max(worst, std::abs(bessel_j(n, x) - bessel_integral_oracle(n, x)));
  }
  // also the transition region x ~ n where the series/recurrence switch
  for (int n : {0, 1, 5, 30, 80, 120})
    for (double x : {0.5, 7.99, 8.01, n * 0.9 + 0.1, n + 0.0001, n * 1.1 + 0.3, 199.9}) {
      worst = std::max(worst, std::abs(bessel_j(n, x) - bessel_integral_oracle(n, x)));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("bessel_j_sequence agrees with bessel_j") {
  for (double x : {0.3, 9.0, 55.5, 150.0}) {
    const auto seq = bessel_j_sequence(60, x);
    for (int n = 0; n <= 60; ++n) CHECK(std::abs(seq[n] - bessel_j(n, x)) <= 1e-13);
  }
}

TEST_CASE("three-term recurrence residual") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> order(1, 100);
  std::uniform_real_distribution<double> arg(0.5, 150.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = order(rng);
    const double x = arg(rng);
    const double r = bessel_j(n - 1, x) + bessel_j(n + 1, x) - 2.0 * n / x * bessel_j(n, x);
    REQUIRE(std::abs(r) <= 1e-10);
  }
}

TEST_CASE("bessel_j_deriv against central differences") {
  const double delta = 1e-6;
  const double fd = (bessel_j(2, 1.3 + delta) - bessel_j(2, 1.3 - delta)) / (2 * delta);
  CHECK(std::abs(bessel_j_deriv(2, 1.3) - fd) <= 1e-8);
  for (int n : {0, 3, 17})
    for (double x : {0.7, 12.0, 40.0}) {
      const double d = (bessel_j(n, x + delta) - bessel_j(n, x - delta)) / (2 * delta);
      CHECK(std::abs(bessel_j_deriv(n, x) - d) <= 1e-8);
    }
}

TEST_CASE("bessel zeros: frozen oracle values") {
  // Values below come from bisect_zero_oracle, which never touches the
  // implementation under test; recomputed here to keep the oracle honest.
  const double j01 = bisect_zero_oracle(0, 2.0, 3.0);
  const double j11 = bisect_zero_oracle(1, 3.5, 4.0);
  CHECK(std::abs(j01 - 2.404825557695773) <= 1e-12);
  CHECK(std::abs(j11 - 3.831705970207512) <= 1e-12);

  CHECK(std::abs(bessel_zero(0, 1) - 2.404825557695773) <= 1e-11);
  CHECK(std::abs(bessel_zero(1, 1) - 3.831705970207512) <= 1e-11);
  CHECK(std::abs(bessel_j(0, 2.404825557695773)) <= 1e-10);

  const double gap = bessel_zero(0, 2) - bessel_zero(0, 1);
  CHECK(gap == doctest::Approx(3.1153).epsilon(1e-4));
  CHECK(gap > std::numbers::pi - 0.05);
}

TEST_CASE("bessel zeros against the bisection oracle at higher order") {
  for (auto [n, k] : {std::pair{5, 3}, {20, 1}, {20, 6}, {45, 2}}) {
    const double z = bessel_zero(n, k);
    CHECK(std::abs(z - bisect_zero_oracle(n, z - 0.3, z + 0.3)) <= 1e-11);
  }
}

TEST_CASE("zero table invariants") {
  for (int n = 0; n <= 30; ++n) {
    double prev_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 12; ++k) {
      const double z = bessel_zero(n, k);
      REQUIRE(std::abs(bessel_j(n, z)) <= 1e-10);
      REQUIRE(bessel_j_deriv(n, z) == doctest::Approx(-bessel_j(n + 1, z)).epsilon(1e-9));
      // interlacing
      REQUIRE(z < bessel_zero(n + 1, k));
      REQUIRE(bessel_zero(n + 1, k) < bessel_zero(n, k + 1));
      if (k > 1) {
        const double gap = z - bessel_zero(n, k - 1);
        REQUIRE(gap > 0.0);
        // gaps approach pi from below for order 0, from above otherwise
        if (k > 2 && n == 0) REQUIRE(gap > prev_gap - 1e-12);
        if (k > 2 && n >= 1) REQUIRE(gap < prev_gap + 1e-12);
        prev_gap = gap;
      }
    }
  }
  // gaps tend to pi
  CHECK(std::abs(bessel_zero(0, 200) - bessel_zero(0, 199) - std::numbers::pi) < 1e-4);
}

TEST_CASE("bessel_zeros_below") {
  const auto z = bessel_zeros_below(0, 10.0);
  REQUIRE(z.size() == 3);  // 2.405, 5.520, 8.654
  CHECK(z.back() < 10.0);
  CHECK(bessel_zeros_below(12, 12.0).empty());
}

TEST_CASE("gauss_legendre small rules") {
  const auto r1 = gauss_legendre(1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == 2.0);
  const auto r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gauss_legendre exactness and weight sum") {
  const auto r20 = gauss_legendre(20);
  double integral = 0.0;
  for (int i = 0; i < 20; ++i) integral += r20.weights[i] * std::pow(r20.nodes[i], 38);
  CHECK(std::abs(integral - 2.0 / 39.0) <= 1e-12);

  for (int m : {1, 2, 3, 7, 64, 129, 256, 512}) {
    const auto r = gauss_legendre(m);
    CHECK(std::abs(r.weights.sum() - 2.0) <= 1e-14);
    CHECK((r.weights.array() > 0.0).all());
    for (int i = 1; i < m; ++i) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
    if (m <= 64) {
      for (int d = 0; d <= 2 * m - 1; ++d) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
        const double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1);
        REQUIRE(std::abs(s - exact) <= 1e-12);
      }
    }
  }
}

TEST_CASE("mapped rule") {
  const auto r = gauss_legendre(8).mapped(0.0, 3.0);
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += r.weights[i] * r.nodes[i] * r.nodes[i];
  CHECK(s == doctest::Approx(9.0).epsilon(1e-14));
}
