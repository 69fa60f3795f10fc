#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/bounds_lab.hpp"
#include "specbound/errors.hpp"
#include "specbound/rellich.hpp"
#include "specbound/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace specbound;

namespace {

constexpr double pi = std::numbers::pi;

std::shared_ptr<const AnalyticSpectrum> disk(double cutoff = 45.0) {
  static auto s = std::make_shared<const AnalyticSpectrum>(DomainSpec::disk(1.0), 45.0);
  if (cutoff <= 45.0) return s;
  return std::make_shared<const AnalyticSpectrum>(DomainSpec::disk(1.0), cutoff);
}

std::shared_ptr<const AnalyticSpectrum> square() {
  static auto s = std::make_shared<const AnalyticSpectrum>(DomainSpec::rectangle(1.0, 1.0), 45.0);
  return s;
}

}  // namespace

TEST_CASE("boundary gram structure") {
  const auto sp = disk();
  const auto g = boundary_gram(*sp, 10.0, 2.0);
  REQUIRE(g.members.size() >= 4);
  CHECK((g.G - g.G.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.G);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9 * es.eigenvalues().maxCoeff());
  for (std::size_t i = 0; i < g.members.size(); ++i) {
    const double l = sp->frequency(g.members[i]);
    CHECK(g.G(i, i) == doctest::Approx(2 * l * l).epsilon(1e-10));
  }
  // same order and parity: rank-one block with |G_12| = 2 l1 l2
  for (std::size_t i = 0; i < g.members.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = std::get<DiskMode>(sp->pair(g.members[i]).mode);
      const auto& b = std::get<DiskMode>(sp->pair(g.members[j]).mode);
      if (a.n != b.n || a.parity != b.parity)
        CHECK(g.G(i, j) == 0.0);
      else
        CHECK(std::abs(g.G(i, j)) ==
              doctest::Approx(2 * sp->frequency(g.members[i]) * sp->frequency(g.members[j])).epsilon(1e-9));
    }
  CHECK_THROWS_AS(boundary_gram(*sp, 2.5, 0.01), DomainError);
}

TEST_CASE("trace factors reproduce the gram matrices") {
  const auto spec = DomainSpec::rectangle(1.0, 1.0);
  const auto fem = std::make_shared<const FemSpectrum>(spec, make_fem_system(build_mesh(spec, 1.0 / 16)), 8);
  for (const auto& sp : {std::static_pointer_cast<const Spectrum>(disk()),
                         std::static_pointer_cast<const Spectrum>(square()),
                         std::static_pointer_cast<const Spectrum>(fem)}) {
    const auto idx = sp->window(sp->frequency(0), sp->frequency(7) - sp->frequency(0));
    REQUIRE(idx.size() >= 3);
    const Eigen::MatrixXd G = sp->trace_gram(idx);
    const Eigen::MatrixXd B = sp->trace_factor(idx);
    CHECK((B.transpose() * B - G).cwiseAbs().maxCoeff() <= 1e-10 * G.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("random clusters sit inside the extremal ratios") {
  std::mt19937_64 rng(5);
  for (const auto& sp : {std::static_pointer_cast<const Spectrum>(disk()),
                         std::static_pointer_cast<const Spectrum>(square())}) {
    const auto r = extremal_ratios(boundary_gram(*sp, 20.0, 1.5));
    for (int t = 0; t < 200; ++t) {
      const auto u = random_cluster(sp, 20.0, 1.5, rng());
      const double ratio = std::sqrt(normal_norm_sq(u)) / (20.0 * l2_norm(u));
      CHECK(ratio >= r.r_min - 1e-12);
      CHECK(ratio <= r.r_max + 1e-12);
    }
    // extremal vectors attain them
    const auto g = boundary_gram(*sp, 20.0, 1.5);
    CHECK(std::sqrt(r.v_max.dot(g.G * r.v_max)) / 20.0 == doctest::Approx(r.r_max).epsilon(1e-10));
  }
}

TEST_CASE("nested windows are monotone") {
  const auto sp = disk();
  const double base = sp->frequency(sp->window(15.0, 1.0)[0]) - 0.05;
  double prev_max = 0.0, prev_min = 1e300;
  for (double s : {0.3, 0.6, 1.2, 2.4, 4.0}) {
    const auto r = extremal_ratios(boundary_gram(*sp, base, s));
    CHECK(r.r_max >= prev_max - 1e-12);
    CHECK(r.r_min <= prev_min + 1e-12);
    prev_max = r.r_max;
    prev_min = r.r_min;
  }
}

TEST_CASE("trace cancellation on the disk") {
  const auto [u, rep] = counterexample_disk(0, 1);
  CHECK(rep.lambda == doctest::Approx(2.404825557695773).epsilon(1e-12));
  CHECK(rep.s_star == doctest::Approx(3.115).epsilon(1e-3));
  CHECK(rep.ratio <= 1e-10);
  CHECK(rep.u_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.alpha * rep.alpha + rep.beta * rep.beta == doctest::Approx(1.0));
  CHECK(u.members.size() >= 2);
  // the window must reach j_{0,2}
  CHECK(u.s > rep.s_star);
  for (int n = 0; n <= 5; ++n)
    for (int k = 1; k <= 20; ++k) {
      const auto [v, r] = counterexample_disk(n, k);
      if (n <= 1 && k <= 2) CHECK(r.s_star < pi + 0.2);
      CHECK(r.ratio <= 1e-12);
    }
  // s_star tends to pi
  CHECK(counterexample_disk(0, 40).second.s_star == doctest::Approx(pi).epsilon(1e-3));
  CHECK_THROWS_AS(counterexample_disk(-1, 1), DomainError);
}

TEST_CASE("grids") {
  const auto g = log_grid(5.0, 40.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g.front() == 5.0);
  CHECK(g.back() == 40.0);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(parse_grid("5:40:4") == g);
  CHECK(log_grid(3.0, 9.0, 1) == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_grid("5:40"), DomainError);
  CHECK_THROWS_AS(parse_grid("5:40:x"), DomainError);
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), DomainError);
}

TEST_CASE("upper sweep stays bounded") {
  const auto rows = ratio_sweep(*disk(), log_grid(5.0, 40.0, 8), {0.1, 1.0}, 2.0);
  REQUIRE(rows.size() == 16);
  for (const auto& r : rows) {
    if (r.members == 0) continue;
    CHECK(r.q_upper <= 1.6);
    if (r.s == 0.1) CHECK(r.q_upper >= 1.2);
  }
  // single (1,1) mode on the square: ||d_nu psi||^2 = 8 pi^2 = 4 lambda^2
  const auto one = ratio_sweep(*square(), {std::sqrt(2.0) * pi - 1e-9}, {1e-6}, std::sqrt(2.0));
  REQUIRE(one[0].members == 1);
  CHECK(one[0].r_max == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(one[0].r_min == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("lower sweep") {
  const auto sp = disk();
  const auto grid = log_grid(5.0, 40.0, 12);
  double lo = 1e300;
  for (const auto& r : ratio_sweep(*sp, grid, {0.2}, 2.0))
    if (r.members > 0) lo = std::min(lo, r.r_min);
  CHECK(lo >= 0.5);
  double wide = 1e300;
  for (const auto& r : ratio_sweep(*sp, grid, {3.2}, 2.0)) {
    REQUIRE(r.members > 0);
    wide = std::min(wide, r.r_min);
    CHECK(std::isnan(r.q_lower));
  }
  CHECK(wide <= 1e-8);
  // window holding j_{0,1} and j_{0,2}
  const double j01 = bessel_zero(0, 1);
  const auto at = ratio_sweep(*sp, {j01 - 1e-9}, {3.2}, 2.0);
  CHECK(at[0].r_min <= 1e-8);
  double sq = 1e300;
  for (const auto& r : ratio_sweep(*square(), grid, {0.1}, std::sqrt(2.0)))
    if (r.members > 0) sq = std::min(sq, r.r_min);
  CHECK(sq > 0.0);
}

TEST_CASE("sweep output does not depend on the thread count") {
  const auto grid = log_grid(5.0, 30.0, 6);
  const auto a = ratio_sweep(*disk(), grid, {0.1, 0.5}, 2.0, 1);
  const auto b = ratio_sweep(*disk(), grid, {0.1, 0.5}, 2.0, 3);
  std::ostringstream sa, sb;
  write_sweep_csv(sa, a, {"none", "disk", "abc"});
  write_sweep_csv(sb, b, {"none", "disk", "abc"});
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("# seed=none domain=disk version=", 0) == 0);
  CHECK(sa.str().find("\nlambda,s,members,r_min,r_max,q_upper,q_lower\n") != std::string::npos);
}

TEST_CASE("projector bound") {
  const auto sp = disk();
  const auto rows = projector_bound(*sp, {5.0, 10.0, 20.0, 30.0}, 2);
  double prev = 0.0;
  for (const auto& r : rows) {
    CHECK(r.value <= 2.0);
    CHECK(r.eig_max >= prev);
    prev = r.eig_max;
  }
  CHECK(rows[0].members == sp->window(5.0, 0.0, WindowKind::upper_closed).size());
  CHECK(projector_bound(*sp, {1.0})[0].members == 0);
}

TEST_CASE("H^k sweep") {
  const auto sp = disk();
  const auto grid = log_grid(5.0, 30.0, 5);
  const auto hk = hk_sweep(*sp, grid, 0.1, {0.0, 1.0});
  const auto up = ratio_sweep(*sp, grid, {0.1}, 2.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (up[i].members == 0) continue;
    CHECK(hk[2 * i].value == doctest::Approx(up[i].q_upper).epsilon(1e-10));
    CHECK(hk[2 * i + 1].value <= hk[2 * i].value * 1.0001);
  }
  CHECK_THROWS_AS(hk_sweep(*square(), grid, 0.1, {1.0}), UnsupportedError);
}

TEST_CASE("pointwise boundary Weyl sum") {
  const auto sp = disk(61.0);
  std::vector<double> vals;
  for (int i = 0; i < 8; ++i) {
    const double th = 2 * pi * i / 8 + 0.3;
    vals.push_back(ozawa_sum(*sp, Point(std::cos(th), std::sin(th)), 60.0));
  }
  for (double v : vals) CHECK(v == doctest::Approx(vals[0]).epsilon(1e-10));
  const double ratio = vals[0] / ozawa_prediction(60.0);
  CHECK(ratio >= 0.85);
  CHECK(ratio <= 1.15);
  CHECK_THROWS_AS(ozawa_sum(*disk(), Point(1, 0), 60.0), DomainError);
  CHECK_THROWS_AS(ozawa_sum(*sp, Point(0.5, 0), 30.0), DomainError);
  // direct oracle on the square: sum of (d_nu psi)^2 at the midpoint of the bottom edge
  const double l = 20.0;
  double direct = 0.0;
  for (int m = 1; m < 10; ++m)
    for (int n = 1; n < 10; ++n) {
      if (pi * std::hypot(m, n) >= l) continue;
      const double d = 2.0 * n * pi * std::sin(m * pi * 0.5);
      direct += d * d;
    }
  CHECK(ozawa_sum(*square(), Point(0.5, 0.0), l) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("slopes and formatting") {
  CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
  CHECK(loglog_slope({1, 2, 4, 8}, {1, 2, std::nan(""), 8}) == doctest::Approx(1.0));
  CHECK(std::isnan(loglog_slope({1}, {1})));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(pi)) == pi);
}
