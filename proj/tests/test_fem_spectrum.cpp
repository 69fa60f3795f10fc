#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/analytic_spectrum.hpp"
#include "specbound/errors.hpp"
#include "specbound/fem_spectrum.hpp"
#include "specbound/specfun.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace specbound;

namespace {

constexpr double pi = std::numbers::pi;

TriangleMesh reference_triangle() {
  TriangleMesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  const double r2 = std::sqrt(0.5);
  m.boundary = {{0, 1, {0, -1}, 1.0}, {1, 2, {r2, r2}, std::sqrt(2.0)}, {2, 0, {-1, 0}, 1.0}};
  return m;
}

}  // namespace

TEST_CASE("assembly on the reference triangle") {
  const auto mats = assemble(reference_triangle());
  const Eigen::MatrixXd K(mats.K), M(mats.M);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(K.row(i).sum()) <= 1e-15);
  CHECK(K(0, 0) == doctest::Approx(1.0));
  CHECK(K(1, 1) == doctest::Approx(0.5));
  CHECK(K(1, 2) == doctest::Approx(0.0));
  CHECK(M.sum() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK((K - K.transpose()).norm() == 0.0);
  CHECK(Eigen::MatrixXd(mats.B).sum() == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("degenerate triangle is named") {
  auto mesh = reference_triangle();
  mesh.vertices.push_back({2, 0});
  mesh.triangles.push_back({0, 1, 3});
  try {
    assemble(mesh);
    FAIL("expected an assembly error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("triangle 1") != std::string::npos);
  }
}

TEST_CASE("matrix properties on square and polygon meshes") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const auto square = build_mesh(DomainSpec::rectangle(1.0, 1.0), 1.0 / 8);
  const auto L = build_mesh(DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), 0.3);
  for (const auto* mesh : {&square, &L}) {
    const auto mats = assemble(*mesh);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mats.K.rows());
    CHECK((mats.K * ones).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(ones.dot(mats.M * ones) == doctest::Approx(mesh->area()).epsilon(1e-12));
    CHECK(Eigen::VectorXd::Ones(mats.B.rows()).dot(mats.B * Eigen::VectorXd::Ones(mats.B.rows())) ==
          doctest::Approx(mesh->boundary_length()).epsilon(1e-12));
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd x(mats.K.rows());
      for (auto& v : x) v = g(rng);
      REQUIRE(x.dot(mats.K * x) >= -1e-12);
    }
    const SparseMatrix Kt = mats.K.transpose();
    CHECK((mats.K - Kt).norm() <= 1e-14);
  }
  const SparseMatrix Ms = assemble(square).M;
  CHECK(Ms.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Krylov solver agrees with the dense oracle") {
  const auto system = make_fem_system(build_mesh(DomainSpec::disk(1.0), 0.08));
  const auto& mats = system->matrices;
  REQUIRE(mats.K_int.rows() > 300);
  EigOptions dense;
  dense.dense_threshold = 1 << 30;
  EigOptions krylov;
  krylov.dense_threshold = 0;
  const auto a = solve_generalized(mats.K_int, mats.M_int, 12, dense);
  const auto b = solve_generalized(mats.K_int, mats.M_int, 12, krylov);
  for (int i = 0; i < 12; ++i) {
    CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-10));
    CHECK(b.residuals[i] <= 1e-8);
  }
  // orthonormality in M
  const Eigen::MatrixXd G = b.vectors.transpose() * (mats.M_int * b.vectors);
  CHECK((G - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK_THROWS_AS(solve_generalized(mats.K_int, mats.M_int, static_cast<int>(mats.K_int.rows()) + 1), DomainError);
}

TEST_CASE("unit square eigenvalues: upper bounds and second-order convergence") {
  const double exact1 = 2 * pi * pi;
  auto pairs32 = solve_eigs(make_fem_system(build_mesh(DomainSpec::rectangle(1, 1), 1.0 / 32)), 5);
  auto pairs16 = solve_eigs(make_fem_system(build_mesh(DomainSpec::rectangle(1, 1), 1.0 / 16)), 5);
  CHECK(pairs32[0].lambda_sq >= exact1);
  CHECK((pairs32[0].lambda_sq - exact1) / exact1 <= 1e-2);
  const double ratio = (pairs16[0].lambda_sq - exact1) / (pairs32[0].lambda_sq - exact1);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);

  const auto exact = eigenpairs_below(DomainSpec::rectangle(1, 1), 15.0);
  REQUIRE(exact.size() >= 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(pairs32[i].lambda_sq >= exact[i].lambda_sq);
    CHECK(pairs32[i].residual <= 1e-8);
    CHECK(std::abs(pairs32[i].coeffs.dot(pairs32[i].system->matrices.M_int * pairs32[i].coeffs) - 1.0) <= 1e-12);
    if (i < 3) CHECK(pairs16[i].lambda_sq - exact[i].lambda_sq > pairs32[i].lambda_sq - exact[i].lambda_sq);
  }
  // the mesh only has the diagonal reflection symmetry, so (1,2) and (2,1)
  // split at O(h^2) and are separate blocks at the default gap
  CHECK(pairs32[1].block != pairs32[2].block);
  EigOptions loose;
  loose.degeneracy_gap = 1e-2;
  const auto grouped = solve_eigs(pairs32[0].system, 5, loose);
  CHECK(grouped[1].block == grouped[2].block);
  CHECK(grouped[0].block != grouped[1].block);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double ip = pairs32[i].coeffs.dot(pairs32[i].system->matrices.M_int * pairs32[j].coeffs);
      REQUIRE(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
}

TEST_CASE("disk first eigenvalue on an inscribed 256-gon") {
  MeshOptions opts;
  opts.disk_sides = 256;
  const auto pairs = solve_eigs(make_fem_system(build_mesh(DomainSpec::disk(1.0), 0.05, opts)), 1);
  const double j01 = bessel_zero(0, 1);
  CHECK(std::abs(pairs[0].lambda_sq - j01 * j01) <= 0.02 * j01 * j01);

  const auto flux = recover_flux(pairs[0]);
  CHECK(flux.l2() / pairs[0].lambda == doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
  CHECK(flux_equation_residual(flux, pairs[0].coeffs, pairs[0].lambda_sq) <= 1e-10);
  // x.nu weighting on a centered disk is ~ the radius
  CHECK(flux.weighted_l2_sq(Point(0, 0)) == doctest::Approx(flux.l2() * flux.l2()).epsilon(0.01));
}

TEST_CASE("consistent flux on the unit square") {
  const auto system = make_fem_system(build_mesh(DomainSpec::rectangle(1, 1), 1.0 / 64));
  const auto pairs = solve_eigs(system, 1);
  const auto flux = recover_flux(pairs[0]);
  CHECK(flux.l2() / pairs[0].lambda == doctest::Approx(2.0).epsilon(0.02));
  CHECK(flux_equation_residual(flux, pairs[0].coeffs, pairs[0].lambda_sq) <= 1e-10);

  const auto zero = recover_flux(system, Eigen::VectorXd::Zero(pairs[0].coeffs.size()), pairs[0].lambda_sq);
  CHECK(zero.l2() == 0.0);

  std::ostringstream os;
  write_flux_csv(os, flux);
  CHECK(os.str().rfind("s,psi\n", 0) == 0);
  std::ostringstream sp;
  write_fem_spectrum_csv(sp, pairs);
  CHECK(sp.str().rfind("lambda_h,residual\n", 0) == 0);
}

TEST_CASE("convergence study on the unit square") {
  CHECK(convergence_study(DomainSpec::rectangle(1, 1), 0, {}).empty());
  const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto rows = convergence_study(DomainSpec::rectangle(1, 1), 0, hs);
  REQUIRE(rows.size() == 3);
  std::vector<double> le, re;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    le.push_back(rows[i].lambda_error);
    re.push_back(rows[i].ratio_error);
    if (i > 0) {
      const double shrink = rows[i - 1].lambda_error / rows[i].lambda_error;
      CHECK(shrink > 3.5);
      CHECK(shrink < 4.5);
      CHECK(rows[i - 1].ratio_error / rows[i].ratio_error >= 1.8);
    }
  }
  CHECK(observed_order(hs, le) >= 1.8);
  CHECK(observed_order(hs, re) >= 0.9);
  std::ostringstream os;
  write_convergence_csv(os, rows);
  CHECK(os.str().rfind("h,lambda_error,ratio_error\n", 0) == 0);
}
