#include "specbound/fem_spectrum.hpp"

#include "specbound/analytic_spectrum.hpp"
#include "specbound/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

namespace specbound {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseMatrix restrict_to(const SparseMatrix& full, const std::vector<int>& dof_of_vertex, int ndof) {
  Triplets t;
  for (int k = 0; k < full.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(full, k); it; ++it) {
      const int i = dof_of_vertex[static_cast<std::size_t>(it.row())];
      const int j = dof_of_vertex[static_cast<std::size_t>(it.col())];
      if (i >= 0 && j >= 0) t.emplace_back(i, j, it.value());
    }
  return from_triplets(ndof, ndof, t);
}

// Block Krylov helpers in the M inner product.
class MOrtho {
 public:
  MOrtho(const SparseMatrix& M, std::mt19937_64& rng) : M_(M), rng_(rng) {}

  // Makes the columns of P M-orthonormal and M-orthogonal to the first
  // `used` columns of V.
  void orthonormalize(Eigen::MatrixXd& P, const Eigen::MatrixXd& V, Eigen::Index used) {
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
      for (int attempt = 0;; ++attempt) {
        Eigen::VectorXd r = P.col(c);
        const double before = std::sqrt(std::max(0.0, r.dot(M_ * r)));
        for (int pass = 0; pass < 2; ++pass) {
          if (used > 0) {
            const Eigen::VectorXd Mr = M_ * r;
            r -= V.leftCols(used) * (V.leftCols(used).transpose() * Mr);
          }
          for (Eigen::Index p = 0; p < c; ++p) r -= P.col(p) * P.col(p).dot(M_ * r);
        }
        const double after = std::sqrt(std::max(0.0, r.dot(M_ * r)));
        if (after > 1e-8 * before && after > 0.0) {
          P.col(c) = r / after;
          break;
        }
        if (attempt > 8) throw NumericalError("eigensolver: cannot extend the Krylov basis");
        P.col(c) = random_vector(P.rows());
      }
    }
  }

  Eigen::VectorXd random_vector(Eigen::Index n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng_);
    return v;
  }

 private:
  const SparseMatrix& M_;
  std::mt19937_64& rng_;
};

double relative_residual(const SparseMatrix& K, const SparseMatrix& M, const Eigen::VectorXd& x, double mu) {
  const Eigen::VectorXd Kx = K * x;
  const double denom = Kx.norm();
  return denom > 0.0 ? (Kx - mu * (M * x)).norm() / denom : 0.0;
}

GeneralizedEigs dense_eigs(const SparseMatrix& K, const SparseMatrix& M, int count) {
  const Eigen::MatrixXd Kd(K), Md(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
  if (es.info() != Eigen::Success) throw NumericalError("dense generalized eigensolver failed");
  GeneralizedEigs out;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count);
  out.residuals.resize(count);
  for (int i = 0; i < count; ++i) out.residuals[i] = relative_residual(K, M, out.vectors.col(i), out.values[i]);
  return out;
}

}  // namespace

FemMatrices assemble(const TriangleMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  Triplets tk, tm;
  tk.reserve(9 * mesh.triangles.size());
  tm.reserve(9 * mesh.triangles.size());
  double scale = 0.0;
  for (const auto& p : mesh.vertices) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Point& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Point& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const Point e1 = p1 - p0, e2 = p2 - p0;
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    const double longest = std::max({e1.norm(), e2.norm(), (p2 - p1).norm()});
    if (!(std::abs(det) > 1e-14 * std::max(longest * longest, 1e-300)))
      throw DomainError("assembly: degenerate triangle " + std::to_string(t));
    const double area = 0.5 * std::abs(det);
    // gradients of the barycentric coordinates
    Eigen::Matrix<double, 2, 3> G;
    G.col(1) = Point(e2.y(), -e2.x()) / det;
    G.col(2) = Point(-e1.y(), e1.x()) / det;
    G.col(0) = -G.col(1) - G.col(2);
    const Eigen::Matrix3d Ke = area * G.transpose() * G;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tk.emplace_back(tri[i], tri[j], Ke(i, j));
        tm.emplace_back(tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
      }
  }

  FemMatrices out;
  out.K = from_triplets(nv, nv, tk);
  out.M = from_triplets(nv, nv, tm);

  const auto on_boundary = mesh.boundary_vertex_mask();
  out.dof_of_vertex.assign(static_cast<std::size_t>(nv), -1);
  std::vector<int> bindex(static_cast<std::size_t>(nv), -1);
  for (int v = 0; v < nv; ++v) {
    if (on_boundary[static_cast<std::size_t>(v)]) {
      bindex[static_cast<std::size_t>(v)] = static_cast<int>(out.boundary_vertices.size());
      out.boundary_vertices.push_back(v);
    } else {
      out.dof_of_vertex[static_cast<std::size_t>(v)] = static_cast<int>(out.interior_vertices.size());
      out.interior_vertices.push_back(v);
    }
  }

  Triplets tb;
  for (const auto& e : mesh.boundary) {
    const int a = bindex[static_cast<std::size_t>(e.a)], b = bindex[static_cast<std::size_t>(e.b)];
    tb.emplace_back(a, a, e.length / 3.0);
    tb.emplace_back(b, b, e.length / 3.0);
    tb.emplace_back(a, b, e.length / 6.0);
    tb.emplace_back(b, a, e.length / 6.0);
  }
  const int nb = static_cast<int>(out.boundary_vertices.size());
  out.B = from_triplets(nb, nb, tb);

  const int ndof = static_cast<int>(out.interior_vertices.size());
  out.K_int = restrict_to(out.K, out.dof_of_vertex, ndof);
  out.M_int = restrict_to(out.M, out.dof_of_vertex, ndof);
  return out;
}

Eigen::VectorXd FemSystem::extend(const Eigen::VectorXd& interior) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  for (std::size_t i = 0; i < matrices.interior_vertices.size(); ++i)
    full[matrices.interior_vertices[i]] = interior[static_cast<Eigen::Index>(i)];
  return full;
}

std::shared_ptr<const FemSystem> make_fem_system(TriangleMesh mesh) {
  auto sys = std::make_shared<FemSystem>();
  sys->matrices = assemble(mesh);
  sys->mesh = std::move(mesh);
  return sys;
}

GeneralizedEigs solve_generalized(const SparseMatrix& K, const SparseMatrix& M, int count,
                                  const EigOptions& options) {
  const auto n = K.rows();
  if (count <= 0) return {};
  if (count > n) throw DomainError("solve_eigs: more pairs requested than interior DOFs");
  if (n < options.dense_threshold) return dense_eigs(K, M, count);

  const int b = std::max(1, options.block_size);
  Eigen::Index m = std::max<Eigen::Index>(2 * count + 2 * b, count + 40);
  m = ((m + b - 1) / b) * b;
  if (m + b >= n) return dense_eigs(K, M, count);

  // Shift-invert at sigma = 0; retry slightly below if the factorization fails.
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  double sigma = 0.0;
  ldlt.compute(K);
  if (ldlt.info() != Eigen::Success) {
    sigma = -1e-6 * K.diagonal().sum() / M.diagonal().sum();
    const SparseMatrix shifted = K - sigma * M;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) throw NumericalError("eigensolver: factorization failed after shift");
  }

  std::mt19937_64 rng(options.seed);
  MOrtho ortho(M, rng);
  Eigen::MatrixXd V(n, m), W(n, m);
  Eigen::Index used = 0;
  Eigen::MatrixXd P(n, b);
  for (int c = 0; c < b; ++c) P.col(c) = ortho.random_vector(n);
  ortho.orthonormalize(P, V, 0);

  const double internal_tol = 1e-10;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    while (used + b <= m) {
      const Eigen::MatrixXd MP = M * P;
      Eigen::MatrixXd AP = ldlt.solve(MP);
      V.middleCols(used, b) = P;
      W.middleCols(used, b) = AP;
      used += b;
      P = AP;
      ortho.orthonormalize(P, V, used);
    }
    Eigen::MatrixXd H = V.leftCols(used).transpose() * (M * W.leftCols(used));
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // largest theta of K^{-1} M correspond to the smallest mu
    const Eigen::MatrixXd S = es.eigenvectors().rowwise().reverse();
    const Eigen::VectorXd theta = es.eigenvalues().reverse();

    const Eigen::MatrixXd Y = V.leftCols(used) * S.leftCols(count);
    Eigen::VectorXd mu(count), res(count);
    bool converged = true;
    for (int i = 0; i < count; ++i) {
      mu[i] = 1.0 / theta[i] + sigma;
      res[i] = relative_residual(K, M, Y.col(i), mu[i]);
      if (!(res[i] <= internal_tol)) converged = false;
    }
    if (converged || restart == options.max_restarts) {
      if (!(res.maxCoeff() <= 1e-8)) throw NumericalError("eigensolver: no convergence within the restart limit");
      // Final M-normalization and ascending order.
      GeneralizedEigs out;
      out.values = mu;
      out.vectors = Y;
      for (int i = 0; i < count; ++i) {
        const double nrm = std::sqrt(Y.col(i).dot(M * Y.col(i)));
        out.vectors.col(i) /= nrm;
      }
      out.residuals = res;
      return out;
    }
    const Eigen::Index keep = std::min<Eigen::Index>(m - b, count + (m - count) / 2);
    const Eigen::MatrixXd Vk = V.leftCols(used) * S.leftCols(keep);
    const Eigen::MatrixXd Wk = W.leftCols(used) * S.leftCols(keep);
    V.leftCols(keep) = Vk;
    W.leftCols(keep) = Wk;
    used = keep;
  }
  throw NumericalError("eigensolver: no convergence");
}

std::vector<DiscreteEigenPair> solve_eigs(const std::shared_ptr<const FemSystem>& system, int count,
                                          const EigOptions& options) {
  const auto eig = solve_generalized(system->matrices.K_int, system->matrices.M_int, count, options);
  std::vector<DiscreteEigenPair> out;
  int block = 0;
  for (int i = 0; i < count; ++i) {
    DiscreteEigenPair p;
    p.lambda_sq = eig.values[i];
    p.lambda = std::sqrt(std::max(0.0, p.lambda_sq));
    p.coeffs = eig.vectors.col(i);
    // deterministic sign: largest-magnitude entry positive
    Eigen::Index arg = 0;
    p.coeffs.cwiseAbs().maxCoeff(&arg);
    if (p.coeffs[arg] < 0) p.coeffs = -p.coeffs;
    p.residual = eig.residuals[i];
    if (i > 0 && (p.lambda_sq - out.back().lambda_sq) >= options.degeneracy_gap * p.lambda_sq) ++block;
    p.block = block;
    p.system = system;
    out.push_back(std::move(p));
  }
  return out;
}

FluxTrace recover_flux(const std::shared_ptr<const FemSystem>& system, const Eigen::VectorXd& coeffs,
                       double lambda_sq) {
  const auto& mats = system->matrices;
  const Eigen::VectorXd u = system->extend(coeffs);
  const Eigen::VectorXd full = mats.K * u - lambda_sq * (mats.M * u);
  Eigen::VectorXd r(static_cast<Eigen::Index>(mats.boundary_vertices.size()));
  for (std::size_t i = 0; i < mats.boundary_vertices.size(); ++i) r[static_cast<Eigen::Index>(i)] = full[mats.boundary_vertices[i]];
  Eigen::SimplicialLDLT<SparseMatrix> solver(mats.B);
  if (solver.info() != Eigen::Success) throw NumericalError("boundary mass matrix is singular");
  FluxTrace out;
  out.vertices = mats.boundary_vertices;
  out.psi = solver.solve(r);
  out.system = system;
  return out;
}

FluxTrace recover_flux(const DiscreteEigenPair& pair) { return recover_flux(pair.system, pair.coeffs, pair.lambda_sq); }

double FluxTrace::l2() const {
  return std::sqrt(std::max(0.0, psi.dot(system->matrices.B * psi)));
}

double FluxTrace::at_vertex(int v) const {
  const auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) return 0.0;
  return psi[it - vertices.begin()];
}

double FluxTrace::weighted_l2_sq(const Point& origin) const {
  double sum = 0.0;
  for (const auto& e : system->mesh.boundary) {
    const double w = (system->mesh.vertices[static_cast<std::size_t>(e.a)] - origin).dot(e.normal);
    const double pa = at_vertex(e.a), pb = at_vertex(e.b);
    sum += w * e.length * (pa * pa + pa * pb + pb * pb) / 3.0;
  }
  return sum;
}

double flux_equation_residual(const FluxTrace& flux, const Eigen::VectorXd& coeffs, double lambda_sq) {
  const auto& mats = flux.system->matrices;
  const Eigen::VectorXd u = flux.system->extend(coeffs);
  const Eigen::VectorXd full = mats.K * u - lambda_sq * (mats.M * u);
  const Eigen::VectorXd lhs = mats.B * flux.psi;
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < mats.boundary_vertices.size(); ++i) {
    const double rhs = full[mats.boundary_vertices[i]];
    worst = std::max(worst, std::abs(lhs[static_cast<Eigen::Index>(i)] - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<ConvergenceRow> convergence_study(const DomainSpec& spec, int mode_index, const std::vector<double>& hs,
                                              const MeshOptions& mesh_options) {
  std::vector<ConvergenceRow> rows;
  if (hs.empty()) return rows;
  const double guess = spec.kind() == DomainKind::disk ? 2.0 / spec.radius() : 2.0;
  double cutoff = guess;
  std::vector<EigenPair> exact;
  while (static_cast<int>(exact.size()) <= mode_index) {
    cutoff *= 1.5;
    exact = eigenpairs_below(spec, cutoff);
  }
  const auto& ref = exact[static_cast<std::size_t>(mode_index)];
  const double ratio = std::sqrt(normal_ratio_squared(ref));
  for (double h : hs) {
    auto system = make_fem_system(build_mesh(spec, h, mesh_options));
    const auto pairs = solve_eigs(system, mode_index + 1);
    const auto& p = pairs.back();
    const double ratio_h = recover_flux(p).l2() / p.lambda;
    rows.push_back({h, std::abs(p.lambda_sq - ref.lambda_sq) / ref.lambda_sq, std::abs(ratio_h - ratio)});
  }
  return rows;
}

double observed_order(const std::vector<double>& hs, const std::vector<double>& errors) {
  const std::size_t n = std::min(hs.size(), errors.size());
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(hs[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "h,lambda_error,ratio_error\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.h, r.lambda_error, r.ratio_error);
    os << buf;
  }
}

void write_fem_spectrum_csv(std::ostream& os, const std::vector<DiscreteEigenPair>& pairs) {
  os << "lambda_h,residual\n";
  char buf[96];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.6e\n", p.lambda, p.residual);
    os << buf;
  }
}

void write_flux_csv(std::ostream& os, const FluxTrace& flux) {
  os << "s,psi\n";
  char buf[96];
  double s = 0.0;
  for (const auto& e : flux.system->mesh.boundary) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s, flux.at_vertex(e.a));
    os << buf;
    s += e.length;
  }
}

}  // namespace specbound
