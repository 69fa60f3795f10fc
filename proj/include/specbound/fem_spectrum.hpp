#ifndef SPECBOUND_FEM_SPECTRUM_HPP
#define SPECBOUND_FEM_SPECTRUM_HPP

// P1 finite elements for the Dirichlet Laplacian on triangle meshes.

#include "specbound/geometry.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <memory>
#include <vector>

namespace specbound {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Full P1 matrices over all mesh vertices plus the boundary mass matrix
/// over `boundary_vertices`.
struct FemMatrices {
  SparseMatrix K;  // stiffness
  SparseMatrix M;  // mass
  SparseMatrix B;  // boundary mass, indexed like boundary_vertices
  std::vector<int> boundary_vertices;  // ascending vertex ids
  std::vector<int> interior_vertices;  // ascending vertex ids, DOF order
  std::vector<int> dof_of_vertex;      // -1 on the boundary
  SparseMatrix K_int;  // Dirichlet-eliminated
  SparseMatrix M_int;
};

/// Throws DomainError naming the triangle index for a degenerate element.
FemMatrices assemble(const TriangleMesh& mesh);

struct FemSystem {
  TriangleMesh mesh;
  FemMatrices matrices;

  /// Interior coefficients to a vector over all vertices (zero on the boundary).
  Eigen::VectorXd extend(const Eigen::VectorXd& interior) const;
};

std::shared_ptr<const FemSystem> make_fem_system(TriangleMesh mesh);

struct DiscreteEigenPair {
  double lambda_sq = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd coeffs;  // interior DOFs, x^T M x = 1
  bool mass_normalized = true;
  double residual = 0.0;  // ||K x - lambda^2 M x|| / ||K x||
  int block = 0;          // pairs sharing a block are numerically degenerate
  std::shared_ptr<const FemSystem> system;

  Eigen::VectorXd nodal_values() const { return system->extend(coeffs); }
};

struct EigOptions {
  /// Systems with fewer interior DOFs go to the dense solver.
  int dense_threshold = 600;
  int block_size = 4;
  int max_restarts = 400;
  double degeneracy_gap = 1e-6;
  unsigned long long seed = 1;
};

/// Smallest `count` generalized pairs K x = mu M x, ascending, M-orthonormal.
/// Shift-invert block Krylov with thick restarts above the dense threshold.
/// Throws NumericalError if the factorization or the iteration fails.
struct GeneralizedEigs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd residuals;
};
GeneralizedEigs solve_generalized(const SparseMatrix& K, const SparseMatrix& M, int count,
                                  const EigOptions& options = {});

std::vector<DiscreteEigenPair> solve_eigs(const std::shared_ptr<const FemSystem>& system, int count,
                                          const EigOptions& options = {});

/// Nodal boundary flux from the variational Green identity, B psi = r.
struct FluxTrace {
  std::vector<int> vertices;  // boundary vertex ids (ascending)
  Eigen::VectorXd psi;
  std::shared_ptr<const FemSystem> system;

  double l2() const;  // sqrt(psi^T B psi)
  /// Sum over boundary edges of int_e (x - origin).nu psi^2 (exact for P1 traces).
  double weighted_l2_sq(const Point& origin) const;
  /// Value at vertex id, or 0 for interior vertices.
  double at_vertex(int v) const;
};

/// Consistent flux for an arbitrary interior vector with eigenvalue lambda_sq.
FluxTrace recover_flux(const std::shared_ptr<const FemSystem>& system, const Eigen::VectorXd& coeffs,
                       double lambda_sq);
FluxTrace recover_flux(const DiscreteEigenPair& pair);

/// Relative residual of the defining flux equation on every boundary node.
double flux_equation_residual(const FluxTrace& flux, const Eigen::VectorXd& coeffs, double lambda_sq);

struct ConvergenceRow {
  double h = 0.0;
  double lambda_error = 0.0;  // |lambda_h^2 - lambda^2| / lambda^2
  double ratio_error = 0.0;   // |ratio_h - ratio|, ratio = ||psi|| / (lambda ||u||)
};

/// Mode index is 0-based in the ascending analytic spectrum of a disk or
/// rectangle.
std::vector<ConvergenceRow> convergence_study(const DomainSpec& spec, int mode_index, const std::vector<double>& hs,
                                              const MeshOptions& mesh_options = {});
/// Least-squares slope of log(error) against log(h).
double observed_order(const std::vector<double>& hs, const std::vector<double>& errors);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
/// Columns lambda_h,residual.
void write_fem_spectrum_csv(std::ostream& os, const std::vector<DiscreteEigenPair>& pairs);
/// Columns s,psi walking the boundary edges in mesh order.
void write_flux_csv(std::ostream& os, const FluxTrace& flux);

}  // namespace specbound

#endif  // SPECBOUND_FEM_SPECTRUM_HPP
