#ifndef SPECBOUND_SPECTRUM_HPP
#define SPECBOUND_SPECTRUM_HPP

// Common view of an orthonormal Dirichlet spectrum (closed form or P1 FEM)
// with the boundary and multiplier matrices the cluster code needs.

#include "specbound/analytic_spectrum.hpp"
#include "specbound/fem_spectrum.hpp"
#include "specbound/geometry.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace specbound {

using Indices = std::vector<std::size_t>;

enum class WindowKind {
  half_open,     // [lo, lo + width)
  upper_closed,  // (0, lo]; width ignored
};

class Spectrum {
 public:
  virtual ~Spectrum() = default;

  virtual const DomainSpec& domain() const = 0;
  virtual bool is_discrete() const = 0;
  virtual std::size_t size() const = 0;
  virtual double frequency(std::size_t i) const = 0;
  virtual std::string label(std::size_t i) const = 0;
  /// Frequencies below this value are all present.
  virtual double complete_below() const = 0;

  virtual double value(std::size_t i, const Point& p) const = 0;
  virtual Point gradient(std::size_t i, const Point& p) const = 0;

  /// G_ij = int_Y d_nu e_i d_nu e_j.
  virtual Eigen::MatrixXd trace_gram(const Indices& idx) const = 0;
  /// int_Y (x - origin).nu d_nu e_i d_nu e_j.
  virtual Eigen::MatrixXd weighted_trace_gram(const Indices& idx, const Point& origin) const = 0;
  /// B with trace_gram(idx) = B^T B; singular values of B resolve rank loss
  /// to rounding level instead of its square root.
  virtual Eigen::MatrixXd trace_factor(const Indices& idx) const = 0;
  /// X_ij = int_M e_i (x - origin).grad e_j.
  virtual Eigen::MatrixXd multiplier_matrix(const Indices& idx, const Point& origin) const = 0;
  /// Interior Gram matrices computed independently of orthonormality
  /// (quadrature for closed forms, assembled matrices for FEM).
  virtual Eigen::MatrixXd mass_matrix(const Indices& idx) const = 0;
  virtual Eigen::MatrixXd stiffness_matrix(const Indices& idx) const = 0;
  /// Coefficients <f, e_i> of a function given pointwise.
  virtual Eigen::VectorXd project(const Indices& idx, const std::function<double(const Point&)>& f) const = 0;

  /// Members of a frequency window. Throws DomainError if the window reaches
  /// beyond complete_below().
  Indices window(double lo, double width, WindowKind kind = WindowKind::half_open) const;
  Eigen::VectorXd frequencies(const Indices& idx) const;
};

class AnalyticSpectrum final : public Spectrum {
 public:
  /// All closed-form pairs with frequency < cutoff.
  AnalyticSpectrum(const DomainSpec& domain, double cutoff);

  const DomainSpec& domain() const override { return domain_; }
  bool is_discrete() const override { return false; }
  std::size_t size() const override { return pairs_.size(); }
  double frequency(std::size_t i) const override { return pairs_[i].lambda; }
  std::string label(std::size_t i) const override { return mode_label(pairs_[i].mode); }
  double complete_below() const override { return cutoff_; }

  double value(std::size_t i, const Point& p) const override;
  Point gradient(std::size_t i, const Point& p) const override;
  Eigen::MatrixXd trace_gram(const Indices& idx) const override;
  Eigen::MatrixXd weighted_trace_gram(const Indices& idx, const Point& origin) const override;
  Eigen::MatrixXd trace_factor(const Indices& idx) const override;
  Eigen::MatrixXd multiplier_matrix(const Indices& idx, const Point& origin) const override;
  Eigen::MatrixXd mass_matrix(const Indices& idx) const override;
  Eigen::MatrixXd stiffness_matrix(const Indices& idx) const override;
  Eigen::VectorXd project(const Indices& idx, const std::function<double(const Point&)>& f) const override;

  const EigenPair& pair(std::size_t i) const { return pairs_[i]; }
  const BoundaryTrace& trace(std::size_t i) const { return traces_[i]; }
  const std::vector<EigenPair>& pairs() const { return pairs_; }

 private:
  QuadratureSamples samples(const Indices& idx) const;

  DomainSpec domain_;
  double cutoff_;
  std::vector<EigenPair> pairs_;
  std::vector<BoundaryTrace> traces_;
};

class FemSpectrum final : public Spectrum {
 public:
  /// Lowest `count` discrete pairs on a mesh of `domain`.
  FemSpectrum(const DomainSpec& domain, std::shared_ptr<const FemSystem> system, int count,
              const EigOptions& options = {});

  const DomainSpec& domain() const override { return domain_; }
  bool is_discrete() const override { return true; }
  std::size_t size() const override { return pairs_.size(); }
  double frequency(std::size_t i) const override { return pairs_[i].lambda; }
  std::string label(std::size_t i) const override { return "fem" + std::to_string(i); }
  double complete_below() const override;

  double value(std::size_t i, const Point& p) const override;
  Point gradient(std::size_t i, const Point& p) const override;
  Eigen::MatrixXd trace_gram(const Indices& idx) const override;
  Eigen::MatrixXd weighted_trace_gram(const Indices& idx, const Point& origin) const override;
  Eigen::MatrixXd trace_factor(const Indices& idx) const override;
  Eigen::MatrixXd multiplier_matrix(const Indices& idx, const Point& origin) const override;
  Eigen::MatrixXd mass_matrix(const Indices& idx) const override;
  Eigen::MatrixXd stiffness_matrix(const Indices& idx) const override;
  Eigen::VectorXd project(const Indices& idx, const std::function<double(const Point&)>& f) const override;

  const DiscreteEigenPair& pair(std::size_t i) const { return pairs_[i]; }
  const FluxTrace& flux(std::size_t i) const { return fluxes_[i]; }
  const FemSystem& system() const { return *system_; }

 private:
  // Triangle containing p and its barycentric coordinates.
  std::pair<std::size_t, Eigen::Vector3d> locate(const Point& p) const;

  DomainSpec domain_;
  std::shared_ptr<const FemSystem> system_;
  std::vector<DiscreteEigenPair> pairs_;
  std::vector<FluxTrace> fluxes_;
  Eigen::MatrixXd nodal_;  // vertex values, one column per pair
};

}  // namespace specbound

#endif  // SPECBOUND_SPECTRUM_HPP
