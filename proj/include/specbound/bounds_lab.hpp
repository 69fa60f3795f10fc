#ifndef SPECBOUND_BOUNDS_LAB_HPP
#define SPECBOUND_BOUNDS_LAB_HPP

// Extremal normal-derivative ratios over spectral windows, the sweeps built
// on them, the disk trace-cancellation construction, and the pointwise
// boundary Weyl sum.

#include "specbound/cluster.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace specbound {

struct GramMatrix {
  Eigen::MatrixXd G;
  Eigen::MatrixXd factor;  // G = factor^T factor
  double lambda = 0.0;
  double s = 0.0;
  WindowKind kind = WindowKind::half_open;
  Indices members;
};

/// Throws DomainError for an empty window.
GramMatrix boundary_gram(const Spectrum& spectrum, double lambda, double s,
                         WindowKind kind = WindowKind::half_open);

struct RatioReport {
  double lambda = 0.0;
  double s = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  Eigen::VectorXd v_min;  // unit coefficient vectors attaining the extremes
  Eigen::VectorXd v_max;
  std::size_t members = 0;
};

/// r^2 lambda^2 are the extreme eigenvalues of G, taken as squared singular
/// values of the factor when one is present.
RatioReport extremal_ratios(const GramMatrix& gram);

struct CounterexampleReport {
  int n = 0;
  int k = 1;
  double lambda = 0.0;  // j_{n,k}
  double s_star = 0.0;  // j_{n,k+1} - j_{n,k}
  double alpha = 0.0;
  double beta = 0.0;
  double trace_norm = 0.0;  // ||d_nu u||
  double ratio = 0.0;       // ||d_nu u|| / (lambda ||u||)
  double u_norm = 0.0;
};

/// Unit-disk combination of (n,k,cos) and (n,k+1,cos) whose normal
/// derivative cancels. The cluster window is [j_{n,k}, j_{n,k} + s) with s
/// just above s_star.
std::pair<SpectralCluster, CounterexampleReport> counterexample_disk(int n, int k);

/// `n` points log-spaced on [a, b] (a single point gives {a}).
std::vector<double> log_grid(double a, double b, int n);
/// Parses "a:b:n" into a log grid.
std::vector<double> parse_grid(const std::string& text);

struct SweepRow {
  double lambda = 0.0;
  double s = 0.0;
  std::size_t members = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  double q_upper = 0.0;  // r_max lambda / (sqrt(1+s)(lambda+s))
  double q_lower = 0.0;  // (r_min lambda)^2 / (2 lambda^2 - 2 R_M s (lambda+s)^2)
};

/// One row per (lambda, s) cell, lambda-major. Empty cells have members = 0
/// and NaN ratios. `jobs` worker threads; output order does not depend on it.
std::vector<SweepRow> ratio_sweep(const Spectrum& spectrum, const std::vector<double>& lambdas,
                                  const std::vector<double>& ss, double r_m, int jobs = 1);

struct ProjectorRow {
  double lambda = 0.0;
  std::size_t members = 0;
  double eig_max = 0.0;
  double value = 0.0;  // sqrt(eig_max) / lambda^{3/2}
};

/// Gram matrix over the closed window (0, lambda].
std::vector<ProjectorRow> projector_bound(const Spectrum& spectrum, const std::vector<double>& lambdas, int jobs = 1);

struct HkRow {
  double lambda = 0.0;
  double s = 0.0;
  double k = 0.0;
  std::size_t members = 0;
  double value = 0.0;  // sqrt(eig_max G_k) / (sqrt(1+s)(lambda+s)^{k+1})
};

/// Disk spectra only (Fourier traces); throws UnsupportedError otherwise.
std::vector<HkRow> hk_sweep(const AnalyticSpectrum& spectrum, const std::vector<double>& lambdas, double s,
                            const std::vector<double>& ks, int jobs = 1);

struct OzawaRow {
  double lambda = 0.0;
  double sum = 0.0;
  double prediction = 0.0;  // lambda^4 / (8 pi)
  double ratio = 0.0;
};

/// sum over lambda_j < lambda of psi_j(y)^2. Throws DomainError if the
/// spectrum is not complete below lambda.
double ozawa_sum(const AnalyticSpectrum& spectrum, const Point& y, double lambda);
double ozawa_prediction(double lambda);

/// Least-squares slope of log(y) against log(x), skipping non-finite and
/// non-positive entries.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs f(i) for i in [0, n) on `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f);

struct CsvMeta {
  std::string seed = "none";
  std::string domain;
  std::string config_hash = "none";
};

void write_comment(std::ostream& os, const CsvMeta& meta);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const CsvMeta& meta);
void write_projector_csv(std::ostream& os, const std::vector<ProjectorRow>& rows, const CsvMeta& meta);
void write_hk_csv(std::ostream& os, const std::vector<HkRow>& rows, const CsvMeta& meta);
void write_ozawa_csv(std::ostream& os, const std::vector<OzawaRow>& rows, const CsvMeta& meta);

/// Shortest round-trip formatting used in every CSV.
std::string format_double(double x);

}  // namespace specbound

#endif  // SPECBOUND_BOUNDS_LAB_HPP
