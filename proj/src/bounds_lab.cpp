#include "specbound/bounds_lab.hpp"

#include "specbound/errors.hpp"
#include "specbound/specfun.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace specbound {
namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

}  // namespace

GramMatrix boundary_gram(const Spectrum& spectrum, double lambda, double s, WindowKind kind) {
  GramMatrix g;
  g.lambda = lambda;
  g.s = s;
  g.kind = kind;
  g.members = spectrum.window(lambda, s, kind);
  if (g.members.empty()) throw DomainError("boundary_gram: empty window");
  g.G = spectrum.trace_gram(g.members);
  g.factor = spectrum.trace_factor(g.members);
  return g;
}

RatioReport extremal_ratios(const GramMatrix& gram) {
  RatioReport r;
  r.lambda = gram.lambda;
  r.s = gram.s;
  r.members = gram.members.size();
  const Eigen::Index m = gram.G.cols();
  if (gram.factor.size() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram.factor, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // fewer rows than members leaves an exact null direction
    const double lo = sv.size() < m ? 0.0 : sv[sv.size() - 1];
    r.r_min = lo / gram.lambda;
    r.r_max = sv[0] / gram.lambda;
    r.v_min = svd.matrixV().col(m - 1);
    r.v_max = svd.matrixV().col(0);
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.G);
  const auto& ev = es.eigenvalues();
  r.r_min = std::sqrt(std::max(0.0, ev[0])) / gram.lambda;
  r.r_max = std::sqrt(std::max(0.0, ev[m - 1])) / gram.lambda;
  r.v_min = es.eigenvectors().col(0);
  r.v_max = es.eigenvectors().col(m - 1);
  return r;
}

std::pair<SpectralCluster, CounterexampleReport> counterexample_disk(int n, int k) {
  if (n < 0 || k < 1) throw DomainError("counterexample needs n >= 0 and k >= 1");
  CounterexampleReport rep;
  rep.n = n;
  rep.k = k;
  const double j1 = bessel_zero(n, k), j2 = bessel_zero(n, k + 1);
  rep.lambda = j1;
  rep.s_star = j2 - j1;
  const double s = rep.s_star * (1.0 + 1e-12) + 1e-12;

  const auto spectrum = std::make_shared<const AnalyticSpectrum>(DomainSpec::disk(1.0), j1 + s + 1.0);
  const auto members = spectrum->window(j1, s);
  std::size_t i1 = members.size(), i2 = members.size();
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto& mode = std::get<DiskMode>(spectrum->pair(members[m]).mode);
    if (mode == DiskMode{n, k, Parity::cos}) i1 = m;
    if (mode == DiskMode{n, k + 1, Parity::cos}) i2 = m;
  }
  if (i1 == members.size() || i2 == members.size()) throw NumericalError("counterexample: modes missing from window");

  // both traces are multiples of cos(n theta)
  const double a1 = spectrum->trace(members[i1]).cos_coeffs[n];
  const double a2 = spectrum->trace(members[i2]).cos_coeffs[n];
  const double nrm = std::hypot(a1, a2);
  rep.alpha = a2 / nrm;
  rep.beta = -a1 / nrm;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(members.size()));
  c[static_cast<Eigen::Index>(i1)] = rep.alpha;
  c[static_cast<Eigen::Index>(i2)] = rep.beta;
  auto u = make_cluster(spectrum, j1, s, c);

  rep.trace_norm = (spectrum->trace_factor(members) * c).norm();
  rep.u_norm = l2_norm(u);
  rep.ratio = rep.trace_norm / (rep.lambda * rep.u_norm);
  return {std::move(u), rep};
}

std::vector<double> log_grid(double a, double b, int n) {
  if (n < 1 || !(a > 0.0) || !(b >= a)) throw DomainError("log grid needs n >= 1 and 0 < a <= b");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = a;
    return g;
  }
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  g.back() = b;
  return g;
}

std::vector<double> parse_grid(const std::string& text) {
  std::istringstream is(text);
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || !is.eof())
    throw DomainError("grid must look like a:b:n, got '" + text + "'");
  return log_grid(a, b, n);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRow> ratio_sweep(const Spectrum& spectrum, const std::vector<double>& lambdas,
                                  const std::vector<double>& ss, double r_m, int jobs) {
  std::vector<SweepRow> rows(lambdas.size() * ss.size());
  parallel_for(rows.size(), jobs, [&](std::size_t cell) {
    SweepRow& row = rows[cell];
    row.lambda = lambdas[cell / ss.size()];
    row.s = ss[cell % ss.size()];
    const auto members = spectrum.window(row.lambda, row.s);
    row.members = members.size();
    if (members.empty()) {
      row.r_min = row.r_max = row.q_upper = row.q_lower = nan_value;
      return;
    }
    GramMatrix g{spectrum.trace_gram(members), spectrum.trace_factor(members), row.lambda, row.s,
                 WindowKind::half_open, members};
    const auto r = extremal_ratios(g);
    row.r_min = r.r_min;
    row.r_max = r.r_max;
    const double l = row.lambda, s = row.s;
    row.q_upper = r.r_max * l / (std::sqrt(1.0 + s) * (l + s));
    const double certified = 2.0 * l * l - 2.0 * r_m * s * (l + s) * (l + s);
    row.q_lower = certified > 0.0 ? (r.r_min * l) * (r.r_min * l) / certified : nan_value;
  });
  return rows;
}

std::vector<ProjectorRow> projector_bound(const Spectrum& spectrum, const std::vector<double>& lambdas, int jobs) {
  std::vector<ProjectorRow> rows(lambdas.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    ProjectorRow& row = rows[i];
    row.lambda = lambdas[i];
    const auto members = spectrum.window(row.lambda, 0.0, WindowKind::upper_closed);
    row.members = members.size();
    if (members.empty()) {
      row.eig_max = 0.0;
      row.value = 0.0;
      return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spectrum.trace_gram(members), Eigen::EigenvaluesOnly);
    row.eig_max = std::max(0.0, es.eigenvalues()[es.eigenvalues().size() - 1]);
    row.value = std::sqrt(row.eig_max) / std::pow(row.lambda, 1.5);
  });
  return rows;
}

std::vector<HkRow> hk_sweep(const AnalyticSpectrum& spectrum, const std::vector<double>& lambdas, double s,
                            const std::vector<double>& ks, int jobs) {
  if (spectrum.domain().kind() != DomainKind::disk)
    throw UnsupportedError("H^k sweeps need Fourier traces (disk domains)");
  std::vector<HkRow> rows(lambdas.size() * ks.size());
  parallel_for(rows.size(), jobs, [&](std::size_t cell) {
    HkRow& row = rows[cell];
    row.lambda = lambdas[cell / ks.size()];
    row.k = ks[cell % ks.size()];
    row.s = s;
    const auto members = spectrum.window(row.lambda, s);
    row.members = members.size();
    if (members.empty()) {
      row.value = nan_value;
      return;
    }
    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        G(i, j) = G(j, i) = trace_hk_inner(spectrum.trace(members[static_cast<std::size_t>(i)]),
                                           spectrum.trace(members[static_cast<std::size_t>(j)]), row.k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    const double top = std::max(0.0, es.eigenvalues()[m - 1]);
    row.value = std::sqrt(top) / (std::sqrt(1.0 + s) * std::pow(row.lambda + s, row.k + 1.0));
  });
  return rows;
}

double ozawa_prediction(double lambda) { return std::pow(lambda, 4) / (8.0 * std::numbers::pi); }

double ozawa_sum(const AnalyticSpectrum& spectrum, const Point& y, double lambda) {
  if (lambda > spectrum.complete_below())
    throw DomainError("ozawa_sum: spectrum truncated below the requested lambda");
  const auto& d = spectrum.domain();
  double sum = 0.0;
  if (d.kind() == DomainKind::disk) {
    const Point r = y - d.center();
    if (std::abs(r.norm() - d.radius()) > 1e-10 * d.radius()) throw DomainError("ozawa_sum: point not on the boundary");
    const double theta = std::atan2(r.y(), r.x());
    for (std::size_t i = 0; i < spectrum.size() && spectrum.frequency(i) < lambda; ++i) {
      const double v = spectrum.trace(i).at_angle(theta);
      sum += v * v;
    }
    return sum;
  }
  for (std::size_t i = 0; i < spectrum.size() && spectrum.frequency(i) < lambda; ++i) {
    const double v = normal_derivative(spectrum.pair(i), y);
    sum += v * v;
  }
  return sum;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return nan_value;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_comment(std::ostream& os, const CsvMeta& meta) {
  os << "# seed=" << meta.seed << " domain=" << meta.domain << " version=" << SPECBOUND_VERSION
     << " config_hash=" << meta.config_hash << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const CsvMeta& meta) {
  write_comment(os, meta);
  os << "lambda,s,members,r_min,r_max,q_upper,q_lower\n";
  for (const auto& r : rows)
    os << format_double(r.lambda) << ',' << format_double(r.s) << ',' << r.members << ',' << format_double(r.r_min)
       << ',' << format_double(r.r_max) << ',' << format_double(r.q_upper) << ',' << format_double(r.q_lower) << '\n';
}

void write_projector_csv(std::ostream& os, const std::vector<ProjectorRow>& rows, const CsvMeta& meta) {
  write_comment(os, meta);
  os << "lambda,members,eig_max,value\n";
  for (const auto& r : rows)
    os << format_double(r.lambda) << ',' << r.members << ',' << format_double(r.eig_max) << ','
       << format_double(r.value) << '\n';
}

void write_hk_csv(std::ostream& os, const std::vector<HkRow>& rows, const CsvMeta& meta) {
  write_comment(os, meta);
  os << "lambda,s,k,members,value\n";
  for (const auto& r : rows)
    os << format_double(r.lambda) << ',' << format_double(r.s) << ',' << format_double(r.k) << ',' << r.members << ','
       << format_double(r.value) << '\n';
}

void write_ozawa_csv(std::ostream& os, const std::vector<OzawaRow>& rows, const CsvMeta& meta) {
  write_comment(os, meta);
  os << "lambda,sum,prediction,ratio\n";
  for (const auto& r : rows)
    os << format_double(r.lambda) << ',' << format_double(r.sum) << ',' << format_double(r.prediction) << ','
       << format_double(r.ratio) << '\n';
}

}  // namespace specbound
