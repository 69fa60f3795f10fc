#include "specbound/acceptance.hpp"

#include "specbound/boundary_layer.hpp"
#include "specbound/bounds_lab.hpp"
#include "specbound/errors.hpp"
#include "specbound/rellich.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace specbound {
namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const AnalyticSpectrum> unit_disk(double cutoff) {
  return std::make_shared<const AnalyticSpectrum>(DomainSpec::disk(1.0), cutoff);
}

std::shared_ptr<const AnalyticSpectrum> unit_square(double cutoff) {
  return std::make_shared<const AnalyticSpectrum>(DomainSpec::rectangle(1.0, 1.0), cutoff);
}

// Window base at or below lambda guaranteed to hold a member: the first
// frequency >= lambda, shifted down by `back`.
double populated_base(const Spectrum& sp, double lambda, double back) {
  for (std::size_t i = 0; i < sp.size(); ++i)
    if (sp.frequency(i) >= lambda) return sp.frequency(i) - back;
  throw NumericalError("no frequency above " + std::to_string(lambda));
}

CriterionResult start(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

std::pair<double, double> spread(const std::vector<double>& v) {
  double lo = INFINITY, hi = -INFINITY;
  for (double x : v)
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  return {lo, hi};
}

// Per-lambda maximum over the s columns of a lambda-major table.
std::vector<double> row_maxima(const std::vector<double>& values, std::size_t n_lambda, std::size_t n_s) {
  std::vector<double> out(n_lambda, NAN);
  for (std::size_t i = 0; i < n_lambda; ++i)
    for (std::size_t k = 0; k < n_s; ++k) {
      const double v = values[i * n_s + k];
      if (std::isfinite(v) && !(v <= out[i])) out[i] = v;
    }
  return out;
}

CriterionResult disk_ratio_law() {
  auto r = start(1, "disk and square ratio laws");
  const auto t0 = Clock::now();
  double worst_disk = 0.0, worst_square = 0.0;
  for (const auto& [sp, count, target, worst] :
       {std::tuple{unit_disk(30.0), 200, std::sqrt(2.0), &worst_disk},
        std::tuple{unit_square(30.0), 50, 2.0, &worst_square}}) {
    if (sp->size() < static_cast<std::size_t>(count)) throw NumericalError("ratio law: spectrum too short");
    Indices idx(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    // ||e_j|| by domain quadrature, ||d_nu e_j|| from the boundary trace
    const Eigen::VectorXd mass = sp->mass_matrix(idx).diagonal();
    for (int i = 0; i < count; ++i) {
      const double ratio = trace_l2(sp->trace(static_cast<std::size_t>(i))) /
                           (sp->frequency(static_cast<std::size_t>(i)) * std::sqrt(mass[i]));
      *worst = std::max(*worst, std::abs(ratio - target));
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = worst_disk <= 1e-8 && worst_square <= 1e-8 && r.seconds < 10.0;
  r.summary = fmt("max |ratio - sqrt2| over 200 disk modes %.2e, max |ratio - 2| over 50 square modes %.2e",
                  worst_disk, worst_square);
  r.details = {{"disk_max_error", worst_disk}, {"square_max_error", worst_square}, {"tolerance", 1e-8},
               {"budget_s", 10.0}};
  return r;
}

CriterionResult rellich_identity(std::uint64_t seed) {
  auto r = start(2, "Rellich identity");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam(5.0, 40.0);
  double worst = 0.0, worst_single = 0.0;
  int clusters = 0, failures = 0;
  for (const auto& sp : {std::static_pointer_cast<const AnalyticSpectrum>(unit_disk(42.0)),
                         std::static_pointer_cast<const AnalyticSpectrum>(unit_square(42.0))}) {
    for (int i = 0; i < 100; ++i) {
      const double s = i % 2 == 0 ? 0.05 : 0.2;
      const double base = populated_base(*sp, lam(rng), s / 2);
      const auto u = random_cluster(sp, base, s, rng());
      const auto rep = rellich_check(u);
      const double n = l2_norm(u);
      const double rel = rep.residual / (u.lambda * u.lambda * n * n);
      worst = std::max(worst, rel);
      if (!rep.passed()) ++failures;
      ++clusters;
    }
    // single-member windows
    for (std::size_t i = 0; i < sp->size() && sp->frequency(i) < 40.0; i += 7) {
      if (sp->window(sp->frequency(i), 1e-9).size() != 1) continue;
      const auto u = make_cluster(sp, sp->frequency(i), 1e-9, Eigen::VectorXd::Ones(1));
      const auto rep = rellich_check(u);
      worst_single = std::max({worst_single, std::abs(rep.t2), std::abs(rep.t3)});
    }
  }
  r.seconds = seconds_since(t0);
  r.passed = failures == 0 && worst <= 1e-7 && worst_single <= 1e-12 && r.seconds < 60.0;
  r.summary = fmt("%d clusters, max residual/(lambda^2 ||u||^2) %.2e, single-mode max |T2|,|T3| %.1e", clusters,
                  worst, worst_single);
  r.details = {{"clusters", clusters}, {"max_relative_residual", worst}, {"single_max_t2_t3", worst_single},
               {"budget_s", 60.0}};
  return r;
}

CriterionResult perturbation(std::uint64_t seed) {
  auto r = start(3, "perturbation estimates");
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> lam(2.0, 40.0), ss(0.01, 3.0);
  const auto disk = unit_disk(45.0);
  const auto square = unit_square(45.0);
  int violations = 0, trials = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::shared_ptr<const Spectrum> sp = i % 2 == 0 ? std::static_pointer_cast<const Spectrum>(disk)
                                                          : std::static_pointer_cast<const Spectrum>(square);
    const double l = lam(rng), s = ss(rng);
    const auto u = random_cluster(sp, l, s, rng());
    const double n = l2_norm(u);
    const double b1 = 2 * s * (l + s) * n, b2 = 2 * s * (l + s) * (l + s) * n;
    const double d1 = defect_norm(u), d2 = defect_grad_norm(u);
    if (d1 > b1 * (1 + 1e-14) || d2 > b2 * (1 + 1e-14)) ++violations;
    if (b1 > 0) worst = std::max({worst, d1 / b1, d2 / b2});
    ++trials;
  }
  double single = 0.0;
  for (std::size_t i = 0; i < 60; ++i) {
    const auto idx = disk->window(disk->frequency(i), 1e-9);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
    c[0] = 1.0;
    const auto u = make_cluster(disk, disk->frequency(i), 1e-9, c);
    single = std::max({single, defect_norm(u), defect_grad_norm(u)});
  }
  r.seconds = seconds_since(t0);
  r.passed = violations == 0 && single == 0.0 && r.seconds < 10.0;
  r.summary = fmt("%d clusters, %d violations, max defect/bound %.3f, single-mode defect %.1e", trials, violations,
                  worst, single);
  r.details = {{"trials", trials}, {"violations", violations}, {"max_bound_fraction", worst},
               {"single_defect", single}, {"budget_s", 10.0}};
  return r;
}

CriterionResult upper_trend(int jobs) {
  auto r = start(4, "upper bound trend");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(42.0);
  const auto grid = log_grid(5.0, 40.0, 10);
  const std::vector<double> ss{0.05, 0.2, 1.0};
  const auto rows = ratio_sweep(*sp, grid, ss, 2.0, jobs);
  std::vector<double> q;
  for (const auto& row : rows) q.push_back(row.members > 0 ? row.q_upper : NAN);
  const auto [lo, hi] = spread(q);
  const auto maxima = row_maxima(q, grid.size(), ss.size());
  const double slope = loglog_slope(grid, maxima);
  const auto cells = std::count_if(q.begin(), q.end(), [](double x) { return std::isfinite(x); });
  r.seconds = seconds_since(t0);
  r.passed = hi / lo <= 2.0 && slope >= -0.1 && slope <= 0.1;
  r.summary = fmt("q_upper in [%.3f, %.3f] over %d nonempty cells (spread %.3f), slope of maxima %.3f", lo, hi,
                  static_cast<int>(cells), hi / lo, slope);
  r.details = {{"min", lo}, {"max", hi}, {"spread", hi / lo}, {"slope", slope}, {"cells", cells}};
  return r;
}

CriterionResult lower_bound(std::uint64_t seed, int jobs) {
  auto r = start(5, "lower bound below the threshold");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(42.0);
  const auto grid = log_grid(5.0, 40.0, 10);
  const auto rows = ratio_sweep(*sp, grid, {0.2}, 2.0, jobs);
  double floor = INFINITY;
  for (const auto& row : rows)
    if (row.members > 0) floor = std::min(floor, row.r_min);
  std::mt19937_64 rng(seed + 5);
  std::uniform_real_distribution<double> lam(5.0, 40.0);
  int chain_fail = 0, sampled = 0;
  for (int i = 0; i < 200; ++i) {
    const auto u = random_cluster(sp, lam(rng), 0.2, rng());
    if (u.empty()) continue;
    const double lhs = normal_norm_sq(u), rhs = lower_bound_rhs(u, 2.0);
    if (lhs < rhs - 1e-9 * u.lambda * u.lambda) ++chain_fail;
    ++sampled;
  }
  r.seconds = seconds_since(t0);
  r.passed = floor >= 0.3 && chain_fail == 0 && sampled > 0;
  r.summary = fmt("min r_min at s = 0.2 is %.3f, inequality chain violated in %d of %d clusters", floor, chain_fail,
                  sampled);
  r.details = {{"min_r_min", floor}, {"chain_violations", chain_fail}, {"sampled", sampled}};
  return r;
}

CriterionResult counterexample() {
  auto r = start(6, "trace cancellation counterexample");
  const auto t0 = Clock::now();
  double worst_ratio = 0.0, worst_s = 0.0;
  nlohmann::json cases = nlohmann::json::array();
  for (int n : {0, 1})
    for (int k : {1, 2}) {
      const auto rep = counterexample_disk(n, k).second;
      worst_ratio = std::max(worst_ratio, rep.ratio);
      worst_s = std::max(worst_s, rep.s_star);
      cases.push_back({{"n", n}, {"k", k}, {"s_star", rep.s_star}, {"ratio", rep.ratio}});
    }
  r.seconds = seconds_since(t0);
  r.passed = worst_ratio <= 1e-8 && worst_s <= pi + 0.2 && r.seconds < 1.0;
  r.summary = fmt("max ratio %.1e, max s* %.4f (pi + 0.2 = %.4f)", worst_ratio, worst_s, pi + 0.2);
  r.details = {{"cases", cases}, {"budget_s", 1.0}};
  return r;
}

CriterionResult projector(int jobs) {
  auto r = start(7, "spectral projector bound");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(42.0);
  const auto grid = log_grid(10.0, 40.0, 10);
  std::vector<double> v;
  for (const auto& row : projector_bound(*sp, grid, jobs)) v.push_back(row.value);
  const auto [lo, hi] = spread(v);
  const double slope = loglog_slope(grid, v);
  r.seconds = seconds_since(t0);
  r.passed = hi / lo <= 2.0 && slope <= 0.1;
  r.summary = fmt("sqrt(eig_max)/lambda^1.5 in [%.3f, %.3f], slope %.3f", lo, hi, slope);
  r.details = {{"min", lo}, {"max", hi}, {"slope", slope}};
  return r;
}

CriterionResult hk_bounds(int jobs) {
  auto r = start(8, "H^k trace bounds");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(42.0);
  const auto grid = log_grid(5.0, 40.0, 10);
  const std::vector<double> ss{0.05, 0.2, 1.0};
  const std::vector<double> ks{0.0, 1.0, 2.0};
  // values[k][lambda * |s| + s]
  std::vector<std::vector<double>> values(ks.size(), std::vector<double>(grid.size() * ss.size(), NAN));
  for (std::size_t si = 0; si < ss.size(); ++si) {
    const auto rows = hk_sweep(*sp, grid, ss[si], ks, jobs);
    for (std::size_t li = 0; li < grid.size(); ++li)
      for (std::size_t ki = 0; ki < ks.size(); ++ki)
        values[ki][li * ss.size() + si] = rows[li * ks.size() + ki].value;
  }
  bool ok = true;
  std::string text;
  nlohmann::json per_k = nlohmann::json::array();
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const double slope = loglog_slope(grid, row_maxima(values[ki], grid.size(), ss.size()));
    const auto [lo, hi] = spread(values[ki]);
    ok = ok && slope >= -0.15 && slope <= 0.15;
    text += fmt("%sk=%g slope %.3f", ki ? ", " : "", ks[ki], slope);
    per_k.push_back({{"k", ks[ki]}, {"slope", slope}, {"min", lo}, {"max", hi}});
  }
  r.seconds = seconds_since(t0);
  r.passed = ok;
  r.summary = text + " (allowed [-0.15, 0.15])";
  r.details = {{"orders", per_k}, {"normalization", "sqrt(1+s)(lambda+s)^(k+1)"}};
  return r;
}

CriterionResult ozawa() {
  auto r = start(9, "pointwise boundary Weyl sum");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(60.5);
  std::vector<double> ratios;
  double asym = 0.0;
  for (double l : {30.0, 45.0, 60.0}) {
    double first = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double th = 2 * pi * i / 8 + 0.1;
      const double s = ozawa_sum(*sp, Point(std::cos(th), std::sin(th)), l);
      if (i == 0) first = s;
      asym = std::max(asym, std::abs(s - first) / first);
    }
    ratios.push_back(first / ozawa_prediction(l));
  }
  // "approaches 1": distance to 1 may not grow by more than 0.01
  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    monotone = monotone && std::abs(1.0 - ratios[i]) <= std::abs(1.0 - ratios[i - 1]) + 0.01;
  r.seconds = seconds_since(t0);
  r.passed = std::abs(ratios.back() - 1.0) <= 0.15 && monotone && r.seconds < 120.0;
  r.summary = fmt("S/(lambda^4/8pi) = %.4f, %.4f, %.4f at lambda = 30, 45, 60; angular spread %.1e", ratios[0],
                  ratios[1], ratios[2], asym);
  r.details = {{"ratios", ratios}, {"angular_spread", asym}, {"modes", sp->size()}, {"budget_s", 120.0}};
  return r;
}

CriterionResult appendix(std::uint64_t seed) {
  auto r = start(10, "boundary layer");
  const auto t0 = Clock::now();
  const auto sp = unit_disk(42.0);
  const auto grid = linear_grid(0.0, collar_depth, 400);
  std::mt19937_64 rng(seed + 10);
  std::uniform_real_distribution<double> rr(0.0, collar_depth), tt(0.0, 2 * pi);
  double res = 0.0, l0 = 0.0, e0 = 0.0, mass_excess = -INFINITY, slack = INFINITY;
  std::vector<double> lams, bdy, en;
  const auto lambdas = log_grid(5.0, 40.0, 8);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double base = populated_base(*sp, lambdas[i], 0.0);
    const auto u = random_cluster(sp, base, 0.1, rng());
    const double n = l2_norm(u), l2 = u.lambda * u.lambda;
    for (int p = 0; p < 25; ++p) res = std::max(res, v_equation_residual(u, rr(rng), tt(rng)) / (l2 * n));
    const auto prof = layer_profile(u, grid);
    l0 = std::max(l0, std::abs(prof.samples.front().L));
    e0 = std::max(e0, std::abs(prof.samples.front().E - 0.5 * normal_norm_sq(u)) / (0.5 * normal_norm_sq(u)));
    mass_excess = std::max(mass_excess, collar_integral(u) - n * n);
    slack = std::min(slack, (prof.diff.min_slack + prof.diff.tolerance) / prof.diff.tolerance);
    lams.push_back(u.lambda);
    bdy.push_back(prof.bdy.max_rho);
    en.push_back(prof.energy.max_rho);
  }
  const double bdy_slope = loglog_slope(lams, bdy), en_slope = loglog_slope(lams, en);
  r.seconds = seconds_since(t0);
  const bool a = res <= 1e-7;
  const bool b = l0 <= 1e-10 && mass_excess <= 0.0 && e0 <= 1e-9;
  const bool c = std::abs(bdy_slope) <= 0.1 && std::abs(en_slope) <= 0.1;
  const bool d = slack >= 0.0;
  r.passed = a && b && c && d;
  r.summary = fmt("(a) residual %.1e (b) |L(0)| %.1e, E(0) rel err %.1e, int L - ||u||^2 <= %.3f "
                  "(c) slopes rho %.3f, energy %.3f (d) min (slack + tol)/tol %.3f",
                  res, l0, e0, mass_excess, bdy_slope, en_slope, slack);
  r.details = {{"v_equation_residual", res}, {"L0", l0}, {"E0_relative_error", e0},
               {"collar_minus_mass", mass_excess}, {"rho_bdy", bdy}, {"rho_energy", en},
               {"rho_bdy_slope", bdy_slope}, {"rho_energy_slope", en_slope}, {"slack_margin", slack}};
  return r;
}

CriterionResult fem_cross() {
  auto r = start(11, "FEM cross-validation");
  const auto t0 = Clock::now();
  const std::vector<double> hs{1.0 / 16, 1.0 / 32, 1.0 / 64};
  const auto conv = convergence_study(DomainSpec::rectangle(1.0, 1.0), 0, hs);
  std::vector<double> errs;
  for (const auto& row : conv) errs.push_back(row.lambda_error);
  const double order = observed_order(hs, errs);
  const double square_ratio = conv.back().ratio_error;  // |ratio_h - 2|
  const auto disk = DomainSpec::disk(1.0);
  const FemSpectrum dsp(disk, make_fem_system(build_mesh(disk, 0.05)), 1);
  const double disk_ratio = dsp.flux(0).l2() / dsp.frequency(0);
  const auto lshape = DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  std::vector<double> lr;
  for (double h : {0.1, 0.05, 0.025}) {
    const FemSpectrum sp(lshape, make_fem_system(build_mesh(lshape, h)), 1);
    lr.push_back(sp.flux(0).l2() / sp.frequency(0));
  }
  const double lchange = std::abs(lr[2] - lr[1]) / lr[1];
  r.seconds = seconds_since(t0);
  r.passed = order >= 1.8 && square_ratio / 2.0 <= 0.03 && std::abs(disk_ratio / std::sqrt(2.0) - 1.0) <= 0.03 &&
             lr.back() > 0.0 && lchange <= 0.05;
  r.summary = fmt("order %.3f, square ratio %.4f, disk ratio %.4f, L-shape ratios %.4f %.4f %.4f (change %.2f%%)",
                  order, 2.0 + square_ratio, disk_ratio, lr[0], lr[1], lr[2], 100 * lchange);
  r.details = {{"observed_order", order}, {"square_ratio_error", square_ratio}, {"disk_ratio", disk_ratio},
               {"lshape_ratios", lr}, {"lshape_change", lchange}};
  return r;
}

CriterionResult determinism(const RunConfig& config, int jobs) {
  auto r = start(12, "determinism");
  const auto t0 = Clock::now();
  const auto a = make_artifacts(config, 1);
  const auto b = make_artifacts(config, std::max(2, jobs));
  std::vector<std::string> differing;
  for (const auto& [name, text] : a)
    if (!b.contains(name) || csv_body(b.at(name)) != csv_body(text)) differing.push_back(name);
  r.seconds = seconds_since(t0);
  r.passed = differing.empty() && a.size() == b.size();
  r.summary = fmt("%zu artifacts, %zu differ between a 1-thread and a %d-thread pass", a.size(), differing.size(),
                  std::max(2, jobs));
  r.details = {{"artifacts", a.size()}, {"differing", differing}};
  return r;
}

}  // namespace

std::string csv_body(const std::string& csv) {
  std::size_t pos = 0;
  while (pos < csv.size() && csv[pos] == '#') {
    const auto nl = csv.find('\n', pos);
    if (nl == std::string::npos) return {};
    pos = nl + 1;
  }
  return csv.substr(pos);
}

Artifacts make_artifacts(const RunConfig& config, int jobs) {
  const auto seed = effective_seed(config);
  const auto grid = parse_grid(config.lambda_grid);
  const double top = std::max(grid.back(), config.ozawa_lambda);
  const auto sp = unit_disk(top + 2.0);
  CsvMeta meta{std::to_string(seed), describe(sp->domain()), config_hash(config)};
  Artifacts out;
  const auto text = [](auto writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
  };
  const auto sweep = ratio_sweep(*sp, grid, config.s_grid, 2.0, jobs);
  out["sweep_upper.csv"] = text([&](std::ostream& os) { write_sweep_csv(os, sweep, meta); });
  const auto lower = ratio_sweep(*sp, grid, {0.2, 3.2}, 2.0, jobs);
  out["sweep_lower.csv"] = text([&](std::ostream& os) { write_sweep_csv(os, lower, meta); });
  const auto proj = projector_bound(*sp, grid, jobs);
  out["projector.csv"] = text([&](std::ostream& os) { write_projector_csv(os, proj, meta); });
  std::vector<HkRow> hk;
  for (double s : config.s_grid) {
    const auto rows = hk_sweep(*sp, grid, s, config.hk_orders, jobs);
    hk.insert(hk.end(), rows.begin(), rows.end());
  }
  out["hk.csv"] = text([&](std::ostream& os) { write_hk_csv(os, hk, meta); });
  std::vector<OzawaRow> oz;
  for (double f : {0.5, 0.75, 1.0}) {
    const double l = f * config.ozawa_lambda;
    const double s = ozawa_sum(*sp, Point(1.0, 0.0), l);
    oz.push_back({l, s, ozawa_prediction(l), s / ozawa_prediction(l)});
  }
  out["ozawa.csv"] = text([&](std::ostream& os) { write_ozawa_csv(os, oz, meta); });
  const auto u = random_cluster(sp, populated_base(*sp, 20.0, 0.0), 0.2, seed);
  const auto profile = layer_profile(u, parse_linear_grid(config.layer_rgrid), jobs);
  out["layer_profile.csv"] = text([&](std::ostream& os) {
    write_comment(os, meta);
    write_profile_csv(os, profile);
  });
  return out;
}

std::vector<CriterionResult> run_acceptance(const RunConfig& config,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  const auto seed = effective_seed(config);
  const int jobs = effective_jobs(config.jobs);
  std::vector<std::function<CriterionResult()>> criteria{
      [] { return disk_ratio_law(); },
      [&] { return rellich_identity(seed); },
      [&] { return perturbation(seed); },
      [&] { return upper_trend(jobs); },
      [&] { return lower_bound(seed, jobs); },
      [] { return counterexample(); },
      [&] { return projector(jobs); },
      [&] { return hk_bounds(jobs); },
      [] { return ozawa(); },
      [&] { return appendix(seed); },
      [] { return fem_cross(); },
      [&] { return determinism(config, jobs); },
  };
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    CriterionResult res;
    try {
      res = criteria[i]();
    } catch (const std::exception& e) {
      res.id = static_cast<int>(i + 1);
      res.title = "criterion " + std::to_string(i + 1);
      res.passed = false;
      res.summary = std::string("error: ") + e.what();
    }
    if (on_result) on_result(res);
    results.push_back(std::move(res));
  }
  return results;
}

nlohmann::json summary_json(const std::vector<CriterionResult>& results) {
  nlohmann::json fail = nlohmann::json::array(), details = nlohmann::json::array();
  for (const auto& r : results) {
    if (!r.passed) fail.push_back(r.id);
    details.push_back({{"id", r.id},
                       {"title", r.title},
                       {"passed", r.passed},
                       {"summary", r.summary},
                       {"measurements", r.details}});
  }
  return {{"pass", fail.empty()}, {"fail", fail}, {"details", details}};
}

std::string format_line(const CriterionResult& r) {
  return fmt("[%s] %2d %s: %s (%.2f s)", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.summary.c_str(),
             r.seconds);
}

}  // namespace specbound
