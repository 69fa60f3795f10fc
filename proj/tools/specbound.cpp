// specbound: command-line front end. Each subcommand writes CSV or JSON
// artifacts into --out and encodes its verification outcome in the exit code
// (0 pass, 1 verification failure, 2 usage, 3 invalid input or numerics).

#include "specbound/acceptance.hpp"
#include "specbound/boundary_layer.hpp"
#include "specbound/bounds_lab.hpp"
#include "specbound/cluster.hpp"
#include "specbound/config.hpp"
#include "specbound/errors.hpp"
#include "specbound/fem_spectrum.hpp"
#include "specbound/rellich.hpp"
#include "specbound/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace specbound;

namespace {

constexpr int exit_fail = 1;
constexpr int exit_usage = 2;
constexpr int exit_invalid = 3;

struct Common {
  std::string config_path;
  std::optional<int> jobs;
  RunConfig config;
};

struct Options {
  std::string domain;
  std::string out = ".";
  double below = 20.0;
  bool fem = false;
  std::optional<double> h;
  double lambda = 20.0;
  double s = 0.2;
  std::optional<std::uint64_t> seed;
  std::string lambda_grid;
  std::vector<double> s_grid;
  std::vector<double> ks;
  int n = 0;
  int k = 1;
  std::optional<int> points;
  std::optional<double> band;
  std::string rgrid;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

// Applies the flags shared by several subcommands to the config so that the
// hash reflects every input of the run.
void apply(RunConfig& c, const Options& o) {
  if (!o.domain.empty()) c.domain = to_json(parse_domain_arg(o.domain));
  if (o.fem) c.source = "fem";
  if (o.h) {
    require(*o.h > 0.0 && std::isfinite(*o.h), "--h must be positive");
    c.fem_h = *o.h;
  }
  if (!o.lambda_grid.empty()) c.lambda_grid = o.lambda_grid;
  if (!o.s_grid.empty()) c.s_grid = o.s_grid;
  if (!o.ks.empty()) c.hk_orders = o.ks;
  if (!o.rgrid.empty()) c.layer_rgrid = o.rgrid;
  if (o.points) c.ozawa_points = *o.points;
  if (o.band) c.ozawa_band = *o.band;
  c.seed = o.seed ? *o.seed : effective_seed(c);
  for (double s : c.s_grid) require(s > 0.0 && std::isfinite(s), "--s-grid entries must be positive");
  require(c.ozawa_points >= 1, "--points must be >= 1");
  require(c.ozawa_band > 0.0, "--band must be positive");
}

// Config hash extended by the subcommand parameters that are not config keys.
std::string run_hash(const RunConfig& c, const nlohmann::json& params) {
  return fnv1a_hex(config_hash(c) + params.dump());
}

CsvMeta meta_for(const RunConfig& c, const std::string& hash) {
  return {std::to_string(c.seed), describe(domain_from_json(c.domain)), hash};
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const auto path = fs::path(dir) / name;
  std::ofstream os(path);
  if (!os) throw DomainError("cannot write '" + path.string() + "'");
  return os;
}

void write_json(const std::string& dir, const std::string& name, const nlohmann::json& j) {
  auto os = open_out(dir, name);
  os << j.dump(2) << '\n';
}

std::shared_ptr<const Spectrum> build_spectrum(const RunConfig& c, double cutoff) {
  const auto domain = domain_from_json(c.domain);
  if (c.source == "analytic") return std::make_shared<const AnalyticSpectrum>(domain, cutoff);
  auto system = make_fem_system(build_mesh(domain, c.fem_h));
  const int count = static_cast<int>(std::ceil(1.2 * std::max(0.0, weyl_count(domain, cutoff)))) + 20;
  return std::make_shared<const FemSpectrum>(domain, std::move(system), count);
}

// Refuses empty windows; a zero cluster satisfies every check vacuously.
void require_members(const SpectralCluster& u) {
  if (!u.empty()) return;
  const auto& sp = *u.spectrum;
  for (std::size_t i = 0; i < sp.size(); ++i)
    if (sp.frequency(i) >= u.lambda)
      throw DomainError("window [" + format_double(u.lambda) + ", " + format_double(u.lambda + u.s) +
                        ") holds no eigenfrequency; the next one is " + format_double(sp.frequency(i)));
  throw DomainError("window holds no eigenfrequency");
}

std::shared_ptr<const AnalyticSpectrum> analytic_disk(const RunConfig& c, double cutoff, const char* what) {
  const auto domain = domain_from_json(c.domain);
  if (c.source != "analytic" || domain.kind() != DomainKind::disk)
    throw UnsupportedError(std::string(what) + " needs the analytic spectrum of a disk");
  return std::make_shared<const AnalyticSpectrum>(domain, cutoff);
}

int cmd_spectrum(Common& g, const Options& o) {
  auto& c = g.config;
  apply(c, o);
  require(o.below > 0.0 && std::isfinite(o.below), "--below must be positive");
  const auto sp = build_spectrum(c, o.below);
  auto os = open_out(o.out, "spectrum.csv");
  write_comment(os, meta_for(c, run_hash(c, {{"below", o.below}})));
  std::size_t count = 0;
  if (const auto* a = dynamic_cast<const AnalyticSpectrum*>(sp.get())) {
    write_spectrum_csv(os, a->pairs());
    count = a->size();
  } else {
    const auto& f = dynamic_cast<const FemSpectrum&>(*sp);
    std::vector<DiscreteEigenPair> pairs;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f.frequency(i) < o.below) pairs.push_back(f.pair(i));
    write_fem_spectrum_csv(os, pairs);
    count = pairs.size();
  }
  std::cout << count << " eigenpairs below " << format_double(o.below) << '\n';
  return 0;
}

int cmd_rellich(Common& g, const Options& o) {
  auto& c = g.config;
  apply(c, o);
  require(o.lambda > 0.0 && o.s > 0.0, "--lambda and --s must be positive");
  const auto sp = build_spectrum(c, o.lambda + o.s + 1.0);
  const auto u = random_cluster(sp, o.lambda, o.s, c.seed);
  require_members(u);
  const auto report = rellich_check(u);
  const bool passed = report.valid && report.residual <= report.tolerance;
  auto j = to_json(report);
  j["passed"] = passed;
  j["members"] = u.members.size();
  j["lambda"] = o.lambda;
  j["s"] = o.s;
  j["seed"] = c.seed;
  j["config_hash"] = run_hash(c, {{"lambda", o.lambda}, {"s", o.s}});
  write_json(o.out, "rellich.json", j);
  std::cout << "residual " << format_double(report.residual) << " tolerance " << format_double(report.tolerance)
            << (passed ? " pass\n" : " FAIL\n");
  return passed ? 0 : exit_fail;
}

int cmd_sweep(Common& g, const Options& o, const std::string& which) {
  auto& c = g.config;
  apply(c, o);
  const int jobs = effective_jobs(g.jobs.value_or(c.jobs));
  const auto grid = parse_grid(c.lambda_grid);
  const double s_top = *std::max_element(c.s_grid.begin(), c.s_grid.end());
  const auto meta = meta_for(c, config_hash(c));
  if (which == "hk") {
    const auto sp = analytic_disk(c, grid.back() + s_top + 1.0, "hk");
    std::vector<HkRow> rows;
    for (double s : c.s_grid) {
      const auto part = hk_sweep(*sp, grid, s, c.hk_orders, jobs);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    auto os = open_out(o.out, "hk.csv");
    write_hk_csv(os, rows, meta);
    std::cout << rows.size() << " rows\n";
    return 0;
  }
  if (which == "projector") {
    const auto sp = build_spectrum(c, grid.back() + 1.0);
    const auto rows = projector_bound(*sp, grid, jobs);
    auto os = open_out(o.out, "projector.csv");
    write_projector_csv(os, rows, meta);
    std::cout << rows.size() << " rows\n";
    return 0;
  }
  const auto sp = build_spectrum(c, grid.back() + s_top + 1.0);
  const auto& domain = sp->domain();
  const double r_m = multiplier_radius(domain, domain.centroid());
  const auto rows = ratio_sweep(*sp, grid, c.s_grid, r_m, jobs);
  auto os = open_out(o.out, which == "sweep-upper" ? "sweep_upper.csv" : "sweep_lower.csv");
  write_sweep_csv(os, rows, meta);
  std::cout << rows.size() << " cells, R_M = " << format_double(r_m) << '\n';
  return 0;
}

int cmd_counterexample(Common& g, const Options& o) {
  require(o.n >= 0 && o.k >= 1, "need --n >= 0 and --k >= 1");
  const auto [u, rep] = counterexample_disk(o.n, o.k);
  const bool passed = rep.ratio <= 1e-8;
  nlohmann::json report{{"n", rep.n},         {"k", rep.k},         {"lambda", rep.lambda},
                        {"s_star", rep.s_star}, {"alpha", rep.alpha}, {"beta", rep.beta},
                        {"trace_norm", rep.trace_norm}, {"u_norm", rep.u_norm}, {"ratio", rep.ratio},
                        {"passed", passed}};
  write_json(o.out, "counterexample.json",
             {{"cluster", to_json(u)},
              {"report", report},
              {"config_hash", run_hash(g.config, {{"n", o.n}, {"k", o.k}})}});
  std::cout << "s_star " << format_double(rep.s_star) << " ratio " << format_double(rep.ratio)
            << (passed ? " pass\n" : " FAIL\n");
  return passed ? 0 : exit_fail;
}

int cmd_ozawa(Common& g, const Options& o) {
  auto& c = g.config;
  apply(c, o);
  require(o.lambda > 0.0, "--lambda must be positive");
  const auto sp = analytic_disk(c, o.lambda + 1.0, "ozawa");
  const auto& d = sp->domain();
  const double pred = ozawa_prediction(o.lambda);
  auto os = open_out(o.out, "ozawa.csv");
  write_comment(os, meta_for(c, run_hash(c, {{"lambda", o.lambda}})));
  os << "theta,lambda,sum,prediction,ratio\n";
  bool passed = true;
  double worst = 0.0;
  for (int i = 0; i < c.ozawa_points; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / c.ozawa_points;
    const Point y = d.center() + d.radius() * Point(std::cos(theta), std::sin(theta));
    const double sum = ozawa_sum(*sp, y, o.lambda);
    const double ratio = sum / pred;
    worst = std::max(worst, std::abs(ratio - 1.0));
    passed = passed && std::abs(ratio - 1.0) <= c.ozawa_band;
    os << format_double(theta) << ',' << format_double(o.lambda) << ',' << format_double(sum) << ','
       << format_double(pred) << ',' << format_double(ratio) << '\n';
  }
  std::cout << "max |ratio - 1| = " << format_double(worst) << " band " << format_double(c.ozawa_band)
            << (passed ? " pass\n" : " FAIL\n");
  return passed ? 0 : exit_fail;
}

int cmd_layer(Common& g, const Options& o) {
  auto& c = g.config;
  apply(c, o);
  require(o.lambda > 0.0 && o.s > 0.0, "--lambda and --s must be positive");
  const int jobs = effective_jobs(g.jobs.value_or(c.jobs));
  const auto sp = analytic_disk(c, o.lambda + o.s + 1.0, "layer");
  const auto u = random_cluster(sp, o.lambda, o.s, c.seed);
  require_members(u);
  const auto profile = layer_profile(u, parse_linear_grid(c.layer_rgrid), jobs);
  const auto hash = run_hash(c, {{"lambda", o.lambda}, {"s", o.s}});
  {
    auto os = open_out(o.out, "layer_profile.csv");
    write_comment(os, meta_for(c, hash));
    write_profile_csv(os, profile);
  }
  auto j = to_json(profile);
  j["seed"] = c.seed;
  j["members"] = u.members.size();
  j["config_hash"] = hash;
  write_json(o.out, "layer_report.json", j);
  std::cout << u.members.size() << " members, min slack " << format_double(profile.diff.min_slack)
            << (profile.diff.passed ? " pass\n" : " FAIL\n");
  return profile.diff.passed ? 0 : exit_fail;
}

int cmd_verify_all(Common& g, const std::string& out) {
  auto c = g.config;
  if (g.jobs) c.jobs = *g.jobs;
  const std::string dir = out.empty() ? c.output_dir : out;
  const auto results = run_acceptance(c, [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; });
  for (const auto& [name, text] : make_artifacts(c, effective_jobs(c.jobs))) {
    auto os = open_out(dir, name);
    os << text;
  }
  auto summary = summary_json(results);
  summary["config_hash"] = config_hash(c);
  summary["seed"] = effective_seed(c);
  write_json(dir, "summary.json", summary);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return summary["pass"].get<bool>() ? 0 : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral cluster boundary bounds laboratory"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h is the mesh size
  Common g;
  app.add_option("--config", g.config_path, "Run configuration (JSON)");
  app.add_option("--jobs", g.jobs, "Worker threads (default: available cores)");

  Options o;
  std::string verify_out;
  const auto add_domain = [&](CLI::App* sub) {
    sub->add_option("--domain", o.domain, "disk, square, lshape, inline JSON or a JSON file");
  };
  const auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output directory"); };
  const auto add_fem = [&](CLI::App* sub) {
    sub->add_flag("--fem", o.fem, "Use P1 finite elements");
    sub->add_option("--h", o.h, "Mesh size");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigenpairs below a frequency");
  add_domain(spectrum);
  spectrum->add_option("--below", o.below, "Frequency cutoff")->required();
  add_fem(spectrum);
  add_out(spectrum);

  auto* rellich = app.add_subcommand("rellich", "Rellich identity on a random cluster");
  add_domain(rellich);
  rellich->add_option("--lambda", o.lambda, "Window start");
  rellich->add_option("--s", o.s, "Window width");
  rellich->add_option("--seed", o.seed, "Seed (overrides env and config)");
  add_fem(rellich);
  add_out(rellich);

  std::vector<std::pair<std::string, CLI::App*>> sweeps;
  for (const char* name : {"sweep-upper", "sweep-lower", "projector", "hk"}) {
    auto* sub = app.add_subcommand(name, "Ratio sweep over a frequency grid");
    add_domain(sub);
    sub->add_option("--lambda-grid", o.lambda_grid, "a:b:n, log-spaced");
    sub->add_option("--s-grid", o.s_grid, "Window widths")->delimiter(',');
    if (std::string(name) == "hk") sub->add_option("--k", o.ks, "Sobolev orders")->delimiter(',');
    add_fem(sub);
    add_out(sub);
    sweeps.emplace_back(name, sub);
  }

  auto* counter = app.add_subcommand("counterexample", "Two-mode disk cluster with vanishing normal derivative");
  counter->add_option("--n", o.n, "Angular index");
  counter->add_option("--k", o.k, "Radial index of the lower mode");
  add_out(counter);

  auto* ozawa = app.add_subcommand("ozawa", "Pointwise boundary sum on the disk");
  ozawa->add_option("--lambda", o.lambda, "Frequency");
  ozawa->add_option("--points", o.points, "Boundary points");
  ozawa->add_option("--band", o.band, "Allowed |ratio - 1|");
  add_domain(ozawa);
  add_out(ozawa);

  auto* layer = app.add_subcommand("layer", "Boundary layer profile on the unit disk");
  layer->add_option("--lambda", o.lambda, "Window start");
  layer->add_option("--s", o.s, "Window width");
  layer->add_option("--seed", o.seed, "Seed (overrides env and config)");
  layer->add_option("--rgrid", o.rgrid, "a:b:n, uniform");
  add_out(layer);

  auto* verify = app.add_subcommand("verify-all", "Run the acceptance criteria and write all artifacts");
  verify->add_option("--config", g.config_path, "Run configuration (JSON)");
  verify->add_option("--out", verify_out, "Output directory (default: config output_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (!g.config_path.empty()) g.config = load_config(g.config_path);
    if (g.jobs && *g.jobs < 0) throw DomainError("--jobs must be >= 0");
    if (*spectrum) return cmd_spectrum(g, o);
    if (*rellich) return cmd_rellich(g, o);
    for (const auto& [name, sub] : sweeps)
      if (*sub) return cmd_sweep(g, o, name);
    if (*counter) return cmd_counterexample(g, o);
    if (*ozawa) return cmd_ozawa(g, o);
    if (*layer) return cmd_layer(g, o);
    if (*verify) return cmd_verify_all(g, verify_out);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return exit_invalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_invalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return exit_usage;
}
