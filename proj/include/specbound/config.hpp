#ifndef SPECBOUND_CONFIG_HPP
#define SPECBOUND_CONFIG_HPP

// Run configuration shared by the command-line tool and the acceptance
// runner. A run is a pure function of its RunConfig.

#include "specbound/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace specbound {

struct RunConfig {
  std::uint64_t seed = 20240611;
  int jobs = 0;  // 0: hardware concurrency
  std::string output_dir = "specbound-out";
  nlohmann::json domain = {{"kind", "disk"}, {"radius", 1.0}, {"center", {0.0, 0.0}}};
  std::string source = "analytic";  // analytic | fem
  double fem_h = 0.05;
  std::string lambda_grid = "5:40:10";
  std::vector<double> s_grid{0.05, 0.2, 1.0};
  std::vector<double> hk_orders{0.0, 0.5, 1.0, 2.0};
  double ozawa_lambda = 60.0;
  int ozawa_points = 8;
  double ozawa_band = 0.15;
  std::string layer_rgrid = "0:0.333:400";
};

/// Throws DomainError on unknown keys or ill-typed values.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);
std::string fnv1a_hex(const std::string& text);

/// CLUSTER_RELLICH_SEED overrides the configured seed when set.
std::uint64_t effective_seed(const RunConfig& c);

/// Thread count after resolving 0 to the hardware concurrency.
int effective_jobs(int jobs);

/// {"kind": "disk", "radius", "center"}, {"kind": "rectangle", "width",
/// "height", "corner"} or {"kind": "polygon", "vertices": [[x, y], ...]}.
DomainSpec domain_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DomainSpec& d);

/// Accepts inline JSON, a path to a JSON file, or one of the names
/// disk, square, lshape.
DomainSpec parse_domain_arg(const std::string& text);

/// Short stable description for CSV headers, e.g. "disk(r=1)".
std::string describe(const DomainSpec& d);

}  // namespace specbound

#endif  // SPECBOUND_CONFIG_HPP
