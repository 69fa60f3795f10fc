#include "specbound/config.hpp"

#include "specbound/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace specbound {
namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw DomainError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw DomainError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get(const nlohmann::json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DomainError(where + ": key '" + key + "' is missing or has the wrong type");
  }
}

template <typename T>
void read(const nlohmann::json& j, const std::string& key, T& out) {
  if (j.contains(key)) out = get<T>(j, key, "config");
}

Point point_from(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw DomainError(what + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

DomainSpec domain_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DomainError("domain: expected an object with 'kind'");
  const auto kind = get<std::string>(j, "kind", "domain");
  if (kind == "disk") {
    check_keys(j, {"kind", "radius", "center"}, "domain");
    const Point c = j.contains("center") ? point_from(j["center"], "center") : Point::Zero();
    return DomainSpec::disk(j.contains("radius") ? get<double>(j, "radius", "domain") : 1.0, c);
  }
  if (kind == "rectangle") {
    check_keys(j, {"kind", "width", "height", "corner"}, "domain");
    const Point c = j.contains("corner") ? point_from(j["corner"], "corner") : Point::Zero();
    return DomainSpec::rectangle(get<double>(j, "width", "domain"), get<double>(j, "height", "domain"), c);
  }
  if (kind == "polygon") {
    check_keys(j, {"kind", "vertices"}, "domain");
    if (!j["vertices"].is_array()) throw DomainError("domain: vertices must be an array");
    std::vector<Point> v;
    for (const auto& p : j["vertices"]) v.push_back(point_from(p, "vertex"));
    return DomainSpec::polygon(std::move(v));
  }
  throw DomainError("domain: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const DomainSpec& d) {
  switch (d.kind()) {
    case DomainKind::disk:
      return {{"kind", "disk"}, {"radius", d.radius()}, {"center", {d.center().x(), d.center().y()}}};
    case DomainKind::rectangle:
      return {{"kind", "rectangle"},
              {"width", d.width()},
              {"height", d.height()},
              {"corner", {d.corner().x(), d.corner().y()}}};
    case DomainKind::polygon: {
      nlohmann::json v = nlohmann::json::array();
      for (const auto& p : d.vertices()) v.push_back({p.x(), p.y()});
      return {{"kind", "polygon"}, {"vertices", v}};
    }
  }
  return {};
}

DomainSpec parse_domain_arg(const std::string& text) {
  if (text == "disk") return DomainSpec::disk(1.0);
  if (text == "square") return DomainSpec::rectangle(1.0, 1.0);
  if (text == "lshape") return DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  nlohmann::json j;
  if (!text.empty() && text.front() == '{') {
    j = nlohmann::json::parse(text, nullptr, false);
  } else {
    std::ifstream in(text);
    if (!in) throw DomainError("domain: '" + text + "' is neither a known name, JSON, nor a readable file");
    j = nlohmann::json::parse(in, nullptr, false);
  }
  if (j.is_discarded()) throw DomainError("domain: invalid JSON");
  return domain_from_json(j);
}

std::string describe(const DomainSpec& d) {
  std::ostringstream os;
  os << std::setprecision(6);
  switch (d.kind()) {
    case DomainKind::disk:
      os << "disk(r=" << d.radius() << ")";
      break;
    case DomainKind::rectangle:
      os << "rectangle(" << d.width() << "x" << d.height() << ")";
      break;
    case DomainKind::polygon:
      os << "polygon(" << d.vertices().size() << " vertices)";
      break;
  }
  return os.str();
}

RunConfig config_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"seed", "jobs", "output_dir", "domain", "spectrum", "lambda_grid", "s_grid", "hk_orders", "ozawa",
              "layer"},
             "config");
  RunConfig c;
  read(j, "seed", c.seed);
  read(j, "jobs", c.jobs);
  read(j, "output_dir", c.output_dir);
  if (j.contains("domain")) {
    c.domain = to_json(domain_from_json(j["domain"]));  // canonical form
  }
  if (j.contains("spectrum")) {
    const auto& s = j["spectrum"];
    check_keys(s, {"source", "h"}, "spectrum");
    if (s.contains("source")) c.source = get<std::string>(s, "source", "spectrum");
    if (s.contains("h")) c.fem_h = get<double>(s, "h", "spectrum");
  }
  read(j, "lambda_grid", c.lambda_grid);
  read(j, "s_grid", c.s_grid);
  read(j, "hk_orders", c.hk_orders);
  if (j.contains("ozawa")) {
    const auto& o = j["ozawa"];
    check_keys(o, {"lambda", "points", "band"}, "ozawa");
    if (o.contains("lambda")) c.ozawa_lambda = get<double>(o, "lambda", "ozawa");
    if (o.contains("points")) c.ozawa_points = get<int>(o, "points", "ozawa");
    if (o.contains("band")) c.ozawa_band = get<double>(o, "band", "ozawa");
  }
  if (j.contains("layer")) {
    const auto& l = j["layer"];
    check_keys(l, {"rgrid"}, "layer");
    if (l.contains("rgrid")) c.layer_rgrid = get<std::string>(l, "rgrid", "layer");
  }
  if (c.source != "analytic" && c.source != "fem") throw DomainError("spectrum: source must be analytic or fem");
  if (c.jobs < 0) throw DomainError("config: jobs must be >= 0");
  if (!(c.fem_h > 0.0)) throw DomainError("spectrum: h must be positive");
  if (c.ozawa_points < 1 || !(c.ozawa_band > 0.0)) throw DomainError("ozawa: need points >= 1 and band > 0");
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"jobs", c.jobs},
          {"output_dir", c.output_dir},
          {"domain", c.domain},
          {"spectrum", {{"source", c.source}, {"h", c.fem_h}}},
          {"lambda_grid", c.lambda_grid},
          {"s_grid", c.s_grid},
          {"hk_orders", c.hk_orders},
          {"ozawa", {{"lambda", c.ozawa_lambda}, {"points", c.ozawa_points}, {"band", c.ozawa_band}}},
          {"layer", {{"rgrid", c.layer_rgrid}}}};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot read '" + path + "'");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DomainError("config: '" + path + "' is not valid JSON");
  return config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  // jobs and output_dir do not change any result
  auto j = to_json(c);
  j.erase("jobs");
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::uint64_t effective_seed(const RunConfig& c) {
  const char* env = std::getenv("CLUSTER_RELLICH_SEED");
  if (env == nullptr || *env == '\0') return c.seed;
  char* end = nullptr;
  const auto v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw DomainError("CLUSTER_RELLICH_SEED must be an unsigned integer");
  return v;
}

int effective_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace specbound
