#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "specbound/config.hpp"
#include "specbound/errors.hpp"

#include <cstdlib>

using namespace specbound;

TEST_CASE("shipped default config matches the built-in defaults") {
  const auto c = load_config(SPECBOUND_DEFAULT_CONFIG);
  CHECK(to_json(c) == to_json(RunConfig{}));
  CHECK(config_hash(c) == config_hash(RunConfig{}));
  CHECK(config_from_json(to_json(c)).lambda_grid == c.lambda_grid);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("hash ignores jobs and output_dir only") {
  RunConfig a, b;
  b.jobs = 7;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = a.seed + 1;
  CHECK(config_hash(a) != config_hash(b));
  RunConfig d;
  d.s_grid = {0.05, 0.2};
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("config validation") {
  using nlohmann::json;
  CHECK_THROWS_AS(config_from_json(json{{"sed", 1}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"seed", "x"}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"spectrum", {{"source", "spectral"}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"spectrum", {{"h", -0.1}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"domain", {{"kind", "ellipse"}}}}), DomainError);
  CHECK_THROWS_AS(config_from_json(json{{"ozawa", {{"points", 0}}}}), DomainError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), DomainError);
  const auto c = config_from_json(json{{"seed", 5}, {"layer", {{"rgrid", "0:0.3:10"}}}});
  CHECK(c.seed == 5);
  CHECK(c.layer_rgrid == "0:0.3:10");
  CHECK(c.lambda_grid == RunConfig{}.lambda_grid);
}

TEST_CASE("seed environment override") {
  RunConfig c;
  c.seed = 11;
  ::unsetenv("CLUSTER_RELLICH_SEED");
  CHECK(effective_seed(c) == 11);
  ::setenv("CLUSTER_RELLICH_SEED", "42", 1);
  CHECK(effective_seed(c) == 42);
  ::setenv("CLUSTER_RELLICH_SEED", "4x", 1);
  CHECK_THROWS_AS(effective_seed(c), DomainError);
  ::unsetenv("CLUSTER_RELLICH_SEED");
  CHECK(effective_jobs(3) == 3);
  CHECK(effective_jobs(0) >= 1);
}

TEST_CASE("domain arguments") {
  CHECK(parse_domain_arg("disk").kind() == DomainKind::disk);
  const auto sq = parse_domain_arg("square");
  CHECK(sq.area() == doctest::Approx(1.0));
  const auto l = parse_domain_arg("lshape");
  CHECK(l.area() == doctest::Approx(3.0));
  const auto r = parse_domain_arg(R"({"kind": "rectangle", "width": 2, "height": 0.5})");
  CHECK(r.width() == 2.0);
  CHECK(describe(r) == "rectangle(2x0.5)");
  const auto round = parse_domain_arg(to_json(l).dump());
  CHECK(round.vertices().size() == 6);
  CHECK_THROWS_AS(parse_domain_arg("{not json"), DomainError);
  CHECK_THROWS_AS(parse_domain_arg("no-such-file.json"), DomainError);
}
