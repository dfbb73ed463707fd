#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "enclosure/config.hpp"
#include "json.hpp"

using namespace enclosure;
using nlohmann::json;

namespace {
json s1_json() {
  json j;
  j["obstacle"] = {{"kind", "sphere"},
                   {"center", {0.0, 0.0, 0.0}},
                   {"radius", 1.0}};
  j["source"] = {{"center", {4.0, 0.0, 0.0}}, {"radius", 0.5}};
  j["receiver"] = {{"center", {0.0, 4.0, 0.0}}, {"radius", 0.5}};
  j["tau"] = {{"min", 8.0}, {"max", 40.0}, {"count", 16}, {"log", true}};
  j["mode"] = "semianalytic";
  j["shift"] = 0.15;
  j["shift2"] = 0.3;
  j["seed"] = 42;
  return j;
}
}  // namespace

TEST_CASE("run config round trip is canonical and validates") {
  const json j = s1_json();
  RunConfig cfg = run_config_from_json(j, ".");
  cfg.validate();
  CHECK(cfg.mode == DataMode::semianalytic);
  CHECK(cfg.obstacle.has_value());
  CHECK(cfg.source.center.x() == 4.0);
  CHECK(cfg.receiver.radius == 0.5);
  CHECK(cfg.taus.count == 16);
  CHECK(cfg.shift == 0.15);
  CHECK(cfg.seed == 42);

  const json echo = run_config_to_json(cfg);
  RunConfig cfg2 = run_config_from_json(echo, ".");
  CHECK(canonical_dump(run_config_to_json(cfg2)) == canonical_dump(echo));
}

TEST_CASE("tau grid spacing") {
  TauGrid g;
  g.tau_min = 4.0;
  g.tau_max = 16.0;
  g.count = 5;
  g.log_spaced = true;
  const auto v = g.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == doctest::Approx(4.0));
  CHECK(v.back() == doctest::Approx(16.0));
  CHECK(v[1] / v[0] == doctest::Approx(v[3] / v[2]).epsilon(1e-12));
  g.log_spaced = false;
  const auto lin = g.values();
  CHECK(lin[2] - lin[1] == doctest::Approx(lin[1] - lin[0]).epsilon(1e-12));
}

TEST_CASE("obstacle json round trip for all kinds") {
  const json sphere = {{"kind", "sphere"},
                       {"center", {1.0, 2.0, 3.0}},
                       {"radius", 0.75}};
  const ObstacleShape s = obstacle_from_json(sphere, ".");
  CHECK(s.kind() == ObstacleKind::sphere);
  CHECK(s.center().z() == 3.0);

  const double ca = std::cos(0.5), sa = std::sin(0.5);
  const json ell = {{"kind", "ellipsoid"},
                    {"center", {0.0, 0.0, 0.0}},
                    {"semiaxes", {2.0, 1.0, 0.5}},
                    {"orientation",
                     {{ca, -sa, 0.0}, {sa, ca, 0.0}, {0.0, 0.0, 1.0}}}};
  const ObstacleShape e = obstacle_from_json(ell, ".");
  CHECK(e.kind() == ObstacleKind::ellipsoid);
  const json echo = obstacle_to_json(e);
  const ObstacleShape e2 = obstacle_from_json(echo, ".");
  CHECK((e2.orientation() - e.orientation()).norm() < 1e-12);
  CHECK((e2.semiaxes() - e.semiaxes()).norm() == 0.0);
}

TEST_CASE("validation failures name the violated hypothesis") {
  json j = s1_json();
  // source and receiver balls overlapping each other: gap reported
  j["receiver"] = {{"center", {3.5, 0.5, 0.0}}, {"radius", 0.5}};
  RunConfig bad = run_config_from_json(j, ".");
  try {
    bad.validate();
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("gap") != std::string::npos);
  }

  // hull condition: obstacle crossing the source-receiver segment
  json j2 = s1_json();
  j2["obstacle"]["center"] = {2.0, 2.0, 0.0};
  RunConfig bad2 = run_config_from_json(j2, ".");
  try {
    bad2.validate();
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hull") != std::string::npos);
  }

  // shift outside [0, receiver radius)
  json j3 = s1_json();
  j3["shift"] = 0.6;
  RunConfig bad3 = run_config_from_json(j3, ".");
  CHECK_THROWS_AS(bad3.validate(), PreconditionError);
}

TEST_CASE("config file loading and canonical hashing") {
  const json j = s1_json();
  const std::string path = "test_config_tmp.json";
  write_text_file(path, j.dump(2));
  const RunConfig cfg = load_run_config(path);
  CHECK(cfg.obstacle.has_value());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_run_config("does_not_exist.json"), PreconditionError);

  const std::string h1 = content_hash_hex(canonical_dump(j));
  CHECK(content_hash_hex(canonical_dump(j)) == h1);
  json j2 = j;
  j2["seed"] = 43;
  CHECK(content_hash_hex(canonical_dump(j2)) != h1);
  CHECK(h1.size() >= 16);
}

TEST_CASE("canonical dump sorts keys and is stable") {
  json a;
  a["zeta"] = 1;
  a["alpha"] = 2;
  json b;
  b["alpha"] = 2;
  b["zeta"] = 1;
  CHECK(canonical_dump(a) == canonical_dump(b));
  CHECK(canonical_dump(a).find("alpha") < canonical_dump(a).find("zeta"));
}
