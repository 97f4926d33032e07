#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "polykron/errors.hpp"
#include "polykron/experiments.hpp"
#include "polykron/surface_io.hpp"

using namespace polykron;

namespace {

std::string temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "polykron_io_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("grid surface spec loads") {
  auto l = surface_from_json(R"({"grid": [[1, 1], [1, 0]]})");
  CHECK(l.size() == 3);
  CHECK(l.singular_class_count() == 1);

  auto t = surface_from_json(R"({"grid": [[1]]})");
  CHECK(t.size() == 1);
}

TEST_CASE("explicit surface spec loads and round trips") {
  auto s = surface_from_json(R"({"squares": 2, "h_gluings": [1, 0], "v_gluings": [0, 1]})");
  CHECK(s.size() == 2);
  auto again = surface_from_json(surface_to_json(s));
  CHECK(again.right_gluings() == s.right_gluings());
  CHECK(again.top_gluings() == s.top_gluings());
}

TEST_CASE("surface spec rejections name the offending field") {
  CHECK_THROWS_WITH_AS(surface_from_json(R"({"grid": [[1]], "extra": 1})"),
                       doctest::Contains("extra"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"grid": [[2]]})"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"grid": [[0, 0]]})"), ConfigError);
  CHECK_THROWS_AS(surface_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"squares": 2, "h_gluings": [1, 0]})"), ConfigError);
  CHECK_THROWS_AS(surface_from_json(R"({"grid": [[1]], "squares": 1})"), ConfigError);
  CHECK_THROWS_AS(surface_from_file("/nonexistent/file.json"), ConfigError);
  // Invalid gluings surface the construction error.
  CHECK_THROWS_AS(surface_from_json(R"({"squares": 2, "h_gluings": [1, 1], "v_gluings": [0, 1]})"),
                  NotAMatchingError);
}

TEST_CASE("experiment config parses seeds, starts, horizons and boxes") {
  const std::string text = R"({
    "surface": {"grid": [[1, 1], [1, 0]]},
    "step": {"seeds": [2, 3], "mod1": true},
    "start": {"square": 0, "x": 0.2, "y": 0.3},
    "J": 1000,
    "test_sets": [{"square": 0, "box": [0.1, 0.4, 0.2, 0.5]}],
    "checkpoints": [100, 1000],
    "height": 30
  })";
  auto cfg = config_from_json(text);
  CHECK(cfg.surface.size() == 3);
  CHECK(cfg.step.v.v1 == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(cfg.step.certificate.kronecker());
  CHECK(cfg.step.certificate.height == 30);
  CHECK(cfg.has_J);
  CHECK(cfg.J == 1000);
  CHECK(!cfg.manifold);
  REQUIRE(cfg.starts.size() == 1);
  REQUIRE(cfg.test_sets.size() == 1);
  CHECK(cfg.test_sets[0].measure() == doctest::Approx(0.09));
}

TEST_CASE("decimal step strings are parsed verbatim") {
  const std::string text = R"({
    "surface": {"grid": [[1]]},
    "step": {"v": ["0.41421356237309515", "0.7320508075688772"], "mod1": false},
    "height": 10
  })";
  auto cfg = config_from_json(text);
  CHECK(cfg.step.v.v1 == std::strtod("0.41421356237309515", nullptr));
  CHECK(cfg.step.v.v2 == std::strtod("0.7320508075688772", nullptr));
}

TEST_CASE("config rejections") {
  const std::string base = R"({"surface": {"grid": [[1]]}, "step": {"seeds": [2, 3]}, "height": 10)";
  CHECK_THROWS_WITH_AS(config_from_json(base + R"(, "J": 10, "T": 5.0})"),
                       doctest::Contains("J"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(base + R"(, "typo": 1})"), doctest::Contains("typo"),
                       ConfigError);
  CHECK_THROWS_AS(config_from_json(base + R"(, "test_sets": [{"square": 0, "box": [0.5, 0.5, 0, 1]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(base + R"(, "start": {"square": 7, "x": 0.1, "y": 0.1}, "J": 5})"),
                  IndexOutOfRangeError);
  CHECK_THROWS_AS(
      config_from_json(R"({"surface": {"grid": [[1]]}, "step": {"seeds": [2]}, "height": 5})"),
      ConfigError);
  CHECK_THROWS_AS(
      config_from_json(R"({"surface": {"file": "/missing.json"}, "step": {"seeds": [2, 3]}})"),
      ConfigError);
}

TEST_CASE("a start with z marks the run as a manifold experiment") {
  const std::string text = R"({
    "surface": {"grid": [[1]]},
    "step": {"seeds": [2, 3, 5]},
    "start": {"square": 0, "x": 0.2, "y": 0.3, "z": 0.9},
    "J": 10,
    "height": 20
  })";
  auto cfg = config_from_json(text);
  CHECK(cfg.manifold);
  CHECK(cfg.step.has_w3);
  CHECK(cfg.starts[0].z == 0.9);
}

TEST_CASE("orbit csv and sidecar are written") {
  const std::string dir = temp_dir();
  const std::string text = R"({
    "surface": {"grid": [[1]]},
    "step": {"seeds": [2, 3]},
    "start": {"square": 0, "x": 0.25, "y": 0.5},
    "J": 50,
    "height": 20
  })";
  auto cfg = config_from_json(text);
  auto run = run_orbit(cfg);
  const std::string csv = dir + "/orbit.csv";
  write_orbit_csv(csv, run);

  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,square,x,y");
  long rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 50);

  std::ifstream meta(csv + ".meta.json");
  REQUIRE(meta.good());
  std::string all((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
  CHECK(all.find("\"termination\"") != std::string::npos);
  CHECK(all.find("completed") != std::string::npos);
}

TEST_CASE("reports embed the certification height and tolerances") {
  auto cfg = config_from_json(R"({
    "surface": {"grid": [[1]]},
    "step": {"seeds": [2, 3]},
    "start": {"square": 0, "x": 0.25, "y": 0.5},
    "J": 100,
    "height": 25
  })");
  auto run = run_orbit(cfg);
  auto text = uniformity_to_json(run.report, cfg.step);
  CHECK(text.find("\"height\": 25") != std::string::npos);
  CHECK(text.find("tolerances") != std::string::npos);
  CHECK(text.find("1e-12") != std::string::npos);
}

TEST_CASE("stepup z-marginal equidistributes at J = 1e6") {
  ExperimentConfig cfg;
  cfg.surface = surface_from_json(R"({"grid": [[1, 1], [1, 0]]})");
  std::vector<double> comps{std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, std::sqrt(5.0) - 2.0};
  cfg.step.v = {comps[0], comps[1]};
  cfg.step.w3 = comps[2];
  cfg.step.has_w3 = true;
  cfg.step.source = "seeds [2,3,5] mod 1";
  cfg.step.certificate = certify_kronecker(comps, 100);
  cfg.starts.push_back(ManifoldPoint{{1, 0.4, 0.9}, 0.17});
  cfg.manifold = true;
  cfg.has_J = true;
  cfg.J = 1000000;
  auto run = run_stepup(cfg);
  CHECK(run.z_marginal_deviation < 0.01);
  CHECK(run.base_projection_equal);
}
