#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geogap/io.hpp"
#include "geogap/scenario.hpp"

using geogap::ConfigError;
using geogap::IOError;
using geogap::scenario::Scenario;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& stem) {
  return std::string("/tmp/geogap_test_") + stem;
}

std::string slurp_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("csv writer emits the pinned dialect") {
  const auto path = temp_path("dialect.csv");
  {
    geogap::io::CsvWriter w(path, {"x", "y", "value"});
    w.row({1.0, -0.5, 0.1});
    w.row({2.0, std::nullopt, 1e-300});
    w.close();
  }
  const auto text = slurp_binary(path);

  SECTION("LF endings only, header first") {
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.substr(0, 10) == "x,y,value\n");
    CHECK(text.back() == '\n');
  }

  SECTION("unavailable cells are empty, not NaN") {
    CHECK(text.find("2,,") != std::string::npos);
    CHECK(text.find("nan") == std::string::npos);
  }

  SECTION("17 significant digits round-trip bit-exactly") {
    // 0.1 is the classic witness: fewer digits lose the last bit.
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    const double v = std::strtod("0.10000000000000001", nullptr);
    CHECK(v == 0.1);
  }

  std::remove(path.c_str());
}

TEST_CASE("csv writer rejects malformed use") {
  const auto path = temp_path("misuse.csv");
  geogap::io::CsvWriter w(path, {"a", "b"});
  CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(geogap::io::CsvWriter("/nonexistent-dir/x.csv", {"a"}),
                  IOError);
  std::remove(path.c_str());
}

TEST_CASE("number formatting is %.17g") {
  CHECK(geogap::io::format_number(1.0) == "1");
  CHECK(geogap::io::format_number(-0.5) == "-0.5");
  const auto s = geogap::io::format_number(M_PI);
  CHECK(std::strtod(s.c_str(), nullptr) == M_PI);
}

TEST_CASE("builtin scenarios") {
  SECTION("rational matches its documented parameters") {
    const auto s = Scenario::builtin("rational");
    CHECK(s.potential.kind == "rational");
    CHECK(s.potential.gamma == 0.0);
    CHECK(s.spectral.affine);
    CHECK(s.spectral.z_affine == 1.0);
    CHECK(s.metric.r0 == 1.0);
    CHECK(s.metric.b == std::array<double, 3>{0.0, -1.0, 0.0});
    const auto surf = s.make_surface();
    CHECK(surf.z_affine() == 1.0);
    // Constant-curvature family: closed-form curvature is -r0.
    CHECK(std::abs(surf.gauss_curvature_closed(2.0) + 1.0) < 1e-12);
  }

  SECTION("flat degenerates the curvature to zero") {
    const auto s = Scenario::builtin("flat");
    CHECK(s.metric.r0 == 0.0);
    CHECK(s.metric.a == std::array<double, 2>{0.0, 0.0});
    CHECK(s.grid.y0 > 0.0);  // Delta ~ y^2: the chart must avoid y = 0
    const auto surf = s.make_surface();
    CHECK(surf.gauss_curvature_closed(2.0) == 0.0);
  }

  SECTION("one-gap scenario builds an elliptic surface") {
    const auto s = Scenario::builtin("lame-g1");
    CHECK(s.potential.kind == "lame-g1");
    CHECK_FALSE(s.spectral.affine);
    const auto surf = s.make_surface();
    CHECK(surf.z_affine() > 0.0);  // wp(0.86) on this lattice is positive
  }

  SECTION("unknown builtin is a configuration error") {
    CHECK_THROWS_AS(Scenario::builtin("free-lunch"), ConfigError);
  }
}

TEST_CASE("scenario json round-trip preserves every field") {
  auto s = Scenario::builtin("lame-g1");
  s.metric.r0 = 0.25;
  s.geodesic.mode = "hamiltonian";
  s.geodesic.p = {0.3, -0.2};
  s.tol.rtol = 1e-9;
  const auto j = s.to_json();
  const auto back = Scenario::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.metric.r0 == 0.25);
  CHECK(back.spectral.affine == false);
  CHECK(back.spectral.z_unif == 0.86);
  CHECK(back.tol.rtol == 1e-9);
}

TEST_CASE("scenario parsing is strict") {
  SECTION("unknown top-level key") {
    CHECK_THROWS_AS(Scenario::from_json(json{{"metrics", json::object()}}),
                    ConfigError);
  }
  SECTION("unknown nested key") {
    CHECK_THROWS_AS(
        Scenario::from_json(json{{"metric", {{"r0", 1.0}, {"rho", 2.0}}}}),
        ConfigError);
  }
  SECTION("wrong types") {
    CHECK_THROWS_AS(Scenario::from_json(json{{"metric", {{"r0", "one"}}}}),
                    ConfigError);
    CHECK_THROWS_AS(Scenario::from_json(json{{"grid", {{"nx", 2.5}}}}),
                    ConfigError);
    CHECK_THROWS_AS(Scenario::from_json(json{{"metric", {{"a", {1.0}}}}}),
                    ConfigError);
  }
  SECTION("both spectral forms at once") {
    CHECK_THROWS_AS(Scenario::from_json(
                        json{{"spectral", {{"z_affine", 1.0}, {"z_unif", 0.5}}}}),
                    ConfigError);
  }
  SECTION("bad ranges") {
    CHECK_THROWS_AS(Scenario::from_json(json{{"grid", {{"nx", 1}}}}),
                    ConfigError);
    CHECK_THROWS_AS(
        Scenario::from_json(json{{"geodesic", {{"t_end", -1.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        Scenario::from_json(json{{"tolerances", {{"rtol", 0.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        Scenario::from_json(json{{"geodesic", {{"mode", "teleport"}}}}),
        ConfigError);
  }
  SECTION("partial override keeps defaults elsewhere") {
    const auto s =
        Scenario::from_json(json{{"metric", {{"r0", -1.0}}}});
    CHECK(s.metric.r0 == -1.0);
    CHECK(s.metric.b == std::array<double, 3>{0.0, -1.0, 0.0});
    CHECK(s.grid.nx == 50);
  }
}

TEST_CASE("spectral value mapping to the basis") {
  SECTION("rational affine z maps through w = 1/sqrt(z)") {
    auto s = Scenario::builtin("rational");
    s.spectral.z_affine = 4.0;
    const auto surf = s.make_surface();
    CHECK(std::abs(surf.z_affine() - 4.0) < 1e-15);
  }
  SECTION("rational uniformizing value is the uniformizer itself") {
    auto s = Scenario::builtin("rational");
    s.spectral.affine = false;
    s.spectral.z_unif = 0.5;  // z = 1/w^2 = 4
    const auto surf = s.make_surface();
    CHECK(std::abs(surf.z_affine() - 4.0) < 1e-15);
  }
  SECTION("rational negative affine z is refused") {
    auto s = Scenario::builtin("rational");
    s.spectral.z_affine = -1.0;
    CHECK_THROWS_AS(s.make_surface(), ConfigError);
  }
  SECTION("one-gap affine z is refused") {
    auto s = Scenario::builtin("lame-g1");
    s.spectral.affine = true;
    s.spectral.z_affine = 1.0;
    CHECK_THROWS_AS(s.make_surface(), ConfigError);
  }
}

TEST_CASE("json manifest writing") {
  const auto path = temp_path("manifest.json");
  const json j{{"command", "metric-grid"}, {"seed", 42}};
  geogap::io::write_json(path, j);
  const auto text = slurp_binary(path);
  CHECK(text.back() == '\n');
  CHECK(json::parse(text) == j);
  CHECK(geogap::io::manifest_path_for("out.csv") == "out.csv.manifest.json");
  std::remove(path.c_str());
}
