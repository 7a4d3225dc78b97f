#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "adr/constants.hpp"
#include "adr/rng.hpp"
#include "adr/scenario.hpp"

using namespace adr;

TEST_CASE("generate_scenario is deterministic in the seed") {
  MissionParams params;
  const Scenario a = generate_scenario(42, params);
  const Scenario b = generate_scenario(42, params);
  CHECK(a == b);
  const Scenario c = generate_scenario(43, params);
  CHECK(a.debris != c.debris);
}

TEST_CASE("generated debris satisfy the type invariants") {
  MissionParams params;
  const Scenario s = generate_scenario(7, params);
  REQUIRE(s.debris.size() == 50);
  for (int i = 0; i < 50; ++i) {
    const DebrisObject& d = s.debris[static_cast<std::size_t>(i)];
    CHECK(d.id == i);
    const double altitude = d.elements.semi_major_axis_km - kEarthRadiusKm;
    CHECK(altitude >= 700.0);
    CHECK(altitude <= 800.0);
    CHECK(d.elements.eccentricity == 0.0);
    CHECK(d.elements.inclination_rad == s.initial_orbit.inclination_rad);
    CHECK(d.elements.raan_rad == s.initial_orbit.raan_rad);
    CHECK(d.elements.arg_perigee_rad == s.initial_orbit.arg_perigee_rad);
    CHECK(d.elements.true_anomaly_rad >= 0.0);
    CHECK(d.elements.true_anomaly_rad < kTwoPi);
  }
  CHECK(s.initial_orbit.semi_major_axis_km == kEarthRadiusKm + 700.0);
  CHECK(s.initial_orbit.eccentricity == 0.0);
  CHECK(std::abs(rad2deg(s.initial_orbit.inclination_rad) - 96.0) < 1e-12);
}

TEST_CASE("mean altitude over 10,000 debris is 750 +/- 2 km") {
  MissionParams params;
  params.n_debris = 10000;
  const Scenario s = generate_scenario(2026, params);
  double sum = 0.0;
  for (const DebrisObject& d : s.debris) {
    sum += d.elements.semi_major_axis_km - kEarthRadiusKm;
  }
  const double mean = sum / static_cast<double>(s.debris.size());
  CHECK(mean > 748.0);
  CHECK(mean < 752.0);
}

TEST_CASE("scenario round-trips through the CSV format field-exactly") {
  MissionParams params;
  params.n_debris = 17;
  params.collision_probability = 1.0 / 3.0;
  const Scenario s = generate_scenario(123456789012345ULL, params);

  std::stringstream buf;
  write_scenario(s, buf);
  const Scenario loaded = read_scenario(buf);
  CHECK(loaded == s);

  // Save -> load -> save reproduces identical bytes.
  std::stringstream buf2;
  write_scenario(loaded, buf2);
  CHECK(buf.str() == buf2.str());
}

TEST_CASE("round-trip stability holds across many seeds") {
  MissionParams params;
  params.n_debris = 8;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scenario s = generate_scenario(seed, params);
    std::stringstream buf;
    write_scenario(s, buf);
    CHECK(read_scenario(buf) == s);
  }
}

TEST_CASE("hand-written 3-debris CSV loads exact semi-major axes") {
  std::stringstream in(
      "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
      "0,7078.137,0,96,0,0,0\n"
      "1,7128.137,0,96,0,0,120\n"
      "2,7178.137,0,96,0,0,240\n");
  const Scenario s = read_scenario(in);
  REQUIRE(s.debris.size() == 3);
  CHECK(s.params.n_debris == 3);
  CHECK(s.debris[0].elements.semi_major_axis_km == 7078.137);
  CHECK(s.debris[1].elements.semi_major_axis_km == 7128.137);
  CHECK(s.debris[2].elements.semi_major_axis_km == 7178.137);
}

TEST_CASE("duplicate debris id is a parse error naming the line") {
  std::stringstream in(
      "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
      "0,7078.137,0,96,0,0,0\n"
      "0,7128.137,0,96,0,0,10\n");
  try {
    read_scenario(in);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("malformed rows are parse errors naming the line") {
  SUBCASE("wrong field count") {
    std::stringstream in(
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,7078.137,0,96\n");
    CHECK_THROWS_WITH_AS(read_scenario(in),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("non-numeric field") {
    std::stringstream in(
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,oops,0,96,0,0,0\n");
    CHECK_THROWS_WITH_AS(read_scenario(in),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("eccentricity out of range") {
    std::stringstream in(
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,7078.137,1.5,96,0,0,0\n");
    CHECK_THROWS_WITH_AS(read_scenario(in),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("semi-major axis below the Earth radius") {
    std::stringstream in(
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,6000,0,96,0,0,0\n");
    CHECK_THROWS_WITH_AS(read_scenario(in),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("unknown parameter key") {
    std::stringstream in(
        "# frobnication_level=9\n"
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,7078.137,0,96,0,0,0\n");
    CHECK_THROWS_WITH_AS(read_scenario(in),
                         doctest::Contains("line 1"), std::runtime_error);
  }
  SUBCASE("header count disagrees with row count") {
    std::stringstream in(
        "# n_debris=5\n"
        "id,sma_km,ecc,inc_deg,raan_deg,argp_deg,nu_deg\n"
        "0,7078.137,0,96,0,0,0\n");
    CHECK_THROWS_AS(read_scenario(in), std::runtime_error);
  }
}

TEST_CASE("save/load through the filesystem") {
  MissionParams params;
  params.n_debris = 5;
  const Scenario s = generate_scenario(99, params);
  const auto path = std::filesystem::temp_directory_path() / "adr_test_scenario.csv";
  save_scenario(s, path);
  CHECK(load_scenario(path) == s);
  std::filesystem::remove(path);
}

TEST_CASE("MissionParams validation rejects out-of-range values") {
  MissionParams p;
  p.n_debris = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MissionParams{};
  p.collision_probability = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MissionParams{};
  p.max_delta_v_km_s = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MissionParams{};
  p.sample_interval_s = -60.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = MissionParams{};
  p.collision_probability = 0.0;  // p = 0 is explicitly legal
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("canonicalize_angle_rad is a fixed point of the degree round trip") {
  SplitMix64 check_rng(21);
  for (int i = 0; i < 10000; ++i) {
    const double canonical = canonicalize_angle_rad(check_rng.uniform(0.0, kTwoPi));
    CHECK(deg2rad(rad2deg(canonical)) == canonical);
  }
}
