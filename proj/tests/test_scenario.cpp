// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rblab/scenario.hpp"

using namespace rblab;

TEST_CASE("normalize applies the 1/M convention") {
  RawChannelProfile raw;
  raw.gain_serving = 1;
  raw.power_serving = 1;
  raw.noise_power = 1;
  auto p = normalize(raw, 1);
  CHECK(p.rho_serving == 1.0);
  CHECK(p.rho_interferers.empty());

  raw.gain_serving = 2;
  raw.power_serving = 4;
  raw.gains_interferers = {1};
  raw.powers_interferers = {2};
  auto q = normalize(raw, 4, 7);
  CHECK(q.user_id == 7);
  CHECK(q.rho_serving == 2.0);
  REQUIRE(q.rho_interferers.size() == 1);
  CHECK(q.rho_interferers[0] == 0.5);
}

TEST_CASE("normalize is scale invariant") {
  RawChannelProfile raw;
  raw.gain_serving = 0.37;
  raw.power_serving = 12.0;
  raw.noise_power = 2.5;
  raw.gains_interferers = {0.11, 4.0};
  raw.powers_interferers = {9.0, 0.25};
  auto base = normalize(raw, 3);
  RawChannelProfile scaled = raw;
  const double c = 17.0;
  scaled.gain_serving *= c;
  scaled.power_serving *= c;
  scaled.noise_power *= c * c;
  for (auto& g : scaled.gains_interferers) g *= c;
  for (auto& p : scaled.powers_interferers) p *= c;
  auto again = normalize(scaled, 3);
  CHECK(again.rho_serving == doctest::Approx(base.rho_serving).epsilon(1e-14));
  for (std::size_t b = 0; b < base.rho_interferers.size(); b++)
    CHECK(again.rho_interferers[b] ==
          doctest::Approx(base.rho_interferers[b]).epsilon(1e-14));
}

TEST_CASE("normalize rejects bad input") {
  RawChannelProfile raw;
  raw.noise_power = 0.0;
  CHECK_THROWS_WITH_AS(normalize(raw, 1),
                       "noise_power must be positive and finite", ScenarioError);
  raw.noise_power = 1.0;
  raw.gains_interferers = {1.0};
  CHECK_THROWS_AS(normalize(raw, 1), ScenarioError);  // length mismatch
}

TEST_CASE("validate reports every violation") {
  Scenario s;
  s.num_antennas = 0;
  CHECK(validate(s).size() == 2);  // bad antennas and no users

  s.num_antennas = 2;
  s.users = {{0, 1.0, {0.5}}, {0, -1.0, {}}, {3, 1.0, {0.0}}};
  auto errors = validate(s);
  REQUIRE(errors.size() == 4);
  CHECK(errors[0].find("duplicate user_id 0") != std::string::npos);
  CHECK(errors[1].find("rho_serving") != std::string::npos);
  CHECK(errors[2].find("rho_interferers[0]") != std::string::npos);
  CHECK(errors[3].find("contiguous") != std::string::npos);

  s.users = {{0, 1.0, {0.5}}, {1, 2.0, {}}};
  CHECK(validate(s).empty());
  CHECK_NOTHROW(validate_or_throw(s));
}

TEST_CASE("json parsing, linear and dB forms") {
  auto s = parse_scenario(R"({
    "num_antennas": 2,
    "users": [
      {"rho_serving": 1.0, "rho_interferers": [0.5, 2.0]},
      {"rho_serving": 3.0},
      {"raw": {"gain_serving_db": 3.0103, "power_serving": 4.0,
               "noise_power_db": 0.0,
               "gains_interferers_db": [-3.0103],
               "powers_interferers": [1.0]}}
    ]
  })");
  CHECK(s.num_antennas == 2);
  REQUIRE(s.users.size() == 3);
  CHECK(s.users[0].user_id == 0);
  CHECK(s.users[0].rho_interferers == std::vector<double>{0.5, 2.0});
  CHECK(s.users[1].rho_interferers.empty());
  // 10^(3.0103/10) = 2.0000 within rounding of the dB constant
  CHECK(s.users[2].rho_serving == doctest::Approx(2.0 * 4.0 / 2.0).epsilon(1e-5));
  REQUIRE(s.users[2].rho_interferers.size() == 1);
  CHECK(s.users[2].rho_interferers[0] == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("json rejections") {
  CHECK_THROWS_AS(parse_scenario("not json"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"num_antennas": 1})"), ScenarioError);
  CHECK_THROWS_AS(parse_scenario(R"({"num_antennas": 1, "users": [], "extra": 1})"),
                  ScenarioError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"num_antennas": 1, "users": [{"rho": 1}]})"),
      ScenarioError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"num_antennas": 1, "users": [{"rho_serving": 1, "user_id": 4}]})"),
      ScenarioError);
  // both linear and dB for one field
  CHECK_THROWS_AS(parse_scenario(R"({
    "num_antennas": 1,
    "users": [{"raw": {"gain_serving": 1, "gain_serving_db": 0,
                       "power_serving": 1, "noise_power": 1,
                       "gains_interferers": [], "powers_interferers": []}}]
  })"),
                  ScenarioError);
  // parses but fails validation
  CHECK_THROWS_AS(
      parse_scenario(R"({"num_antennas": 1, "users": [{"rho_serving": -2}]})"),
      ScenarioError);
}

TEST_CASE("file loading") {
  const char* path = "/tmp/rblab_test_scenario.json";
  {
    std::ofstream out(path);
    out << R"({"num_antennas": 3, "users": [{"rho_serving": 1.5}]})";
  }
  auto s = load_scenario(path);
  CHECK(s.num_antennas == 3);
  CHECK(s.users.at(0).rho_serving == 1.5);
  std::remove(path);
  CHECK_THROWS_AS(load_scenario("/tmp/does_not_exist_rblab.json"), ScenarioError);
}
