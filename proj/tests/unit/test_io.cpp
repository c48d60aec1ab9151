#include <doctest.h>

#include "support.hpp"

#include "polarred/errors.hpp"
#include "polarred/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace test_support;

namespace {

std::string temp_path(const std::string& leaf) {
  return (std::filesystem::temp_directory_path() / ("polarred_test_" + leaf)).string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config defaults and overrides") {
  const RunConfig d = parse_config(Json::object());
  CHECK(d.model == "su2-conj");
  CHECK(d.dt == 1e-4);
  CHECK(d.seed == 20240601u);
  const RunConfig c = parse_config(Json::parse(R"({"model": "su3-conj", "dt": 0.01, "q0": [1, 2], "seed": 7})"));
  CHECK(c.model == "su3-conj");
  CHECK(c.dt == 0.01);
  CHECK(c.q0 == std::vector<double>{1.0, 2.0});
  CHECK(c.seed == 7u);
}

TEST_CASE("config rejects unknown keys, wrong types and negative seeds") {
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"modle": "su2-conj"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"dt": "small"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"seed": -1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse("[1, 2]")), ConfigError);
}

TEST_CASE("config survives a JSON round trip") {
  RunConfig c;
  c.model = "su4-conj";
  c.dt = 0.1 + 0.2;
  c.p0 = {0.1, -0.3, 1e-300};
  c.oracle = true;
  c.seed = 18446744073709551615ull;
  const RunConfig back = parse_config(Json::parse(dump_json(config_to_json(c))));
  CHECK(back.model == c.model);
  CHECK(back.dt == c.dt);
  CHECK(back.p0 == c.p0);
  CHECK(back.oracle);
  CHECK(back.seed == c.seed);
}

TEST_CASE("config files") {
  const std::string good = temp_path("good.json"), bad = temp_path("bad.json");
  std::ofstream(good) << R"({"model": "su3-twisted", "t_end": 2})";
  std::ofstream(bad) << R"({"model": )";
  CHECK(load_config_file(good).model == "su3-twisted");
  CHECK(load_config_file(good).t_end == 2.0);
  CHECK_THROWS_AS(load_config_file(bad), ConfigError);
  CHECK_THROWS_AS(load_config_file(temp_path("missing.json")), ConfigError);
}

TEST_CASE("validation of numeric ranges") {
  RunConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.dt = 0.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.dt = 2.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.scheme = "euler";
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.rep = "spinor";
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = RunConfig{};
  c.k = 0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("JSON output round-trips doubles exactly") {
  Json j;
  const double x = 0.1 + 0.2, y = 1.0 / 3.0, z = 5e-324;
  j["v"] = {x, y, z};
  const Json back = Json::parse(dump_json(j));
  CHECK(back["v"][0].get<double>() == x);
  CHECK(back["v"][1].get<double>() == y);
  CHECK(back["v"][2].get<double>() == z);
  RMatrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK(to_json(m).dump() == "[[1.0,2.0],[3.0,4.0]]");
}

TEST_CASE("trajectory CSV layout") {
  CHECK(trajectory_header(1, 2) == "t,q_1,p_1,xi_1,xi_2,H,casimir,xi_k_norm");
  const auto& m = model("su2-conj");
  const ReducedState s{RVector::Constant(1, 2.0), RVector::Constant(1, 0.3), RVector::Unit(2, 0)};
  const Trajectory t = integrate_reduced(m, s, 0.1, 1e-3, Scheme::rk4, 10);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  const auto rows = lines(os.str());
  REQUIRE(rows.size() == t.samples.size() + 1);
  CHECK(rows[1].rfind("0,2,0.29999999999999999,1,0,", 0) == 0);
  // every value parses back exactly
  std::istringstream last(rows.back());
  std::vector<double> values;
  for (std::string cell; std::getline(last, cell, ',');) values.push_back(std::stod(cell));
  CHECK(values.size() == 8);
  CHECK(values[1] == t.samples.back().state.q(0));
  CHECK(values[5] == t.samples.back().energy);
}

TEST_CASE("simulate summary and oracle section") {
  RunConfig c;
  c.t_end = 0.2;
  c.dt = 1e-3;
  c.sample_every = 20;
  c.q0 = {2.0};
  c.p0 = {0.4};
  c.oracle = true;
  std::ostringstream csv;
  const Json j = cmd_simulate(c, csv);
  CHECK(j["steps"] == 200);
  CHECK(j["samples"] == 11);
  CHECK(j["energy_drift"].get<double>() < 1e-10);
  CHECK(j["oracle"]["max_deviation"].get<double>() < 1e-8);
  CHECK(lines(csv.str()).size() == 12);
  c.q0 = {7.0};
  CHECK_THROWS_AS(cmd_simulate(c, csv), ConfigError);
  c.q0 = {1.0, 2.0};
  CHECK_THROWS_AS(cmd_simulate(c, csv), ConfigError);
}

TEST_CASE("derive report") {
  RunConfig c;
  c.samples = 20;
  const Json j = cmd_derive(c);
  CHECK(j["rank"] == 1);
  CHECK(j["dim_k"] == 1);
  CHECK(j["dim_kperp"] == 2);
  CHECK(j["zero_potential"] == false);
  CHECK(j["sutherland"]["coefficient"].get<double>() == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(j["sutherland"]["passed"] == true);
  // the reference point q = pi: b = 4 I, delta = 4
  CHECK(j["points"][0]["delta"].get<double>() == doctest::Approx(4.0));
  c.orbit = "zero";
  CHECK(cmd_derive(c)["zero_potential"] == true);
  c.model = "su3-twisted";
  c.orbit = "zero";
  const Json t = cmd_derive(c);
  CHECK_FALSE(t.contains("sutherland"));
  CHECK(dump_json(cmd_derive(c)) == dump_json(t));
}

TEST_CASE("spectrum report and operator dump") {
  RunConfig c;
  c.grid_n = 100;
  c.k = 3;
  c.dump_operator = temp_path("op.bin");
  const Json j = cmd_spectrum(c);
  CHECK(j["matrix_size"] == 100);
  CHECK(j["oracle"]["max_deviation"].get<double>() < 1e-2);
  const CMatrix m = read_operator_dump(c.dump_operator);
  CHECK(m.rows() == 100);
  // diagonal: 1/h^2 - 1/8 with h = 2 pi / 101
  const double h = 2 * kPi / 101;
  CHECK(m(0, 0).real() == doctest::Approx(1 / (h * h) - 0.125).epsilon(1e-12));
  CHECK(m(0, 1).real() == doctest::Approx(-0.5 / (h * h)).epsilon(1e-12));
  CHECK(m(0, 2) == Complex(0.0));
  CHECK(std::filesystem::file_size(c.dump_operator) == 16 + 16 * 100 * 100);
  c.k = 101;
  CHECK_THROWS_AS(cmd_spectrum(c), ConfigError);
  std::ofstream(temp_path("junk.bin")) << "not a dump";
  CHECK_THROWS_AS(read_operator_dump(temp_path("junk.bin")), ConfigError);
}

}  // TEST_SUITE
