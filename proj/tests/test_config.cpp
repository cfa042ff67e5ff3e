#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "srvol/config.hpp"
#include "srvol/contact.hpp"
#include "srvol/errors.hpp"
#include "srvol/heisenberg.hpp"

using namespace srvol;

namespace {

// Runs the parser on text expected to fail and returns the error message.
std::string parse_error(const std::string& text) {
  try {
    parse_config_text(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses every key with comments, quoting, and lists") {
  const std::string text =
      "# full configuration\n"
      "command = fit\n"
      "family = normal_form\n"
      "beta = \"x\"          # inline comment\n"
      "gamma = x^2 + x*y\n"
      "x1 = [\"1\", \"0\", \"-0.5*y\"]\n"
      "x2 = [0, 1, \"0.5*x\"]\n"
      "\n"
      "eps = [0.2, 0.1, 0.05]\n"
      "quad = [8, 8, 16]\n"
      "tol = 1e-10\n"
      "seed = 7\n"
      "out = \"report # 1.csv\"\n"
      "format = json\n";
  RunConfig cfg = parse_config_text(text);
  CHECK(cfg.command == "fit");
  CHECK(cfg.family == "normal_form");
  CHECK(cfg.beta == "x");
  CHECK(cfg.gamma == "x^2 + x*y");
  CHECK(cfg.x1[0] == "1");
  CHECK(cfg.x1[2] == "-0.5*y");
  CHECK(cfg.x2[0] == "0");
  CHECK(cfg.x2[2] == "0.5*x");
  REQUIRE(cfg.eps_list.size() == 3);
  CHECK(cfg.eps_list[0] == 0.2);
  CHECK(cfg.eps_list[2] == 0.05);
  CHECK(cfg.quad.n_rho == 8);
  CHECK(cfg.quad.n_theta == 8);
  CHECK(cfg.quad.n_w == 16);
  CHECK(cfg.quad.tol_ode == 1e-10);
  CHECK(cfg.seed == 7u);
  CHECK(cfg.out == "report # 1.csv");  // '#' inside quotes is literal
  CHECK(cfg.format == "json");
}

TEST_CASE("empty text keeps the documented defaults") {
  RunConfig cfg = parse_config_text("# nothing but a comment\n\n");
  CHECK(cfg.command == "");
  CHECK(cfg.family == "heisenberg");
  CHECK(cfg.beta == "0");
  CHECK(cfg.gamma == "0");
  REQUIRE(cfg.eps_list.size() == 5);
  CHECK(cfg.eps_list.front() == 0.20);
  CHECK(cfg.eps_list.back() == 0.05);
  CHECK(cfg.quad.n_rho == 16);
  CHECK(cfg.quad.n_theta == 32);
  CHECK(cfg.quad.n_w == 48);
  CHECK(cfg.seed == 12345u);
  CHECK(cfg.format == "csv");
}

TEST_CASE("parse errors carry the source name and line number") {
  CHECK(contains(parse_error("family = heisenberg\n\nnonsense line\n"),
                 "cfg:3: expected 'key = value'"));
  CHECK(contains(parse_error("family = heisenberg\nbogus = 3\n"),
                 "cfg:2: unknown key 'bogus'"));
  CHECK(contains(parse_error("seed = 1\nseed = 2\n"),
                 "cfg:2: duplicate key 'seed'"));
  CHECK(contains(parse_error("beta = \"x\n"), "unterminated quoted string"));
  CHECK(contains(parse_error("eps = [0.1, 0.05\n"), "unterminated list"));
  CHECK(contains(parse_error("eps = [0.1, zap]\n"), "expected a number"));
  CHECK(contains(parse_error("quad = [8, 8]\n"), "3 counts"));
  CHECK(contains(parse_error("quad = [8.5, 8, 16]\n"),
                 "non-negative integer"));
  CHECK(contains(parse_error("x1 = 3\n"), "exactly 3 components"));
  CHECK(contains(parse_error("seed = -1\n"), "[0, 2^32)"));
  CHECK(contains(parse_error("out = \"a\" b\n"), "unexpected text"));
  CHECK(contains(parse_error("tol =\n"), "missing value"));
  CHECK(contains(parse_error("eps = [0.1,]\n"), "trailing ','"));
  CHECK(contains(parse_error("eps = [0.1,, 0.05]\n"), "empty list element"));
  CHECK(contains(parse_error("= 3\n"), "invalid key"));
}

TEST_CASE("validation rejects inconsistent configurations") {
  CHECK_THROWS_AS(parse_config_text("eps = [0.4, 0.2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("eps = [0.1, 0.1]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("eps = []\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("eps = [-0.1]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("quad = [2, 8, 16]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("quad = [8, 7, 16]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("tol = 1e-5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("tol = 1e-14\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("family = martian\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("format = xml\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("command = destroy\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("family = frame\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("family = frame\nx1 = [1, 0, 0]\nx2 = [0, \"\", 1]\n"),
      ConfigError);
}

TEST_CASE("builds structures from all three families") {
  const Point3 origin{0.0, 0.0, 0.0};

  RunConfig flat;
  ContactStructure s0 = build_structure(flat);
  CHECK(chi_at(s0, origin) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(kappa_at(s0, origin) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(popp_density(s0, origin) == doctest::Approx(1.0).epsilon(1e-14));

  // Quadratic data a x^2 + b xy + c y^2 pins the origin invariants to
  // kappa = 2(a+c) and chi = 2 sqrt(b^2 + (c-a)^2).
  RunConfig round = parse_config_text(
      "family = normal_form\ngamma = \"x^2 + y^2\"\n");
  ContactStructure s1 = build_structure(round);
  CHECK(kappa_at(s1, origin) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(chi_at(s1, origin)) <= 1e-12);

  RunConfig mixed = parse_config_text(
      "family = normal_form\ngamma = \"x^2 + x*y\"\n");
  ContactStructure s2 = build_structure(mixed);
  CHECK(kappa_at(s2, origin) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(chi_at(s2, origin) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

  RunConfig framed = parse_config_text(
      "family = frame\n"
      "x1 = [\"1\", \"0\", \"-0.5*y\"]\n"
      "x2 = [\"0\", \"1\", \"0.5*x\"]\n");
  ContactStructure s3 = build_structure(framed);
  CHECK(std::abs(chi_at(s3, origin)) <= 1e-14);
  CHECK(std::abs(kappa_at(s3, origin)) <= 1e-14);
  CHECK(popp_density(s3, origin) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invariants command renders both formats deterministically") {
  RunConfig flat;
  const std::string text = cmd_invariants(flat);
  auto lines = split_lines(text);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "chi = 0");
  CHECK(lines[1] == "kappa = 0");
  CHECK(lines[2] == "popp_density = 1");
  REQUIRE(contains(lines[3], "sec_residual = "));
  const double resid = std::stod(lines[3].substr(lines[3].find('=') + 1));
  CHECK(std::abs(resid) <= 1e-12);
  CHECK(cmd_invariants(flat) == text);  // byte-identical on repeat

  RunConfig round = parse_config_text(
      "family = normal_form\ngamma = \"x^2 + y^2\"\nformat = json\n");
  nlohmann::json j = nlohmann::json::parse(cmd_invariants(round));
  CHECK(j["kappa"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(j["chi"].get<double>()) <= 1e-12);
  CHECK(j["popp_density"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(j["sec_residual"].get<double>()) <= 1e-10);
}

TEST_CASE("ball-volume command emits one checked row per radius") {
  RunConfig cfg = parse_config_text(
      "eps = [0.2, 0.1]\nquad = [8, 8, 16]\n");
  const std::string text = cmd_ball_volume(cfg);
  auto lines = split_lines(text);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "eps,volume,volume_over_eps4,prediction,rel_deviation,status");
  char c0cell[40];
  std::snprintf(c0cell, sizeof(c0cell), "%.12g", c0());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    auto fields = split_csv(lines[r]);
    REQUIRE(fields.size() == 6);
    CHECK(fields[5] == "ok");
    CHECK(fields[3] == c0cell);  // flat prediction is the leading constant
    const double normalized = std::stod(fields[2]);
    CHECK(normalized == doctest::Approx(c0()).epsilon(5e-3));
    const double dev = std::stod(fields[4]);
    CHECK(std::abs(dev) <= 5e-3);
  }
  CHECK(split_csv(lines[1])[0] == "0.2");
  CHECK(split_csv(lines[2])[0] == "0.1");
  CHECK(cmd_ball_volume(cfg) == text);  // byte-identical on repeat

  cfg.format = "json";
  nlohmann::json arr = nlohmann::json::parse(cmd_ball_volume(cfg));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  CHECK(arr[0]["eps"].get<double>() == 0.2);
  CHECK(arr[0]["status"].get<std::string>() == "ok");
  CHECK(arr[0]["volume"].is_number());
  CHECK(arr[0]["volume_over_eps4"].get<double>() ==
        doctest::Approx(c0()).epsilon(5e-3));
}

TEST_CASE("ball-volume rows fail independently") {
  // Curvature large enough that the truncated covector domain collapses at
  // eps = 0.2 but not at eps = 0.1: the first row must report the error
  // while the second still produces a volume.
  RunConfig cfg = parse_config_text(
      "family = normal_form\n"
      "gamma = \"600*x^2 + 600*y^2\"\n"
      "eps = [0.2, 0.1]\n"
      "quad = [4, 4, 8]\n");
  const std::string text = cmd_ball_volume(cfg);
  auto lines = split_lines(text);
  REQUIRE(lines.size() == 3);
  auto bad = split_csv(lines[1]);
  REQUIRE(bad.size() == 6);
  CHECK(bad[1] == "");  // no volume for the failed radius
  CHECK(contains(bad[5], "error: "));
  CHECK(contains(bad[5], "collapses"));
  auto good = split_csv(lines[2]);
  REQUIRE(good.size() == 6);
  CHECK(good[5] == "ok");
  CHECK(std::stod(good[1]) > 0.0);

  cfg.format = "json";
  nlohmann::json arr = nlohmann::json::parse(cmd_ball_volume(cfg));
  CHECK(arr[0]["volume"].is_null());
  CHECK(contains(arr[0]["status"].get<std::string>(), "error: "));
  CHECK(arr[1]["status"].get<std::string>() == "ok");
}

TEST_CASE("fit command reproduces the expansion report") {
  RunConfig cfg = parse_config_text("quad = [8, 8, 32]\n");
  const std::string text = cmd_fit(cfg);
  auto lines = split_lines(text);
  REQUIRE(lines.size() == 6);
  CHECK(contains(lines[0], "eps,volume,volume_over_eps4,fitted"));
  CHECK(cmd_fit(cfg) == text);  // byte-identical on repeat

  cfg.format = "json";
  nlohmann::json j = nlohmann::json::parse(cmd_fit(cfg));
  CHECK(j["c0_est"].get<double>() == doctest::Approx(c0()).epsilon(1e-4));
  CHECK(std::abs(j["slope_est"].get<double>()) <= 3e-3);
  REQUIRE(j["residuals"].size() == 5);
  for (const auto& r : j["residuals"])
    CHECK(std::abs(r.get<double>()) <= 1e-5);
}

TEST_CASE("config files parse like inline text") {
  const std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << "family = normal_form\n"
           "gamma = \"x^2 + y^2\"\n"
           "eps = [0.1, 0.05]\n";
  }
  RunConfig cfg = parse_config_file(path);
  CHECK(cfg.family == "normal_form");
  CHECK(cfg.gamma == "x^2 + y^2");
  REQUIRE(cfg.eps_list.size() == 2);
  std::remove(path.c_str());

  CHECK_THROWS_AS(parse_config_file("no_such_file.cfg"), ConfigError);
  try {
    parse_config_file("no_such_file.cfg");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), "no_such_file.cfg"));
  }

  // File-tagged line numbers survive through parse_config_file.
  {
    std::ofstream out(path);
    out << "family = heisenberg\nbroken\n";
  }
  try {
    parse_config_file(path);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), path + ":2:"));
  }
  std::remove(path.c_str());
}

}  // TEST_SUITE
