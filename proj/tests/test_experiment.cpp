#include <cmath>
#include <sstream>

#include <doctest.h>

#include "sttrace/error.hpp"
#include "sttrace/experiment.hpp"

using namespace sttrace;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string csv_of(const ConvergenceReport& r) {
  std::ostringstream os;
  write_csv(r, os);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(
      "# comment\n"
      "scene = merging_circles\n"
      "k = 2   # trailing\n"
      "kg = 2\n"
      "beta = 0.5\n"
      "xi = 1/h\n"
      "alpha = improved\n"
      "r = one\n"
      "L = 5\n"
      "levels = 1-3\n"
      "T = 0.5\n"
      "domain = -2 2 -2 2\n");
  CHECK(c.scene == "merging_circles");
  CHECK(c.params.ks == 2);
  CHECK(c.params.kq == 2);
  CHECK(c.params.kgs == 2);
  CHECK(c.params.beta == 0.5);
  CHECK(c.params.xi_mode == XiMode::InvH);
  CHECK(c.params.alpha == AlphaMode::Improved);
  CHECK(c.params.r_mode == RMode::One);
  CHECK(c.params.L == 5);
  CHECK(c.levels == std::vector<int>{1, 2, 3});
  CHECK(*c.T == 0.5);
  CHECK(c.domain->xmin == -2.0);
  CHECK(parse("levels = 0, 2 4").levels == std::vector<int>{0, 2, 4});
  CHECK(default_h_init("merging_circles") == 0.5);
  CHECK(default_dt_init("moving_circle") == 0.25);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("k = two\n"), ConfigError);
  CHECK_THROWS_AS(parse("k = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("k\n"), ConfigError);
  CHECK_THROWS_AS(parse("beta = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("xi = h^2\n"), ConfigError);
  CHECK_THROWS_AS(parse("levels = 3-1\n"), ConfigError);
  CHECK_THROWS_AS(parse("diagonal = false\nlevels_s = 0-1\n"), ConfigError);
  CHECK_THROWS_AS(parse("domain = 0 1 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("h_init = -1\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
  CHECK_THROWS_AS(configured_scene(parse("scene = torus\n")), ConfigError);
}

TEST_CASE("CSV layout, empty fields and determinism") {
  ExperimentConfig c = parse("scene = moving_circle\nlevels = 0-1\n");
  const ConvergenceReport a = run_experiment(c);
  REQUIRE(a.all_completed());
  const std::string csv = csv_of(a);
  std::istringstream lines(csv);
  std::string header, row0, row1;
  std::getline(lines, header);
  std::getline(lines, row0);
  std::getline(lines, row1);
  CHECK(header == kCsvHeader);
  CHECK(header == "level,h,dt,err_energy,err_surface_energy,err_linf_l2,e_mass,eoc_s,eoc_q,eoc_qs");
  CHECK(row0.substr(0, 2) == "0,");
  CHECK(row0.size() > 3);
  CHECK(row0.substr(row0.size() - 3) == ",,,");  // no EOC on the coarsest level
  CHECK(row1.back() != ',');
  CHECK(a.rows[1].eoc_qs);
  CHECK(a.rows[1].err_energy < a.rows[0].err_energy);
  CHECK(csv_of(run_experiment(c)) == csv);
}

TEST_CASE("grid mode labels and EOC directions") {
  const ConvergenceReport r =
      run_experiment(parse("diagonal = false\nlevels_s = 0-1\nlevels_q = 0-1\n"));
  REQUIRE(r.rows.size() == 4);
  CHECK(csv_of(r).find("\n1:1,") != std::string::npos);
  for (const LevelRow& row : r.rows) {
    CHECK(row.eoc_s.has_value() == (row.ls > 0));
    CHECK(row.eoc_q.has_value() == (row.lq > 0));
  }
}

TEST_CASE("stationary scene prints the beta-independence line") {
  const ConvergenceReport r = run_experiment(parse("scene = stationary_circle\nlevels = 0\n"));
  REQUIRE(r.beta_independent);
  CHECK(*r.beta_independent);
  std::ostringstream os;
  print_table(r, os);
  CHECK(os.str().find("beta-independence: PASS") != std::string::npos);
}

TEST_CASE("merging scene: no norms, mass conserved for beta = 1 and R = 1") {
  const ConvergenceReport r =
      run_experiment(parse("scene = merging_circles\nbeta = 1\nr = one\nlevels = 0\n"));
  REQUIRE(r.all_completed());
  CHECK_FALSE(r.rows[0].err_energy);
  REQUIRE(r.rows[0].e_mass);
  CHECK(*r.rows[0].e_mass <= 1e-9);
  std::ostringstream os;
  write_mass_csv(r, 1.0, os);
  CHECK(os.str().rfind("level,n,t,i_mass,i_surf\n", 0) == 0);
  CHECK(os.str().find("\n0,8,1,") != std::string::npos);
}

TEST_CASE("failed levels are reported per row") {
  const ConvergenceReport r = run_experiment(
      parse("scene = stationary_circle\ndomain = 0.6 1 0.6 1\nh_init = 0.1\ndt_init = 0.5\nlevels = 0\n"));
  REQUIRE(r.rows.size() == 1);
  CHECK_FALSE(r.rows[0].completed);
  CHECK_FALSE(r.rows[0].error.empty());
  CHECK_FALSE(r.all_completed());
  CHECK(csv_of(r).find("\n0,,,,,,,,,\n") != std::string::npos);
}
