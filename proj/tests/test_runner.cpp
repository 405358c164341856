#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edm/csv.hpp"
#include "edm/errors.hpp"
#include "edm/runner.hpp"

using namespace edm;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out_path(const std::string& name) {
  std::filesystem::create_directories("runner_out");
  return "runner_out/" + name;
}

json ground_sweep_config(const std::string& path) {
  return json{{"subcommand", "ground-sweep"},
              {"model", {{"N", 2}, {"omega_q", 0.5}, {"delta", 0.0}}},
              {"sweep", {{"variable", "gamma"}, {"from", 0.0}, {"to", 2.0}, {"points", 5}}},
              {"solver", {{"k", 2}, {"fock", 40}}},
              {"output", {{"path", path}, {"format", "csv"}}}};
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(-1e300) == "-1e+300");
  CHECK(format_double(std::nan("")) == "nan");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("ground sweep: schema, shape and determinism") {
  std::ostringstream log;
  const std::string path_a = out_path("sweep_a.csv");
  const std::string path_b = out_path("sweep_b.csv");
  const auto out_a = runner::run(ground_sweep_config(path_a), log);
  const auto out_b = runner::run(ground_sweep_config(path_b), log);

  const std::string csv_a = slurp(path_a);
  const std::string csv_b = slurp(path_b);
  CHECK(csv_a == csv_b);  // byte identical

  std::istringstream lines(csv_a);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "sweep_value,E0,gap,n_photon,Sz,Sx,Sx2,entropy_q,entropy_1,parity,n_max,converged,"
        "n_photon_avg,Sz_avg,Sx_avg,Sx2_avg,parity_avg,n_degenerate");
  int rows = 0;
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 5);

  CHECK(out_a.meta["config_hash"] == out_b.meta["config_hash"]);
  CHECK(out_a.meta.contains("residuals"));

  // first row is the decoupled point
  const auto& row0 = out_a.table.rows.at(0);
  CHECK(std::get<double>(row0[0]) == 0.0);
  CHECK(std::get<double>(row0[3]) == doctest::Approx(0.0).epsilon(1e-10));  // n_photon
  CHECK(std::get<double>(row0[4]) == doctest::Approx(-1.0).epsilon(1e-10));  // Sz
}

TEST_CASE("ground sweep json output mirrors the table") {
  const std::string path = out_path("sweep.json");
  json cfg = ground_sweep_config(path);
  cfg["output"]["format"] = "json";
  cfg["sweep"]["points"] = 2;
  std::ostringstream log;
  runner::run(cfg, log);
  const json doc = json::parse(slurp(path));
  CHECK(doc["metadata"]["version"] == runner::kVersion);
  CHECK(doc["metadata"]["columns"].size() == 18);
  CHECK(doc["metadata"]["residuals"].size() == 2);
  CHECK(doc["rows"].size() == 2);
  CHECK(doc["rows"][0]["sweep_value"] == 0.0);
  CHECK(doc["rows"][0].contains("entropy_q"));
}

TEST_CASE("linearized-theory sweep emits the bare frequencies at g=0") {
  const std::string path = out_path("hp.csv");
  const json cfg = {{"subcommand", "hp"},
                    {"model", {{"N", 10}, {"omega_q", 0.5}}},
                    {"sweep", {{"variable", "gamma"}, {"from", 0.0}, {"to", 0.5}, {"points", 3}}},
                    {"output", {{"path", path}}}};
  std::ostringstream log;
  const auto out = runner::run(cfg, log);
  CHECK(out.table.columns.front() == "sweep_value");
  const auto& row0 = out.table.rows.at(0);
  CHECK(std::get<double>(row0[1]) == doctest::Approx(1.0));   // omega_plus
  CHECK(std::get<double>(row0[2]) == doctest::Approx(0.5));   // omega_minus
  CHECK(std::get<double>(row0[3]) == doctest::Approx(0.0));   // photon number
  CHECK(std::get<bool>(row0[5]));
}

TEST_CASE("spectrum sweep shows the collective manifold structure") {
  const std::string path = out_path("spectrum.csv");
  const json cfg = {{"subcommand", "spectrum"},
                    {"model", {{"N", 2}, {"omega_q", 1.0}, {"delta", 0.0}}},
                    {"sweep", {{"variable", "gamma"}, {"from", 3.5}, {"to", 3.5}, {"points", 1}}},
                    {"solver", {{"k", 6}}},
                    {"output", {{"path", path}}}};
  std::ostringstream log;
  const auto out = runner::run(cfg, log);
  const auto& row = out.table.rows.at(0);
  // columns: sweep_value, E0, dE_1..dE_5, n_max, converged
  const double de3 = std::get<double>(row[4]);
  const double de4 = std::get<double>(row[5]);
  CHECK(de3 < 0.1);        // four quasi-degenerate levels
  CHECK(de4 > 0.9);        // then a gap of about the resonator quantum
  CHECK(std::get<bool>(row.back()));
}

TEST_CASE("bo-potential table") {
  const std::string path = out_path("bo.csv");
  const json cfg = {{"subcommand", "bo-potential"},
                    {"model", {{"N", 1}, {"omega_q", 1.0}, {"gamma", 3.0}}},
                    {"bo", {{"k", 2}, {"points", 101}}},
                    {"output", {{"path", path}}}};
  std::ostringstream log;
  const auto out = runner::run(cfg, log);
  CHECK(out.table.columns == std::vector<std::string>{"alpha", "E_0", "E_1"});
  CHECK(out.table.rows.size() == 101);
  // symmetric default grid
  CHECK(std::get<double>(out.table.rows.front()[0]) ==
        doctest::Approx(-std::get<double>(out.table.rows.back()[0])));
}

TEST_CASE("qfunc table covers the sphere grid") {
  const std::string path = out_path("qfunc.csv");
  const json cfg = {{"subcommand", "qfunc"},
                    {"model", {{"N", 2}, {"omega_q", 0.5}, {"gamma", 1.0}}},
                    {"solver", {{"k", 1}, {"fock", 30}}},
                    {"qfunc", {{"n_theta", 7}, {"n_phi", 9}}},
                    {"output", {{"path", path}}}};
  std::ostringstream log;
  const auto out = runner::run(cfg, log);
  CHECK(out.table.rows.size() == 7 * 9);
  for (const auto& row : out.table.rows) {
    const double q = std::get<double>(row[2]);
    CHECK(q >= -1e-12);
    CHECK(q <= 1.0 + 1e-12);
  }
}

TEST_CASE("disorder ensemble") {
  const std::string path = out_path("disorder.csv");
  json cfg = {{"subcommand", "disorder"},
              {"model", {{"N", 2}, {"omega_q", 0.5}, {"delta", 0.0}}},
              {"sweep", {{"variable", "gamma"}, {"from", 0.5}, {"to", 1.5}, {"points", 2}}},
              {"solver", {{"k", 2}, {"fock", 40}}},
              {"disorder", {{"seeds", 3}, {"seed", 99}, {"w_g", 0.3}, {"w_omega_q", 0.0}}},
              {"output", {{"path", path}}}};
  SUBCASE("per-seed rows plus mean rows, reproducibly") {
    std::ostringstream log;
    const auto out = runner::run(cfg, log);
    CHECK(out.table.rows.size() == 3 * 2 + 2);
    const std::string first = slurp(path);
    runner::run(cfg, log);
    CHECK(slurp(path) == first);
    // mean rows are tagged seed = -1
    CHECK(std::get<std::int64_t>(out.table.rows.back()[0]) == -1);
    // disorder actually changes the answer between seeds at the same point
    const double n_seed0 = std::get<double>(out.table.rows[0][4]);
    const double n_seed1 = std::get<double>(out.table.rows[2][4]);
    CHECK(n_seed0 != n_seed1);
  }
  SUBCASE("missing seed is a config error") {
    cfg["disorder"].erase("seed");
    std::ostringstream log;
    CHECK_THROWS_AS(runner::run(cfg, log), ConfigError);
  }
}

TEST_CASE("two-mode sweep with a decoupled high mode matches the single mode") {
  const std::string path2 = out_path("two_mode.csv");
  const json cfg2 = {{"subcommand", "two-mode"},
                     {"model", {{"N", 2}, {"omega_q", 0.5}, {"delta", 0.0}}},
                     {"sweep", {{"variable", "gamma"}, {"from", 1.0}, {"to", 1.0}, {"points", 1}}},
                     {"solver", {{"k", 2}, {"fock", 20}}},
                     {"two_mode",
                      {{"omega_ex", 21.56},
                       {"g12_over_g", 0.0},
                       {"g21_over_g", 1.0},
                       {"g22_over_g", 0.0},
                       {"fock_high", 4}}},
                     {"output", {{"path", path2}}}};
  std::ostringstream log;
  const auto out2 = runner::run(cfg2, log);

  const std::string path1 = out_path("one_mode.csv");
  json cfg1 = ground_sweep_config(path1);
  cfg1["sweep"] = {{"variable", "gamma"}, {"from", 1.0}, {"to", 1.0}, {"points", 1}};
  cfg1["solver"] = {{"k", 2}, {"fock", 20}};
  const auto out1 = runner::run(cfg1, log);

  const double e0_two = std::get<double>(out2.table.rows[0][1]);
  const double e0_one = std::get<double>(out1.table.rows[0][1]);
  CHECK(e0_two == doctest::Approx(e0_one).epsilon(1e-9));
  const double n_high = std::get<double>(out2.table.rows[0][4]);
  CHECK(n_high == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("circuit compilation commands") {
  SUBCASE("charge circuit single row") {
    const std::string path = out_path("charge.csv");
    const json cfg = {{"subcommand", "circuit-charge"},
                      {"circuit",
                       {{"C_r_fF", 10.0},
                        {"C_q_fF", 0.5},
                        {"C_g_fF", 10.0},
                        {"L_r_nH", 1.0},
                        {"EJ_over_h_GHz", 2.0},
                        {"n_g", 0.5},
                        {"N", 1}}},
                      {"output", {{"path", path}}}};
    std::ostringstream log;
    const auto out = runner::run(cfg, log);
    REQUIRE(out.table.rows.size() == 1);
    const auto& row = out.table.rows[0];
    auto col = [&](const std::string& name) {
      for (std::size_t i = 0; i < out.table.columns.size(); ++i)
        if (out.table.columns[i] == name) return std::get<double>(row[i]);
      FAIL("missing column ", name);
      return 0.0;
    };
    CHECK(col("Cg_over_Cr") == doctest::Approx(1.0));
    CHECK(std::abs(col("delta_over_D")) < 1e-10);
    CHECK(col("zeta") > 1.0);  // ultrastrong in the charge regime
    CHECK(col("zeta_transmon_formula") < 1.0);
    CHECK(col("omega_q_GHz") == doctest::Approx(2.0).epsilon(0.1));  // ~ E_J/h
  }
  SUBCASE("charge circuit ratio sweep") {
    const std::string path = out_path("charge_sweep.csv");
    const json cfg = {{"subcommand", "circuit-charge"},
                      {"circuit", {{"C_r_fF", 10.0}, {"C_q_fF", 0.5}, {"EJ_over_h_GHz", 2.0}}},
                      {"sweep",
                       {{"variable", "Cg_over_Cr"}, {"from", 0.02}, {"to", 2.0}, {"points", 8}}},
                      {"output", {{"path", path}}}};
    std::ostringstream log;
    const auto out = runner::run(cfg, log);
    CHECK(out.table.rows.size() == 8);
  }
  SUBCASE("flux circuit row satisfies the inductance relation") {
    const std::string path = out_path("flux.csv");
    const json cfg = {{"subcommand", "circuit-flux"},
                      {"flux",
                       {{"C_r_fF", 250.0},
                        {"L_r_nH", 1.0},
                        {"L_g_nH", 1.5},
                        {"Phi_q0_over_Phi0", 0.5},
                        {"omega_q_GHz", 2.5},
                        {"N", 2}}},
                      {"output", {{"path", path}}}};
    std::ostringstream log;
    const auto out = runner::run(cfg, log);
    const auto& row = out.table.rows.at(0);
    const double g_ghz = std::get<double>(row[3]);
    const double d_ghz = std::get<double>(row[4]);
    const double wr_ghz = std::get<double>(row[1]);
    CHECK(d_ghz * wr_ghz / (g_ghz * g_ghz) == doctest::Approx(2.5).epsilon(1e-9));
  }
}

TEST_CASE("config validation and error reporting") {
  SUBCASE("dry run reports the resolved problem size") {
    const json cfg = {{"subcommand", "ground-sweep"},
                      {"model", {{"N", 10}, {"omega_q", 0.5}}},
                      {"sweep", {{"variable", "gamma"}, {"from", 0.0}, {"to", 2.0}, {"points", 3}}}};
    const std::string report = runner::validate_config(cfg);
    CHECK(report.find("n_max=180") != std::string::npos);
    CHECK(report.find("dim=185344") != std::string::npos);
    CHECK(report.find("no problems found") != std::string::npos);
  }
  SUBCASE("missing disorder seed is listed as a violation") {
    const json cfg = {{"subcommand", "disorder"},
                      {"model", {{"N", 2}}},
                      {"sweep", {{"from", 0.0}, {"to", 1.0}, {"points", 2}}},
                      {"disorder", {{"seeds", 2}}}};
    const std::string report = runner::validate_config(cfg);
    CHECK(report.find("disorder.seed") != std::string::npos);
  }
  SUBCASE("flux-circuit source reports a positive offset") {
    const json cfg = {{"subcommand", "ground-sweep"},
                      {"model", {{"source", "flux-circuit"}, {"N", 2}}},
                      {"flux", {{"L_r_nH", 1.0}, {"L_g_nH", 1.5}, {"Phi_q0_over_Phi0", 0.5}}},
                      {"sweep", {{"from", 0.0}, {"to", 1.0}, {"points", 2}}}};
    const std::string report = runner::validate_config(cfg);
    CHECK(report.find("delta > 0") != std::string::npos);
  }
  SUBCASE("field errors carry the field path") {
    std::ostringstream log;
    json cfg = ground_sweep_config(out_path("unused.csv"));
    cfg["sweep"]["points"] = "many";
    try {
      runner::run(cfg, log);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("sweep.points") != std::string::npos);
    }
    cfg = ground_sweep_config(out_path("unused.csv"));
    cfg.erase("sweep");
    CHECK_THROWS_AS(runner::run(json{{"subcommand", "ground-sweep"}}, log), ConfigError);
    CHECK_THROWS_AS(runner::run(json{{"subcommand", "bogus"}}, log), ConfigError);
  }
  SUBCASE("exit code mapping") {
    std::ostringstream log, err;
    CHECK(runner::run_cli(json{{"subcommand", "bogus"}}, log, err) == runner::kBadConfig);
    CHECK(err.str().find("config error") != std::string::npos);
    const json ok = ground_sweep_config(out_path("exit0.csv"));
    CHECK(runner::run_cli(ok, log, err) == runner::kOk);
  }
  SUBCASE("config file loader reports parse errors") {
    const std::string path = out_path("broken.json");
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(runner::load_config_file(path), ConfigError);
    CHECK_THROWS_AS(runner::load_config_file("no/such/file.json"), ConfigError);
  }
}
