#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "limcom/error.hpp"
#include "limcom_app/commands.hpp"
#include "limcom_app/config.hpp"

using namespace limcom;
using namespace limcom::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("limcom_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(LIMCOM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, DefaultsAreBaseline) {
  RunConfig cfg;
  EXPECT_EQ(cfg.params, ModelParams{});
  EXPECT_EQ(cfg.boundary_steps, 256);
}

TEST(Config, FileAndOverrides) {
  const auto dir = scratch_dir("config");
  std::ofstream(dir / "run.cfg") << "# impatient agent\nrho = 0.07\n\nT=20   # shorter\nseed=9\n";
  RunConfig cfg;
  load_config_file(cfg, dir / "run.cfg");
  apply_assignment(cfg, "sigma=0.12");
  EXPECT_EQ(cfg.params.rho, 0.07);
  EXPECT_EQ(cfg.params.T, 20.0);
  EXPECT_EQ(cfg.params.sigma, 0.12);
  EXPECT_EQ(cfg.seed, 9u);
}

TEST(Config, Errors) {
  RunConfig cfg;
  for (const char* bad : {"nope=1", "rho=abc", "paths=-3", "boundary_rule=simpson", "rho"}) {
    try {
      apply_assignment(cfg, bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::CONFIG_ERROR) << bad;
    }
  }
  EXPECT_THROW(load_config_file(cfg, "/nonexistent/x.cfg"), Error);
  cfg.boundary_steps = 0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Config, HashTracksEveryKnob) {
  RunConfig a, b;
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed = 43;
  EXPECT_NE(a.hash(), b.hash());
  b = a;
  b.params.mu = 0.0200000001;
  EXPECT_NE(a.hash(), b.hash());
  b = a;
  b.out_dir = "/elsewhere";  // output location is not part of the run
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Error(ErrorCode::RHO_HAT_NONPOSITIVE, "")), kInvalidParameters);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::CONFIG_ERROR, "")), kInvalidParameters);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::W_INFEASIBLE, "")), kInfeasiblePromise);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::PSOR_NOT_CONVERGED, "")), kRuntimeFailure);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kRuntimeFailure);
}

TEST(Exact, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -5.0, 1e-300, 0.48287303425612}) EXPECT_EQ(std::strtod(exact(x).c_str(), nullptr), x);
  EXPECT_EQ(exact(0.5), "0.5");
}

TEST(Commands, Boundary) {
  RunConfig cfg;
  cfg.out_dir = scratch_dir("boundary");
  std::ostringstream log;
  EXPECT_EQ(cmd_boundary(cfg, log), kSuccess);
  const auto lines = read_lines(cfg.out_dir / "boundary.csv");
  ASSERT_EQ(lines.size(), 2u + 257u);
  EXPECT_EQ(lines[0], "# config_hash=" + cfg.hash());
  EXPECT_EQ(lines[1], "t,z_star");
  EXPECT_EQ(lines.back(), "30,1");
  EXPECT_NE(log.str().find("z*(0) = 0.48287"), std::string::npos);
}

TEST(Commands, FirstBestFlatWhenRatesEqual) {
  RunConfig cfg;
  cfg.out_dir = scratch_dir("first_best");
  cfg.sim_steps = 60;
  std::ostringstream log;
  EXPECT_EQ(cmd_first_best(cfg, log), kSuccess);
  const auto lines = read_lines(cfg.out_dir / "first_best.csv");
  ASSERT_EQ(lines[1], "t,Y,C_FB,C_star");
  std::string first;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    std::stringstream row(lines[i]);
    std::string t, y, fb;
    std::getline(row, t, ',');
    std::getline(row, y, ',');
    std::getline(row, fb, ',');
    if (first.empty()) first = fb;
    EXPECT_EQ(fb, first);
  }
  EXPECT_NEAR(std::stod(first), 1.321750, 1e-5);
}

TEST(Commands, FirstBestExceededUnderRisingIncome) {
  RunConfig cfg;
  cfg.out_dir = scratch_dir("first_best_rising");
  cfg.sim_steps = 300;
  cfg.seed = 2;  // path 0 ends with income near 2.7
  std::ostringstream log;
  cmd_first_best(cfg, log);
  const auto j = nlohmann::json::parse(slurp(cfg.out_dir / "first_best.json"));
  EXPECT_TRUE(j["c_star_exceeds_first_best_at_end"].get<bool>());
}

TEST(Commands, SimulateIsRepeatable) {
  RunConfig cfg;
  cfg.paths = 400;
  cfg.sim_steps = 100;
  cfg.csv_paths = 2;
  cfg.out_dir = scratch_dir("sim_a");
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(cfg, log), kSuccess);
  const auto first = slurp(cfg.out_dir / "summary.json");
  EXPECT_TRUE(fs::exists(cfg.out_dir / "contract_path_1.csv"));
  cfg.out_dir = scratch_dir("sim_b");
  EXPECT_EQ(cmd_simulate(cfg, log), kSuccess);
  EXPECT_EQ(first, slurp(cfg.out_dir / "summary.json"));
  const auto j = nlohmann::json::parse(first);
  EXPECT_TRUE(j["lambda_star"].is_string());
  EXPECT_EQ(j["monte_carlo"]["paths"].get<int>(), 400);
}

TEST(Commands, SimulateImpatient) {
  RunConfig cfg;
  cfg.params.rho = 0.07;
  cfg.paths = 200;
  cfg.sim_steps = 60;
  cfg.csv_paths = 1;
  cfg.out_dir = scratch_dir("sim_impatient");
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(cfg, log), kSuccess);
  EXPECT_GT(read_lines(cfg.out_dir / "contract_path_0.csv").size(), 60u);
}

TEST(Commands, ValueAndInfinite) {
  RunConfig cfg;
  cfg.out_dir = scratch_dir("value");
  cfg.sim_steps = 60;
  std::ostringstream log;
  EXPECT_EQ(cmd_value(cfg, log), kSuccess);
  EXPECT_EQ(read_lines(cfg.out_dir / "value_surface.csv")[1], "t,z,Q,g");
  EXPECT_EQ(cmd_infinite(cfg, log), kSuccess);
  const auto j = nlohmann::json::parse(slurp(cfg.out_dir / "infinite.json"));
  EXPECT_NEAR(std::stod(j["promised_value_check"].get<std::string>()), -5.0, 1e-9);
}

TEST(Cli, InvalidParametersExitTwo) {
  const auto dir = scratch_dir("cli_invalid");
  EXPECT_EQ(run_cli("boundary --set sigma=0.2 --out " + dir.string(), dir / "log.txt"), 2);
  EXPECT_NE(slurp(dir / "log.txt").find("RHO_HAT_NONPOSITIVE"), std::string::npos);
  EXPECT_EQ(run_cli("boundary --set bogus=1 --out " + dir.string(), dir / "log.txt"), 2);
}

TEST(Cli, InfeasiblePromiseExitThree) {
  const auto dir = scratch_dir("cli_infeasible");
  EXPECT_EQ(run_cli("simulate --set w=-9 --paths 10 --steps 20 --out " + dir.string(), dir / "log.txt"), 3);
  EXPECT_NE(slurp(dir / "log.txt").find("W_INFEASIBLE"), std::string::npos);
}

TEST(Cli, BoundaryLongHorizon) {
  const auto dir = scratch_dir("cli_long");
  ASSERT_EQ(run_cli("boundary --set T=200 --set boundary_steps=1024 --out " + dir.string(), dir / "log.txt"), 0);
  const auto log = slurp(dir / "log.txt");
  const auto pos = log.find("z*(0) = ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(log.substr(pos + 8)), 0.435571, 1e-3);
}
