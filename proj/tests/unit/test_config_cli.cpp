#include "fracham/cli.hpp"
#include "fracham/config.hpp"
#include "fracham/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fracham;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracham_test_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

// Small problem overrides so that end-to-end runs take seconds.
const std::vector<std::string> kSmall{"problem.truncation_R=4", "problem.n_nodes=513", "solver.multistart=2",
                                      "embedding.samples=20"};

} // namespace

TEST_CASE("defaults equal the reference configuration") {
  const RunConfig rc = parse_run_config("");
  CHECK(rc.alpha == 0.75);
  CHECK(rc.n_nodes == 2049);
  CHECK(rc.l_max == 100.0);
  CHECK(rc.lambda_list == std::vector<double>{10.0, 100.0, 1000.0, 10000.0});
  CHECK_FALSE(rc.c_inf.has_value());
  CHECK(rc.seed == 20240601u);
  const ProblemConfig pc = build_problem(rc);
  CHECK(pc.grid.h() == doctest::Approx(1.0 / 128.0));
}

TEST_CASE("sections, lists, booleans and auto values parse") {
  const std::string text = "[problem]\nalpha = 0.8\nn_components = 2\n"
                           "[sweep]\nlambda_list = 1, 2,3\nwarm_start = false\n"
                           "[embedding]\nc_inf = 0.9\n"
                           "[operators]\nsizes = 64,128\n";
  const RunConfig rc = parse_run_config(text);
  CHECK(rc.alpha == 0.8);
  CHECK(rc.n_components == 2);
  CHECK(rc.lambda_list == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_FALSE(rc.warm_start);
  REQUIRE(rc.c_inf.has_value());
  CHECK(*rc.c_inf == 0.9);
  CHECK(rc.operator_sizes == std::vector<std::size_t>{64, 128});
  CHECK_FALSE(parse_run_config("[embedding]\nc_inf = auto\n").c_inf.has_value());
}

TEST_CASE("overrides take precedence over file values") {
  const RunConfig rc = parse_run_config("[problem]\nlambda = 5\n", {"problem.lambda=7", "run.seed=3"});
  CHECK(rc.lambda == 7.0);
  CHECK(rc.seed == 3u);
  CHECK_THROWS_AS(parse_run_config("", {"lambda=7"}), ConfigError);
}

TEST_CASE("malformed input raises configuration errors with context") {
  auto message = [](const std::string& text) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[problem]\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(message("[problem]\nalpha = abc\n").find("problem.alpha") != std::string::npos);
  CHECK(message("[problem]\nalpha = 0.7\n[oops\n").find("line 3") != std::string::npos);
  CHECK(message("[solver]\nmultistart = -2\n").find("solver.multistart") != std::string::npos);
  CHECK(message("[sweep]\nwarm_start = maybe\n").find("sweep.warm_start") != std::string::npos);
  CHECK_THROWS_AS(build_problem(parse_run_config("[problem]\nalpha = 0.4\n")), ConfigError);
  CHECK_THROWS_AS(build_problem(parse_run_config("[potential]\nname = cubic\n")), ConfigError);
  CHECK_THROWS_AS(build_problem(parse_run_config("[weight]\nJ_hi = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(load_run_config(fs::path("/nonexistent/file.ini")), ConfigError);
}

TEST_CASE("serialised configuration round trips") {
  const RunConfig a = parse_run_config("[problem]\nalpha = 0.8\n[embedding]\nc_inf = 0.95\n", {"run.seed=11"});
  const RunConfig b = parse_run_config(to_ini(a));
  CHECK(to_ini(b) == to_ini(a));
  CHECK(to_json_text(b) == to_json_text(a));
  const auto j = nlohmann::json::parse(to_json_text(a));
  CHECK(j["problem"]["alpha"] == 0.8);
  CHECK(j["run"]["seed"] == 11);
}

TEST_CASE("reference config file matches the built-in defaults") {
  const fs::path p = fs::path(FRACHAM_SOURCE_DIR) / "configs" / "reference.ini";
  CHECK(to_ini(load_run_config(p)) == to_ini(parse_run_config("")));
}

TEST_CASE("validate command writes a report and uses exit codes") {
  std::ostringstream out, err;
  const fs::path ok = fresh_dir("validate_ok");
  CHECK(run({"validate", std::nullopt, ok, std::nullopt, kSmall}, out, err) == kExitOk);
  const auto j = read_json(ok / "validation.json");
  CHECK(j["all_pass"] == true);
  CHECK(j["checks"].size() == 9);

  const fs::path bad = fresh_dir("validate_bad");
  auto ov = kSmall;
  ov.push_back("weight.J_hi=1.5");
  CHECK(run({"validate", std::nullopt, bad, std::nullopt, ov}, out, err) == kExitValidation);
  CHECK(read_json(bad / "validation.json")["all_pass"] == false);
}

TEST_CASE("configuration failures exit with code 2 and an error record") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("config_error");
  CHECK(run({"solve", std::nullopt, dir, std::nullopt, {"problem.alpha=0.4"}}, out, err) == kExitConfig);
  const auto j = read_json(dir / "error.json");
  CHECK(j["exit_code"] == 2);
  CHECK(j["error_type"] == "config");
  CHECK(err.str().find("alpha") != std::string::npos);
  CHECK(run({"nonsense", std::nullopt, dir, std::nullopt, {}}, out, err) == kExitConfig);
}

TEST_CASE("truncation boundary failures exit with code 4") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("boundary");
  auto ov = kSmall;
  ov.push_back("solver.boundary_layer=2.9");
  ov.push_back("problem.lambda=10");
  CHECK(run({"solve", std::nullopt, dir, std::nullopt, ov}, out, err) == kExitConvergence);
  CHECK(read_json(dir / "error.json")["error_type"] == "convergence");
}

TEST_CASE("output directory from the environment") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("env_dir");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  const int code = run({"validate", std::nullopt, std::nullopt, std::nullopt, kSmall}, out, err);
  ::unsetenv(kOutputDirEnv);
  CHECK(code == kExitOk);
  CHECK(fs::exists(dir / "validation.json"));
}

TEST_CASE("sweep command writes the table and profiles") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("sweep");
  REQUIRE(run({"sweep", std::nullopt, dir, std::uint64_t{5}, kSmall}, out, err) == kExitOk);
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (line == "lambda,c_lambda,x_norm_sq,tail_mass_fraction,h_alpha_distance,bound_ratio") {
      header = true;
      continue;
    }
    ++rows;
  }
  CHECK(header);
  CHECK(rows == 4);
  CHECK(fs::exists(dir / "sweep_summary.txt"));
  CHECK(fs::exists(dir / "u_tilde.txt"));
  CHECK(fs::exists(dir / "u_lambda_10000.txt"));
  const auto j = read_json(dir / "sweep.json");
  CHECK(j["config"]["run"]["seed"] == 5);
}

TEST_CASE("solve and bvp commands write their outputs") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("solve");
  REQUIRE(run({"solve", std::nullopt, dir, std::nullopt, kSmall}, out, err) == kExitOk);
  CHECK(fs::exists(dir / "ground_state.json"));
  CHECK(fs::exists(dir / "u_lambda.txt"));
  REQUIRE(run({"bvp", std::nullopt, dir, std::nullopt, kSmall}, out, err) == kExitOk);
  CHECK(fs::exists(dir / "bvp.json"));
  CHECK(fs::exists(dir / "u_tilde.txt"));
}

TEST_CASE("operators command") {
  std::ostringstream out, err;
  const fs::path dir = fresh_dir("operators");
  REQUIRE(run({"operators", std::nullopt, dir, std::nullopt, {"operators.sizes=128,256,512"}}, out, err) ==
          kExitOk);
  CHECK(fs::exists(dir / "operators.csv"));
  const auto rows = operator_convergence_study(0.7, {128, 256, 512});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ratio == 0.0);
  CHECK(rows[2].ratio > 1.7);
  CHECK(adjointness_defect(0.7, 20, 1) < 1e-10);
  CHECK(stiffness_vs_fourier(0.75).rel_diff < 0.02);
}
