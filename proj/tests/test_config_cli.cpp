#include "ocp/cli_commands.hpp"
#include "ocp/config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace ocp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OCP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
    const std::string path = "cli_cfg_" + name + ".json";
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

RunConfig small_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.n_paths = 2000;
    cfg.n_steps = 100;
    cfg.master_seed = 7;
    cfg.output_dir = out_dir;
    return cfg;
}

} // namespace

TEST_CASE("config round-trips through JSON") {
    RunConfig cfg;
    cfg.params.gamma = -0.5;
    cfg.params.levy.n1_mark = MarkDistribution::constant(0.4);
    cfg.n_paths = 1234;
    cfg.master_seed = 99;
    cfg.sweep_parameter = "pi_tilde";
    cfg.sweep_values = {0.0, 0.1};
    cfg.verify_lambda_override = 2.5;
    const RunConfig back = config_from_json(config_to_json(cfg));
    CHECK(back == cfg);
}

TEST_CASE("config validation rejects out-of-range parameters") {
    nlohmann::json j = config_to_json(RunConfig{});
    j["gamma"] = 1.5;
    CHECK_THROWS_AS(config_from_json(j), config_error);
    j = config_to_json(RunConfig{});
    j["eps"] = 0.0;
    CHECK_THROWS_AS(config_from_json(j), config_error);
    j = config_to_json(RunConfig{});
    j["K"] = 0.5;
    CHECK_THROWS_AS(config_from_json(j), config_error);
    j = config_to_json(RunConfig{});
    j["n_paths"] = 1;
    CHECK_THROWS_AS(config_from_json(j), config_error);
    j = config_to_json(RunConfig{});
    j["n1_mark"]["type"] = "lognormal";
    CHECK_THROWS_AS(config_from_json(j), config_error);
}

TEST_CASE("solution JSON carries the wire-format fields") {
    const SoftSolution sol = optimal_consumption(MarketParams{});
    const nlohmann::json j = soft_solution_json(sol);
    CHECK(j.at("gamma_hat").get<double>() == doctest::Approx(-0.02));
    CHECK(j.at("B_hat").get<double>() == doctest::Approx(12.974425414002563));
    CHECK(j.at("schedule").at("rate").get<double>() == doctest::Approx(-0.02));
    CHECK(j.at("schedule").at("t_terminal_level").get<double>() ==
          doctest::Approx(sol.C_hat / sol.B_hat));
    CHECK(j.contains("r_hat"));
    CHECK(j.contains("C_hat"));
    CHECK(j.contains("lambda_star"));
}

TEST_CASE("cli solve writes the solution artifacts") {
    const std::string cfg_path =
        write_config("solve", config_to_json(small_config("cli_out_solve")));
    CHECK(run_cli("solve --config " + cfg_path) == 0);
    REQUIRE(fs::exists("cli_out_solve/solution.json"));
    REQUIRE(fs::exists("cli_out_solve/consumption.csv"));
    const nlohmann::json sol = nlohmann::json::parse(slurp("cli_out_solve/solution.json"));
    CHECK(sol.at("gamma_hat").get<double>() == doctest::Approx(-0.02));
    CHECK(sol.at("B_hat").get<double>() == doctest::Approx(12.974425414002563));
    // schedule CSV has n_steps + 1 rows plus the header
    std::ifstream csv("cli_out_solve/consumption.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 100 + 2);
}

TEST_CASE("cli rejects an invalid config with exit code 2") {
    nlohmann::json j = config_to_json(small_config("cli_out_bad"));
    j["gamma"] = 1.5;
    const std::string cfg_path = write_config("bad", j);
    CHECK(run_cli("solve --config " + cfg_path) == 2);
    CHECK(run_cli("verify --config " + cfg_path) == 2);
    CHECK(run_cli("solve --config does_not_exist.json") == 2);
}

TEST_CASE("cli simulate is deterministic and writes a consistent manifest") {
    RunConfig cfg = small_config("cli_out_sim");
    cfg.n_paths = 3;
    cfg.n_steps = 50;
    const std::string cfg_path = write_config("sim", config_to_json(cfg));
    CHECK(run_cli("simulate --config " + cfg_path) == 0);
    std::vector<std::string> first;
    for (int i = 0; i < 3; ++i) {
        const std::string f = "cli_out_sim/path_" + std::to_string(i) + ".csv";
        REQUIRE(fs::exists(f));
        first.push_back(slurp(f));
    }
    const nlohmann::json manifest =
        nlohmann::json::parse(slurp("cli_out_sim/manifest.json"));
    for (const auto& [file, hash] : manifest.at("artifacts").items()) {
        CHECK(file_content_hash(file) == hash.get<std::string>());
    }
    // second run reproduces the bytes
    CHECK(run_cli("simulate --config " + cfg_path) == 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(slurp("cli_out_sim/path_" + std::to_string(i) + ".csv") ==
              first[static_cast<std::size_t>(i)]);
    }
    // wage column follows the deterministic decay when randomness is off
    nlohmann::json det = config_to_json(cfg);
    det["pi_tilde"] = 0.0;
    det["n1_intensity"] = 0.0;
    det["n2_intensity"] = 0.0;
    det["output_dir"] = "cli_out_sim_det";
    det["n_paths"] = 2;
    CHECK(run_cli("simulate --config " + write_config("sim_det", det)) == 0);
    std::ifstream csv("cli_out_sim_det/path_0.csv");
    std::string line;
    std::getline(csv, line); // header
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const double t = std::stod(cell);
        std::getline(row, cell, ','); // B
        std::getline(row, cell, ','); // W
        CHECK(std::stod(cell) == doctest::Approx(std::exp(-0.02 * t)).epsilon(1e-12));
    }
}

TEST_CASE("cli verify passes the baseline and honors the tamper hook") {
    RunConfig cfg = small_config("cli_out_verify");
    cfg.n_paths = 20000;
    cfg.n_steps = 200;
    const std::string cfg_path = write_config("verify", config_to_json(cfg));
    CHECK(run_cli("verify --config " + cfg_path) == 0);
    const nlohmann::json report =
        nlohmann::json::parse(slurp("cli_out_verify/verify_report.json"));
    CHECK(report.at("overall_pass").get<bool>());
    CHECK(report.at("checks").contains("foc_identity"));
    CHECK(report.at("checks").contains("kernel_moments"));
    CHECK(report.at("wage_lemma_verdict").at("drift_detected").get<bool>());

    nlohmann::json tampered = config_to_json(cfg);
    tampered["verify_lambda_override"] = 1.9; // any wrong multiplier
    tampered["output_dir"] = "cli_out_verify_tampered";
    tampered["n_paths"] = 2000;
    const std::string tampered_path = write_config("verify_tampered", tampered);
    CHECK(run_cli("verify --config " + tampered_path) == 1);
}

TEST_CASE("cli sweep: volatility leaves the plan unchanged, floor shifts are affine") {
    RunConfig cfg = small_config("cli_out_sweep");
    cfg.n_paths = 500;
    const std::string base = write_config("sweep", config_to_json(cfg));
    CHECK(run_cli("sweep --config " + base + " --param pi_tilde --values 0,0.1,0.2") == 0);
    std::ifstream csv("cli_out_sweep/sweep_pi_tilde.csv");
    std::string line;
    std::getline(csv, line); // header
    std::vector<double> c_hat, c_start;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ','); // value
        std::getline(row, cell, ',');
        c_hat.push_back(std::stod(cell));
        std::getline(row, cell, ','); // lambda
        std::getline(row, cell, ',');
        c_start.push_back(std::stod(cell));
    }
    REQUIRE(c_hat.size() == 3);
    for (std::size_t i = 1; i < 3; ++i) {
        CHECK(std::abs(c_hat[i] - c_hat[0]) <= 1e-8 * std::abs(c_hat[0]));
        CHECK(std::abs(c_start[i] - c_start[0]) <= 1e-8 * std::abs(c_start[0]));
    }

    CHECK(run_cli("sweep --config " + base + " --param K --values 0,-1,-2") == 0);
    std::ifstream kcsv("cli_out_sweep/sweep_K.csv");
    std::getline(kcsv, line);
    std::vector<double> k_chat;
    while (std::getline(kcsv, line)) {
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        std::getline(row, cell, ',');
        k_chat.push_back(std::stod(cell));
    }
    REQUIRE(k_chat.size() == 3);
    CHECK(k_chat[1] - k_chat[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(k_chat[2] - k_chat[1] == doctest::Approx(1.0).epsilon(1e-10));

    CHECK(run_cli("sweep --config " + base + " --param turnips --values 1,2") == 2);
}

TEST_CASE("cli convergence writes a row per step count") {
    RunConfig cfg = small_config("cli_out_conv");
    cfg.n_paths = 500;
    cfg.convergence_steps = {50, 100};
    const std::string path = write_config("conv", config_to_json(cfg));
    CHECK(run_cli("convergence --config " + path) == 0);
    std::ifstream csv("cli_out_conv/convergence.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 3); // header + one row per step count
}
