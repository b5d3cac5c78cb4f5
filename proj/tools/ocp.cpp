#include "ocp/cli_commands.hpp"
#include "ocp/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<std::string> out;
    std::optional<std::string> sweep_param;
    std::optional<std::string> sweep_values;
};

ocp::RunConfig resolve_config(const std::string& config_path, const CliOverrides& over) {
    ocp::RunConfig cfg = ocp::load_config(config_path);
    if (over.seed) cfg.master_seed = *over.seed;
    if (over.paths) cfg.n_paths = *over.paths;
    if (over.out) cfg.output_dir = *over.out;
    if (over.sweep_param) cfg.sweep_parameter = *over.sweep_param;
    if (over.sweep_values) {
        cfg.sweep_values.clear();
        std::string rest = *over.sweep_values;
        std::size_t pos = 0;
        while (pos < rest.size()) {
            std::size_t next = rest.find(',', pos);
            if (next == std::string::npos) next = rest.size();
            cfg.sweep_values.push_back(std::stod(rest.substr(pos, next - pos)));
            pos = next + 1;
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained optimal-consumption model: simulate, solve, verify"};
    app.set_version_flag("--version", ocp::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides over;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration JSON file")->required();
        sub->add_option_function<std::string>(
            "--seed", [&](const std::string& s) { over.seed = std::stoull(s); },
            "override master seed");
        sub->add_option_function<std::string>(
            "--paths", [&](const std::string& s) { over.paths = std::stol(s); },
            "override path count");
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& s) { over.out = s; },
            "override output directory");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "dump simulated paths as CSV");
    add_common(simulate);
    CLI::App* solve = app.add_subcommand("solve", "solve the soft-constraint plan");
    add_common(solve);
    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    add_common(verify);
    CLI::App* sweep = app.add_subcommand("sweep", "solve across one parameter's values");
    add_common(sweep);
    sweep->add_option_function<std::string>(
        "--param", [&](const std::string& s) { over.sweep_param = s; }, "parameter to sweep");
    sweep->add_option_function<std::string>(
        "--values", [&](const std::string& s) { over.sweep_values = s; },
        "comma-separated sweep values");
    CLI::App* convergence = app.add_subcommand("convergence", "Euler vs exact wage study");
    add_common(convergence);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ocp::RunConfig cfg = resolve_config(config_path, over);
        if (simulate->parsed()) return ocp::cmd_simulate(cfg);
        if (solve->parsed()) return ocp::cmd_solve(cfg);
        if (verify->parsed()) return ocp::cmd_verify(cfg);
        if (sweep->parsed()) return ocp::cmd_sweep(cfg);
        if (convergence->parsed()) return ocp::cmd_convergence(cfg);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ocp::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const ocp::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ocp::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
