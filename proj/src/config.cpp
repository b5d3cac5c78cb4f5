#include "ocp/config.hpp"

#include <fstream>

namespace ocp {

namespace {

double get_number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw config_error(std::string("config: ") + key + " must be a number");
    return j.at(key).get<double>();
}

} // namespace

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
    if (n_paths < 2) throw config_error("config: n_paths must be >= 2");
    if (n_steps < 1) throw config_error("config: n_steps must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw config_error("config: confidence must lie in (0,1)");
    }
    if (output_dir.empty()) throw config_error("config: output_dir must not be empty");
    for (int s : convergence_steps) {
        if (s < 1) throw config_error("config: convergence_steps entries must be >= 1");
    }
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    MarketParams& p = cfg.params;
    try {
        p.r_n = get_number(j, "r_n", p.r_n);
        p.pi_hat = get_number(j, "pi_hat", p.pi_hat);
        p.pi_tilde = get_number(j, "pi_tilde", p.pi_tilde);
        p.delta = get_number(j, "delta", p.delta);
        p.gamma = get_number(j, "gamma", p.gamma);
        p.eps = get_number(j, "eps", p.eps);
        p.K = get_number(j, "K", p.K);
        p.x_a = get_number(j, "x_a", p.x_a);
        p.w_a = get_number(j, "w_a", p.w_a);
        p.a = get_number(j, "a", p.a);
        p.T = get_number(j, "T", p.T);
        p.levy.n1_intensity = get_number(j, "n1_intensity", p.levy.n1_intensity);
        p.levy.n2_intensity = get_number(j, "n2_intensity", p.levy.n2_intensity);
        if (j.contains("n1_mark")) {
            const auto& m = j.at("n1_mark");
            const std::string type = m.at("type").get<std::string>();
            const double value = m.at("value").get<double>();
            if (type == "exponential") {
                p.levy.n1_mark = MarkDistribution::exponential(value);
            } else if (type == "constant") {
                p.levy.n1_mark = MarkDistribution::constant(value);
            } else {
                throw config_error("config: n1_mark.type must be 'exponential' or 'constant'");
            }
        }
        if (j.contains("n_paths")) cfg.n_paths = j.at("n_paths").get<long>();
        if (j.contains("n_steps")) cfg.n_steps = j.at("n_steps").get<int>();
        if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        cfg.confidence = get_number(j, "confidence", cfg.confidence);
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("sweep_parameter")) {
            cfg.sweep_parameter = j.at("sweep_parameter").get<std::string>();
        }
        if (j.contains("sweep_values")) {
            cfg.sweep_values = j.at("sweep_values").get<std::vector<double>>();
        }
        if (j.contains("convergence_steps")) {
            cfg.convergence_steps = j.at("convergence_steps").get<std::vector<int>>();
        }
        if (j.contains("verify_lambda_override") && !j.at("verify_lambda_override").is_null()) {
            cfg.verify_lambda_override = j.at("verify_lambda_override").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    const MarketParams& p = cfg.params;
    nlohmann::json j{
        {"r_n", p.r_n},
        {"pi_hat", p.pi_hat},
        {"pi_tilde", p.pi_tilde},
        {"delta", p.delta},
        {"gamma", p.gamma},
        {"eps", p.eps},
        {"K", p.K},
        {"x_a", p.x_a},
        {"w_a", p.w_a},
        {"a", p.a},
        {"T", p.T},
        {"n1_intensity", p.levy.n1_intensity},
        {"n1_mark",
         {{"type", p.levy.n1_mark.kind == MarkKind::Exponential ? "exponential" : "constant"},
          {"value", p.levy.n1_mark.param}}},
        {"n2_intensity", p.levy.n2_intensity},
        {"n_paths", cfg.n_paths},
        {"n_steps", cfg.n_steps},
        {"master_seed", cfg.master_seed},
        {"confidence", cfg.confidence},
        {"output_dir", cfg.output_dir},
        {"convergence_steps", cfg.convergence_steps},
    };
    if (!cfg.sweep_parameter.empty()) j["sweep_parameter"] = cfg.sweep_parameter;
    if (!cfg.sweep_values.empty()) j["sweep_values"] = cfg.sweep_values;
    if (cfg.verify_lambda_override) j["verify_lambda_override"] = *cfg.verify_lambda_override;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: parse failure in ") + path + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json soft_solution_json(const SoftSolution& solution) {
    return nlohmann::json{
        {"r_hat", solution.r_hat},
        {"gamma_hat", solution.gamma_hat},
        {"B_hat", solution.B_hat},
        {"C_hat", solution.C_hat},
        {"lambda_star", solution.lambda_star},
        {"schedule",
         {{"t_terminal_level", solution.schedule.terminal_level()},
          {"rate", solution.schedule.rate()}}},
    };
}

} // namespace ocp
