#pragma once

#include "ocp/consumption.hpp"
#include "ocp/market_params.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocp {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat run configuration: model constants plus run controls. All rates are
// per year and all times in years.
struct RunConfig {
    MarketParams params;
    long n_paths = 10000;
    int n_steps = 500;
    std::uint64_t master_seed = 42;
    double confidence = 0.95;
    std::string output_dir = "out";

    // command-specific options
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    std::vector<int> convergence_steps = {125, 250, 500, 1000};
    std::optional<double> verify_lambda_override; // negative-control hook

    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

nlohmann::json soft_solution_json(const SoftSolution& solution);

} // namespace ocp
