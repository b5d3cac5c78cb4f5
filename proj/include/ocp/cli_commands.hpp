#pragma once

#include "ocp/config.hpp"

#include <string>

namespace ocp {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit-code contract: 0 success, 1 verification failure, 2 invalid
// input/config/IO, 3 infeasible model. Commands throw config_error/io_error/
// infeasible_error; main maps them to codes.
int cmd_simulate(const RunConfig& config);
int cmd_solve(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_convergence(const RunConfig& config);

// 64-bit FNV-1a of a file's bytes, hex-encoded; manifests record artifact
// hashes with it.
std::string file_content_hash(const std::string& path);

} // namespace ocp
