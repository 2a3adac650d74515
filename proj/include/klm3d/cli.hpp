#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace klm3d {

// Parsed command line. String-typed enum fields are validated when the
// command runs so a bad value reports through the normal SchemaError path.
struct RunConfig {
    std::string subcommand;

    std::string task;
    std::string modality = "Controller";

    std::string scenario_path;
    std::string params_path;
    std::vector<std::string> log_paths;
    std::string predictions_path;
    std::string averages_path;
    std::string samples_path;
    std::string model_kind;
    std::string out_path;

    std::string noise = "gaussian:0.05";
    double failure_rate = 0.0;
    double outlier_rate = 0.0;
    double outlier_multiplier = 3.0;
    int participants = 1;
    std::uint64_t seed = 1;

    std::string pct_form = "symmetric";
    std::string tost_ref = "vs-predicted";
    double bound = 0.20;
    double outlier_sd = 2.0;
    bool gate = false;
    bool stamp = false;
};

// Runs one subcommand and maps exceptions to the documented exit codes:
// 0 ok, 2 parse/schema, 3 data/join, 4 gate failure. Usage errors (exit 1)
// are handled by the flag parser before this is called.
int run_command(const RunConfig& config);

} // namespace klm3d
