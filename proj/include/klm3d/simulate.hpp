#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "klm3d/scenario.hpp"
#include "klm3d/stats.hpp"

namespace klm3d {

enum class NoiseKind { none, gaussian, lognormal };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

// Multiplicative noise around the predicted time, plus optional failure
// and outlier injection.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double scale = 0.05;
    double failure_rate = 0.0;
    double outlier_rate = 0.0;
    double outlier_multiplier = 3.0;

    void validate() const;
};

// Synthetic trial logs: actual = predicted * (1 + eps) per trial, the same
// eps across that trial's phases. Each (participant, trial) record draws
// from its own counter-derived substream, so results are independent of
// scheduling and bit-identical between the parallel and serial versions.
std::vector<TrialRecord> simulate_logs(const Scenario& scenario, const OperatorParams& params,
                                       const NoiseSpec& noise, std::uint64_t seed,
                                       int participants = 1);
std::vector<TrialRecord> simulate_logs_serial(const Scenario& scenario,
                                              const OperatorParams& params,
                                              const NoiseSpec& noise, std::uint64_t seed,
                                              int participants = 1);

} // namespace klm3d
