#include "klm3d/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

#include "klm3d/rng.hpp"

namespace klm3d {

namespace {
// Floor applied after noise so actual times stay positive.
constexpr double kMinActualMs = 1e-3;
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::lognormal: return "lognormal";
    }
    throw SchemaError("unknown noise kind");
}

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "none") return NoiseKind::none;
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "lognormal") return NoiseKind::lognormal;
    throw SchemaError("unknown noise kind '" + s + "'");
}

void NoiseSpec::validate() const {
    if (!(scale >= 0.0)) throw SchemaError("noise scale must be >= 0");
    if (!(failure_rate >= 0.0) || !(failure_rate <= 1.0))
        throw SchemaError("failure rate must lie in [0, 1]");
    if (!(outlier_rate >= 0.0) || !(outlier_rate <= 1.0))
        throw SchemaError("outlier rate must lie in [0, 1]");
    if (!(outlier_multiplier > 1.0)) throw SchemaError("outlier multiplier must be > 1");
}

namespace {

std::string participant_label(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "P%02d", index + 1);
    return buf;
}

TrialRecord simulate_record(const ScenarioPrediction::Trial& prediction,
                            ModalityName modality, const std::string& participant,
                            const NoiseSpec& noise, std::uint64_t seed,
                            std::uint64_t stream) {
    SplitMix64 rng = SplitMix64::for_stream(seed, stream);
    const double u_fail = rng.uniform();
    const double u_outlier = rng.uniform();

    double eps = 0.0;
    switch (noise.kind) {
        case NoiseKind::none: break;
        case NoiseKind::gaussian: eps = noise.scale * rng.gaussian(); break;
        case NoiseKind::lognormal: eps = std::exp(noise.scale * rng.gaussian()) - 1.0; break;
    }
    const double multiplier = u_outlier < noise.outlier_rate ? noise.outlier_multiplier : 1.0;

    TrialRecord record;
    record.participant_id = participant;
    record.modality = modality;
    record.trial_id = prediction.trial_id;
    record.failed = u_fail < noise.failure_rate;
    record.predicted_total_ms = prediction.total_ms;
    record.predicted_phase_ms = prediction.per_phase_ms;
    record.actual_phase_ms.reserve(prediction.per_phase_ms.size());
    double total = 0.0;
    for (double phase_ms : prediction.per_phase_ms) {
        const double actual = std::max(phase_ms * (1.0 + eps) * multiplier, kMinActualMs);
        record.actual_phase_ms.push_back(actual);
        total += actual;
    }
    record.actual_total_ms = total;
    return record;
}

} // namespace

std::vector<TrialRecord> simulate_logs(const Scenario& scenario, const OperatorParams& params,
                                       const NoiseSpec& noise, std::uint64_t seed,
                                       int participants) {
    noise.validate();
    if (participants < 1) throw SchemaError("participant count must be >= 1");
    const ScenarioPrediction prediction = predict_scenario(scenario, params);
    const std::size_t n_trials = prediction.trials.size();
    const std::size_t total = n_trials * static_cast<std::size_t>(participants);
    std::vector<TrialRecord> records(total);
    std::vector<std::exception_ptr> failures(total);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i) {
        try {
            const std::size_t participant = static_cast<std::size_t>(i) / n_trials;
            const std::size_t trial = static_cast<std::size_t>(i) % n_trials;
            records[i] = simulate_record(prediction.trials[trial], scenario.modality,
                                         participant_label(static_cast<int>(participant)),
                                         noise, seed, static_cast<std::uint64_t>(i));
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return records;
}

std::vector<TrialRecord> simulate_logs_serial(const Scenario& scenario,
                                              const OperatorParams& params,
                                              const NoiseSpec& noise, std::uint64_t seed,
                                              int participants) {
    noise.validate();
    if (participants < 1) throw SchemaError("participant count must be >= 1");
    const ScenarioPrediction prediction = predict_scenario_serial(scenario, params);
    const std::size_t n_trials = prediction.trials.size();
    std::vector<TrialRecord> records;
    records.reserve(n_trials * static_cast<std::size_t>(participants));
    std::uint64_t stream = 0;
    for (int participant = 0; participant < participants; ++participant) {
        const std::string label = participant_label(participant);
        for (std::size_t trial = 0; trial < n_trials; ++trial, ++stream)
            records.push_back(simulate_record(prediction.trials[trial], scenario.modality,
                                              label, noise, seed, stream));
    }
    return records;
}

} // namespace klm3d
