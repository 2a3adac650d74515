#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "klm3d/io.hpp"
#include "klm3d/scenario.hpp"
#include "klm3d/simulate.hpp"
#include "klm3d/stats.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    const auto begin = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto end = Clock::now();
    return std::chrono::duration<double, std::milli>(end - begin).count() /
           static_cast<double>(reps);
}

void report_row(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s %12.3f %12.3f %9.2fx   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    const int participants = argc > 2 ? std::atoi(argv[2]) : 50;

    using namespace klm3d;
    const OperatorParams params = OperatorParams::defaults();
    const Scenario menu = generate_menu_scenario(ModalityName::Controller, MenuLayout{}, params);
    const Scenario manip =
        generate_manipulation_scenario(ModalityName::Controller, 42, ManipulationLayout{}, params);

    NoiseSpec noise;
    noise.kind = NoiseKind::gaussian;
    noise.scale = 0.05;
    noise.failure_rate = 0.02;
    noise.outlier_rate = 0.01;

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled in this build\n");
#endif
    std::printf("reps per measurement: %d, simulated participants: %d\n\n", reps, participants);
    std::printf("%-22s %12s %12s %10s   %s\n", "operation", "serial (ms)", "parallel (ms)",
                "speedup", "outputs");

    bool all_match = true;

    {
        const ScenarioPrediction serial = predict_scenario_serial(manip, params);
        const ScenarioPrediction parallel = predict_scenario(manip, params);
        bool match = serial.total_ms == parallel.total_ms &&
                     serial.trials.size() == parallel.trials.size();
        for (std::size_t i = 0; match && i < serial.trials.size(); ++i)
            match = serial.trials[i].total_ms == parallel.trials[i].total_ms &&
                    serial.trials[i].per_phase_ms == parallel.trials[i].per_phase_ms;
        all_match = all_match && match;
        const double t_serial =
            time_ms([&] { (void)predict_scenario_serial(manip, params); }, reps);
        const double t_parallel = time_ms([&] { (void)predict_scenario(manip, params); }, reps);
        report_row("predict/manipulation", t_serial, t_parallel, match);
    }

    {
        const auto serial = simulate_logs_serial(manip, params, noise, 7, participants);
        const auto parallel = simulate_logs(manip, params, noise, 7, participants);
        const bool match = logs_to_csv(serial) == logs_to_csv(parallel);
        all_match = all_match && match;
        const double t_serial =
            time_ms([&] { (void)simulate_logs_serial(manip, params, noise, 7, participants); },
                    reps);
        const double t_parallel =
            time_ms([&] { (void)simulate_logs(manip, params, noise, 7, participants); }, reps);
        report_row("simulate/manipulation", t_serial, t_parallel, match);
    }

    {
        std::vector<TrialRecord> records;
        for (const Scenario* scenario : {&menu, &manip}) {
            const auto part = simulate_logs(*scenario, params, noise, 11, participants);
            records.insert(records.end(), part.begin(), part.end());
        }
        EvalOptions options;
        const EvalReport serial = evaluate_logs_serial(records, options);
        const EvalReport parallel = evaluate_logs(records, options);
        const ReportMeta meta;
        const bool match = report_to_json(serial, meta) == report_to_json(parallel, meta);
        all_match = all_match && match;
        const double t_serial =
            time_ms([&] { (void)evaluate_logs_serial(records, options); }, reps);
        const double t_parallel = time_ms([&] { (void)evaluate_logs(records, options); }, reps);
        report_row("evaluate/mixed", t_serial, t_parallel, match);
    }

    if (!all_match) {
        std::fprintf(stderr, "serial and parallel outputs diverged\n");
        return 1;
    }
    return 0;
}
