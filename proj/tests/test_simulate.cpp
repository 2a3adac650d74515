#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "klm3d/io.hpp"
#include "klm3d/scenario.hpp"
#include "klm3d/simulate.hpp"

using namespace klm3d;

namespace {

Scenario menu_controller() {
    return generate_menu_scenario(ModalityName::Controller, MenuLayout{},
                                  OperatorParams::defaults());
}

Scenario manipulation_controller(std::uint64_t seed) {
    return generate_manipulation_scenario(ModalityName::Controller, seed,
                                          ManipulationLayout{}, OperatorParams::defaults());
}

NoiseSpec make_noise(NoiseKind kind, double scale) {
    NoiseSpec noise;
    noise.kind = kind;
    noise.scale = scale;
    return noise;
}

int count_failed(const std::vector<TrialRecord>& records) {
    return static_cast<int>(std::count_if(records.begin(), records.end(),
                                          [](const TrialRecord& r) { return r.failed; }));
}

} // namespace

TEST_CASE("noise kind names round-trip") {
    for (NoiseKind kind : {NoiseKind::none, NoiseKind::gaussian, NoiseKind::lognormal})
        CHECK(noise_kind_from_string(to_string(kind)) == kind);
    CHECK(to_string(NoiseKind::gaussian) == "gaussian");
    CHECK_THROWS_AS(noise_kind_from_string("uniform"), SchemaError);
    CHECK_THROWS_AS(noise_kind_from_string(""), SchemaError);
}

TEST_CASE("noise spec validation rejects out-of-range fields") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();

    NoiseSpec noise;
    noise.scale = -0.1;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);

    noise = NoiseSpec{};
    noise.failure_rate = -0.01;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);
    noise.failure_rate = 1.5;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);

    noise = NoiseSpec{};
    noise.outlier_rate = 2.0;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);

    noise = NoiseSpec{};
    noise.outlier_multiplier = 1.0;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);
    noise.outlier_multiplier = 0.5;
    CHECK_THROWS_AS(simulate_logs(scenario, params, noise, 1), SchemaError);

    CHECK_THROWS_AS(simulate_logs(scenario, params, NoiseSpec{}, 1, 0), SchemaError);
    CHECK_THROWS_AS(simulate_logs_serial(scenario, params, NoiseSpec{}, 1, -3), SchemaError);
}

TEST_CASE("noise none reproduces the prediction exactly") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    const ScenarioPrediction prediction = predict_scenario(scenario, params);

    const auto records = simulate_logs(scenario, params, make_noise(NoiseKind::none, 0.0), 42);
    REQUIRE(records.size() == prediction.trials.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        const auto& trial = prediction.trials[i];
        CHECK(record.trial_id == trial.trial_id);
        CHECK(record.participant_id == "P01");
        CHECK(record.modality == ModalityName::Controller);
        CHECK_FALSE(record.failed);
        CHECK(record.predicted_total_ms == trial.total_ms);
        CHECK(record.actual_total_ms == trial.total_ms);
        REQUIRE(record.actual_phase_ms.size() == trial.per_phase_ms.size());
        for (std::size_t p = 0; p < trial.per_phase_ms.size(); ++p) {
            CHECK(record.predicted_phase_ms[p] == trial.per_phase_ms[p]);
            CHECK(record.actual_phase_ms[p] == trial.per_phase_ms[p]);
        }
    }
}

TEST_CASE("one epsilon per trial scales every phase by the same ratio") {
    const Scenario scenario = manipulation_controller(7);
    const OperatorParams params = OperatorParams::defaults();

    for (NoiseKind kind : {NoiseKind::gaussian, NoiseKind::lognormal}) {
        CAPTURE(to_string(kind));
        const auto records = simulate_logs(scenario, params, make_noise(kind, 0.05), 11);
        REQUIRE(records.size() == 64);
        for (const auto& record : records) {
            REQUIRE(record.actual_phase_ms.size() == 3);
            const double ratio = record.actual_phase_ms[0] / record.predicted_phase_ms[0];
            CHECK(ratio > 0.0);
            for (std::size_t p = 1; p < 3; ++p)
                CHECK(record.actual_phase_ms[p] / record.predicted_phase_ms[p] ==
                      doctest::Approx(ratio).epsilon(1e-12));
            double total = 0.0;
            for (double ms : record.actual_phase_ms) total += ms;
            CHECK(record.actual_total_ms == total);
        }
    }
}

TEST_CASE("gaussian noise centers the percent difference near zero") {
    const Scenario scenario = manipulation_controller(3);
    const OperatorParams params = OperatorParams::defaults();
    const double scale = 0.05;
    const auto records =
        simulate_logs(scenario, params, make_noise(NoiseKind::gaussian, scale), 2026, 4);
    REQUIRE(records.size() == 256);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& record : records) {
        const double eps = record.actual_total_ms / record.predicted_total_ms - 1.0;
        sum += eps;
        sum_sq += eps * eps;
    }
    const double n = static_cast<double>(records.size());
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1));
    CHECK(std::fabs(mean) < 3.0 * scale / std::sqrt(n));
    CHECK(sd > 0.03);
    CHECK(sd < 0.07);
}

TEST_CASE("lognormal noise keeps every actual time positive") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    const auto records =
        simulate_logs(scenario, params, make_noise(NoiseKind::lognormal, 0.25), 5, 8);
    REQUIRE(records.size() == 128);
    for (const auto& record : records) {
        CHECK(record.actual_total_ms > 0.0);
        for (double ms : record.actual_phase_ms) CHECK(ms > 0.0);
        CHECK(record.actual_phase_ms[0] / record.predicted_phase_ms[0] > 0.0);
    }
}

TEST_CASE("extreme downward noise clamps at the positive floor") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    const auto records =
        simulate_logs(scenario, params, make_noise(NoiseKind::gaussian, 1000.0), 9, 4);
    REQUIRE(records.size() == 64);
    int clamped = 0;
    int unclamped = 0;
    for (const auto& record : records) {
        for (double ms : record.actual_phase_ms) {
            CHECK(ms >= 1e-3);
            if (ms == 1e-3)
                ++clamped;
            else
                ++unclamped;
        }
    }
    CHECK(clamped > 0);
    CHECK(unclamped > 0);
}

TEST_CASE("failures are flagged without changing the recorded times") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    NoiseSpec noise = make_noise(NoiseKind::none, 0.0);
    noise.failure_rate = 0.5;
    const auto records = simulate_logs(scenario, params, noise, 13, 8);
    REQUIRE(records.size() == 128);
    const int failed = count_failed(records);
    CHECK(failed > 0);
    CHECK(failed < 128);
    for (const auto& record : records)
        CHECK(record.actual_total_ms == record.predicted_total_ms);

    NoiseSpec all_fail = noise;
    all_fail.failure_rate = 1.0;
    CHECK(count_failed(simulate_logs(scenario, params, all_fail, 13)) == 16);
    all_fail.failure_rate = 0.0;
    CHECK(count_failed(simulate_logs(scenario, params, all_fail, 13)) == 0);
}

TEST_CASE("failure counts are reproducible for a fixed seed") {
    const Scenario scenario = manipulation_controller(21);
    const OperatorParams params = OperatorParams::defaults();
    NoiseSpec noise = make_noise(NoiseKind::gaussian, 0.05);
    noise.failure_rate = 0.1;

    const auto a = simulate_logs(scenario, params, noise, 77, 16);
    const auto b = simulate_logs(scenario, params, noise, 77, 16);
    const auto c = simulate_logs_serial(scenario, params, noise, 77, 16);
    REQUIRE(a.size() == 1024);
    const int failed = count_failed(a);
    CHECK(failed == count_failed(b));
    CHECK(failed == count_failed(c));
    CHECK(failed > 60);
    CHECK(failed < 150);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].failed == b[i].failed);
}

TEST_CASE("outlier injection multiplies whole trials") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    NoiseSpec noise = make_noise(NoiseKind::none, 0.0);
    noise.outlier_rate = 0.2;
    noise.outlier_multiplier = 3.0;
    const auto records = simulate_logs(scenario, params, noise, 31, 16);
    REQUIRE(records.size() == 256);

    int outliers = 0;
    for (const auto& record : records) {
        REQUIRE(!record.actual_phase_ms.empty());
        const bool scaled = record.actual_phase_ms[0] != record.predicted_phase_ms[0];
        if (scaled) ++outliers;
        for (std::size_t p = 0; p < record.actual_phase_ms.size(); ++p) {
            const double expected =
                scaled ? record.predicted_phase_ms[p] * 3.0 : record.predicted_phase_ms[p];
            CHECK(record.actual_phase_ms[p] == expected);
        }
    }
    CHECK(outliers > 20);
    CHECK(outliers < 90);
}

TEST_CASE("participants get labeled blocks over the same trials") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    const auto records =
        simulate_logs(scenario, params, make_noise(NoiseKind::gaussian, 0.05), 3, 3);
    REQUIRE(records.size() == 48);

    std::set<std::string> labels;
    for (const auto& record : records) labels.insert(record.participant_id);
    CHECK(labels == std::set<std::string>{"P01", "P02", "P03"});
    for (int p = 0; p < 3; ++p)
        for (int t = 0; t < 16; ++t) {
            const auto& record = records[static_cast<std::size_t>(p * 16 + t)];
            char expected[8];
            std::snprintf(expected, sizeof(expected), "P%02d", p + 1);
            CHECK(record.participant_id == expected);
            CHECK(record.trial_id == t + 1);
        }
}

TEST_CASE("each participant block draws from its own substream") {
    const Scenario scenario = menu_controller();
    const OperatorParams params = OperatorParams::defaults();
    const NoiseSpec noise = make_noise(NoiseKind::gaussian, 0.05);

    const auto solo = simulate_logs(scenario, params, noise, 19, 1);
    const auto multi = simulate_logs(scenario, params, noise, 19, 3);
    REQUIRE(multi.size() == 48);
    CHECK(logs_to_csv(solo) ==
          logs_to_csv({multi.begin(), multi.begin() + static_cast<std::ptrdiff_t>(16)}));

    const auto block2 =
        logs_to_csv({multi.begin() + 16, multi.begin() + 32});
    CHECK(block2 != logs_to_csv(solo));
}

TEST_CASE("simulated logs are byte-identical across reruns") {
    const Scenario scenario = manipulation_controller(4);
    const OperatorParams params = OperatorParams::defaults();
    NoiseSpec noise = make_noise(NoiseKind::gaussian, 0.08);
    noise.failure_rate = 0.05;
    noise.outlier_rate = 0.02;

    const std::string a = logs_to_csv(simulate_logs(scenario, params, noise, 123, 5));
    const std::string b = logs_to_csv(simulate_logs(scenario, params, noise, 123, 5));
    const std::string other = logs_to_csv(simulate_logs(scenario, params, noise, 124, 5));
    CHECK(a == b);
    CHECK(a != other);
}

TEST_CASE("parallel and serial simulation agree bit for bit") {
    const OperatorParams params = OperatorParams::defaults();
    NoiseSpec noise = make_noise(NoiseKind::lognormal, 0.1);
    noise.failure_rate = 0.1;
    noise.outlier_rate = 0.05;

    for (std::uint64_t seed : {1ULL, 9ULL, 2026ULL}) {
        CAPTURE(seed);
        const Scenario menu = menu_controller();
        const Scenario manip = manipulation_controller(seed);
        CHECK(logs_to_csv(simulate_logs(menu, params, noise, seed, 4)) ==
              logs_to_csv(simulate_logs_serial(menu, params, noise, seed, 4)));
        CHECK(logs_to_csv(simulate_logs(manip, params, noise, seed, 2)) ==
              logs_to_csv(simulate_logs_serial(manip, params, noise, seed, 2)));
    }
}
