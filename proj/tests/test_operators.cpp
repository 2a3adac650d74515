#include <cmath>

#include "doctest.h"
#include "oracle.hpp"

#include "klm3d/operators.hpp"
#include "klm3d/rng.hpp"

using namespace klm3d;

namespace {

MovementSpec make_spec(const Vec3& origin, const Vec3& start, const Vec3& center,
                       double extent) {
    MovementSpec spec;
    spec.origin = origin;
    spec.start = start;
    spec.target.center = center;
    spec.target.extent = extent;
    return spec;
}

} // namespace

TEST_CASE("angular index of difficulty point examples") {
    CHECK(id_ang_bits(0.0, 1.0) == 0.0);
    CHECK(std::fabs(id_ang_bits(15.0, 1.0) - 4.0) < 1e-12);
    const double id = id_ang_bits(20.0, 2.0);
    CHECK(std::fabs(id - 3.45943161863729726) < 1e-9);
    CHECK(std::fabs(id - 3.4594) < 1e-4);
}

TEST_CASE("angular index of difficulty is unit invariant") {
    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const double alpha = rng.uniform(0.0, 170.0);
        const double omega = rng.uniform(0.1, 30.0);
        const double k = rng.uniform(0.01, 100.0);
        CHECK(std::fabs(id_ang_bits(k * alpha, k * omega) - id_ang_bits(alpha, omega)) <
              1e-9);
    }
}

TEST_CASE("index of difficulty formulations") {
    CHECK(std::fabs(id_fitts_bits(1.0, 1.0) - 1.0) < 1e-12);
    CHECK(std::fabs(id_fitts_bits(0.5, 1.0)) < 1e-12);
    CHECK(std::fabs(id_fitts_bits(4.0, 1.0) - 3.0) < 1e-12);
    CHECK(id_shannon_bits(0.0, 1.0) == 0.0);
    CHECK(std::fabs(id_shannon_bits(1.0, 1.0) - 1.0) < 1e-12);
    CHECK_THROWS_AS(id_ang_bits(1.0, 0.0), InvalidWidth);
    CHECK_THROWS_AS(id_fitts_bits(1.0, -1.0), InvalidWidth);
    CHECK_THROWS_AS(id_shannon_bits(1.0, 0.0), InvalidWidth);
    CHECK_THROWS_AS(id_ang_bits(-1.0, 1.0), DegenerateGeometry);
    CHECK_THROWS_AS(id_shannon_bits(-1.0, 1.0), DegenerateGeometry);
}

TEST_CASE("angular pointing movement time point examples") {
    const DistalPointingParams params;
    CHECK(std::fabs(mt_distal_pointing_ms(0.0, params) - 210.0) < 1e-9);
    CHECK(std::fabs(mt_distal_pointing_ms(4.0, params) - 850.0) < 1e-9);
    CHECK(std::fabs(mt_distal_pointing_ms(3.4594, params) - 763.504) < 1e-9);
    CHECK(std::fabs(mt_distal_pointing_ms(3.4594, params) - 763.5) < 0.1);
}

TEST_CASE("gaze movement time is constant below the threshold") {
    GazeParams params;
    CHECK(mt_gaze_ms(1.0, params) == 232.0);
    CHECK(mt_gaze_ms(1.7399, params) == 232.0);
    CHECK(mt_gaze_ms(0.0, params) == 232.0);
}

TEST_CASE("gaze movement time above the threshold uses the configured line") {
    GazeParams params;
    params.a_ms = 100.0;
    params.b_ms_per_bit = 150.0;
    CHECK(std::fabs(mt_gaze_ms(3.0, params) - 550.0) < 1e-9);
    // The boundary value itself belongs to the affine branch.
    CHECK(std::fabs(mt_gaze_ms(1.74, params) - (100.0 + 150.0 * 1.74)) < 1e-9);
}

TEST_CASE("gaze movement time without coefficients fails above the threshold only") {
    GazeParams params;
    CHECK_NOTHROW(mt_gaze_ms(1.0, params));
    CHECK_THROWS_AS(mt_gaze_ms(2.0, params), MissingCoefficients);
    CHECK_THROWS_AS(mt_gaze_ms(1.74, params), MissingCoefficients);
}

TEST_CASE("hand movement time point examples") {
    const HandParams params;
    CHECK(std::fabs(mt_hand_ms(0.0, 0.1, 0.0, params) - 167.6) < 1e-9);
    CHECK(std::fabs(mt_hand_ms(0.30, 0.10, 0.0, params) - 714.6) < 1e-9);
    CHECK(std::fabs(mt_hand_ms(0.30, 0.10, 10.0, params) - 748.1) < 1e-9);
    CHECK_THROWS_AS(mt_hand_ms(0.1, 0.0, 0.0, params), InvalidWidth);
    CHECK_THROWS_AS(mt_hand_ms(-0.1, 0.1, 0.0, params), DegenerateGeometry);
    CHECK_THROWS_AS(mt_hand_ms(0.1, 0.1, -1.0, params), DegenerateGeometry);
}

TEST_CASE("movement time models are strictly monotone") {
    const DistalPointingParams distal;
    const HandParams hand;
    double prev_distal = -1.0;
    double prev_hand_d = -1.0;
    double prev_hand_ctd = -1.0;
    for (int i = 0; i <= 40; ++i) {
        const double id = 0.1 * i;
        const double mt = mt_distal_pointing_ms(id, distal);
        CHECK(mt > prev_distal);
        prev_distal = mt;

        const double mt_d = mt_hand_ms(0.01 * i, 0.1, 0.0, hand);
        CHECK(mt_d > prev_hand_d);
        prev_hand_d = mt_d;

        const double mt_ctd = mt_hand_ms(0.1, 0.1, 0.5 * i, hand);
        CHECK(mt_ctd > prev_hand_ctd);
        prev_hand_ctd = mt_ctd;
    }
}

TEST_CASE("gaze model is piecewise constant then affine") {
    GazeParams params;
    params.a_ms = 100.0;
    params.b_ms_per_bit = 150.0;
    double prev = 0.0;
    for (double id = 0.0; id < params.id_crit_bits; id += 0.05)
        CHECK(mt_gaze_ms(id, params) == 232.0);
    prev = mt_gaze_ms(params.id_crit_bits, params);
    for (double id = params.id_crit_bits + 0.05; id < 5.0; id += 0.05) {
        const double mt = mt_gaze_ms(id, params);
        CHECK(mt > prev);
        prev = mt;
    }
}

TEST_CASE("phase time composition per modality") {
    const OperatorModel distal = OperatorModel::default_distal_pointing();

    // Target direction 15 deg off the start direction at unit distance, so
    // alpha = 15 and, with extent 2*tan(0.5 deg), omega = 1: ID = 4 bits.
    MovementSpec spec =
        make_spec({0, 0, 0}, {0, 0, 1},
                  {0.25881904510252076, 0, 0.96592582628906829},
                  2.0 * 0.00872686779075879317);
    const double alpha = angular_distance_deg(spec);
    const double omega = angular_width_deg(spec);
    CHECK(std::fabs(id_ang_bits(alpha, omega) - 4.0) < 1e-6);

    Phase controller;
    controller.movement = spec;
    controller.mt_model = &distal;
    controller.confirmation = ConfirmationOperator{ConfirmationName::trigger, 208.0};
    const double mt = movement_time_ms(spec, distal);
    CHECK(std::fabs(mt - 850.0) < 1e-3);
    CHECK(phase_time_ms(controller) == mt);

    Phase blink = controller;
    blink.confirmation = ConfirmationOperator{ConfirmationName::blink, 200.0};
    CHECK(std::fabs(phase_time_ms(blink) - (mt - 8.0)) < 1e-12);

    const OperatorModel gaze = OperatorModel::default_gaze();
    MovementSpec small = make_spec({0, 0, 0}, {0, 0, 1}, {0.03, 0, 1.0}, 0.05);
    Phase airtap;
    airtap.movement = small;
    airtap.mt_model = &gaze;
    airtap.confirmation = ConfirmationOperator{ConfirmationName::airtap, 428.0};
    CHECK(std::fabs(phase_time_ms(airtap) - 660.0) < 1e-9);

    Phase gaze_trigger = airtap;
    gaze_trigger.confirmation = ConfirmationOperator{ConfirmationName::trigger, 208.0};
    CHECK(std::fabs(phase_time_ms(gaze_trigger) - 440.0) < 1e-9);

    Phase dwell = airtap;
    dwell.confirmation = ConfirmationOperator{ConfirmationName::dwell, 500.0};
    CHECK(std::fabs(phase_time_ms(dwell) - 732.0) < 1e-9);
}

TEST_CASE("phase time with applied equal to embedded is the raw movement time") {
    SplitMix64 rng(21);
    const OperatorModel distal = OperatorModel::default_distal_pointing();
    for (int i = 0; i < 100; ++i) {
        const MovementSpec spec =
            make_spec({0, 0, 0}, {0, 0, 1},
                      {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 1.0},
                      rng.uniform(0.01, 0.3));
        Phase phase;
        phase.movement = spec;
        phase.mt_model = &distal;
        phase.confirmation = ConfirmationOperator{ConfirmationName::trigger, 208.0};
        CHECK(phase_time_ms(phase) == movement_time_ms(spec, distal));
    }
}

TEST_CASE("trial prediction sums phases and keeps the breakdown") {
    const OperatorModel hand = OperatorModel::default_hand();

    // D = 0.30 m, W = 0.10 m, CTD = 10 cm: 748.1 ms.
    Phase placement;
    placement.movement = make_spec({0, 0.5, -0.1}, {0, 0, 0},
                                   {0.1, 0.26457513110645905905, 0.1}, 0.1);
    placement.movement.depth_axis = Vec3{0, 0, 1};
    placement.mt_model = &hand;
    placement.confirmation = ConfirmationOperator{ConfirmationName::none, 0.0};
    CHECK(std::fabs(linear_distance_m(placement.movement) - 0.3) < 1e-12);
    CHECK(std::fabs(depth_change_cm(placement.movement) - 10.0) < 1e-12);
    CHECK(std::fabs(phase_time_ms(placement) - 748.1) < 1e-9);

    Phase search;
    search.movement = make_spec({0, 0.5, -0.1}, {0.2, 0, 0.2}, {0.2, 0, 0.2}, 0.1);
    search.movement.depth_axis = Vec3{0, 0, 1};
    search.mt_model = &hand;
    search.confirmation = ConfirmationOperator{ConfirmationName::dwell, 278.4};
    CHECK(std::fabs(phase_time_ms(search) - 446.0) < 1e-9);

    Phase scale = search;
    scale.confirmation = ConfirmationOperator{ConfirmationName::dwell, 444.4};
    CHECK(std::fabs(phase_time_ms(scale) - 612.0) < 1e-9);

    const TrialPrediction trial = predict_trial({placement, search, scale});
    REQUIRE(trial.per_phase_ms.size() == 3);
    CHECK(std::fabs(trial.per_phase_ms[0] - 748.1) < 1e-9);
    CHECK(std::fabs(trial.per_phase_ms[1] - 446.0) < 1e-9);
    CHECK(std::fabs(trial.per_phase_ms[2] - 612.0) < 1e-9);
    CHECK(std::fabs(trial.total_ms - 1806.1) < 1e-9);
}

TEST_CASE("trial prediction is additive over concatenation") {
    const OperatorModel distal = OperatorModel::default_distal_pointing();
    SplitMix64 rng(31);
    for (int i = 0; i < 100; ++i) {
        Phase a;
        a.movement = make_spec({0, 0, 0}, {0, 0, 1},
                               {rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0},
                               rng.uniform(0.02, 0.2));
        a.mt_model = &distal;
        a.confirmation = ConfirmationOperator{ConfirmationName::trigger, 208.0};
        Phase b = a;
        b.movement.target.center = Vec3{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 1.0};

        const TrialPrediction joint = predict_trial({a, b});
        const TrialPrediction first = predict_trial({a});
        const TrialPrediction second = predict_trial({b});
        CHECK(joint.total_ms == first.total_ms + second.total_ms);
        CHECK(joint.per_phase_ms[0] == first.per_phase_ms[0]);
        CHECK(joint.per_phase_ms[1] == second.per_phase_ms[0]);
    }
}

TEST_CASE("operator validation errors") {
    ConfirmationOperator bad_none{ConfirmationName::none, 5.0};
    CHECK_THROWS_AS(bad_none.validate(), SchemaError);
    ConfirmationOperator negative{ConfirmationName::dwell, -1.0};
    CHECK_THROWS_AS(negative.validate(), SchemaError);

    OperatorModel no_embed = OperatorModel::default_distal_pointing();
    no_embed.embedded_confirmation.reset();
    CHECK_THROWS_AS(no_embed.validate(), SchemaError);

    OperatorModel bad_slope = OperatorModel::default_distal_pointing();
    bad_slope.params = DistalPointingParams{0.21, 0.0};
    CHECK_THROWS_AS(bad_slope.validate(), SchemaError);

    OperatorModel bad_gaze = OperatorModel::default_gaze();
    GazeParams gp;
    gp.id_crit_bits = 0.0;
    bad_gaze.params = gp;
    CHECK_THROWS_AS(bad_gaze.validate(), SchemaError);

    Phase unbound;
    unbound.movement = make_spec({0, 0, 0}, {0, 0, 1}, {0.1, 0, 1}, 0.05);
    CHECK_THROWS_AS(phase_time_ms(unbound), SchemaError);

    CHECK_THROWS_AS(predict_trial({}), EmptyScenario);
}

TEST_CASE("default confirmation durations") {
    CHECK(default_confirmation_ms(ConfirmationName::none) == 0.0);
    CHECK(default_confirmation_ms(ConfirmationName::trigger) == 208.0);
    CHECK(default_confirmation_ms(ConfirmationName::airtap) == 428.0);
    CHECK(default_confirmation_ms(ConfirmationName::pinch_release) == 214.0);
    CHECK(default_confirmation_ms(ConfirmationName::blink) == 200.0);
    CHECK(default_confirmation_ms(ConfirmationName::dwell) == 500.0);
}
