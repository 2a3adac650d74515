#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "klm3d/errors.hpp"
#include "klm3d/geometry.hpp"

namespace klm3d {

enum class ConfirmationName { none, trigger, airtap, pinch_release, blink, dwell };

// Discrete confirmation act appended to a movement (button press, dwell, ...).
struct ConfirmationOperator {
    ConfirmationName name = ConfirmationName::none;
    double duration_ms = 0.0;

    void validate() const;
};

// Default durations in ms for each confirmation kind.
double default_confirmation_ms(ConfirmationName name);

std::string to_string(ConfirmationName name);
ConfirmationName confirmation_from_string(const std::string& s);

// Index-of-difficulty formulation used when reducing gaze geometry to bits.
enum class IdFormulation { fitts, shannon };

std::string to_string(IdFormulation f);
IdFormulation id_formulation_from_string(const std::string& s);

// Angular pointing model, coefficients in seconds and seconds/bit.
struct DistalPointingParams {
    double a_s = 0.21;
    double b_s_per_bit = 0.16;
};

// Gaze model: constant saccade time below id_crit, affine above it.
// The affine coefficients have no published default and stay unset until
// configured or fitted.
struct GazeParams {
    std::optional<double> a_ms;
    std::optional<double> b_ms_per_bit;
    double id_crit_bits = 1.74;
    double saccade_ms = 232.0;
    IdFormulation id_formulation = IdFormulation::fitts;
};

// Direct-touch model with a depth-change term, coefficients in ms.
struct HandParams {
    double a_ms = 167.6;
    double b_ms_per_bit = 273.5;
    double c_ms_per_cm = 3.35;
};

enum class ModelKind { distal_pointing, gaze, hand };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// A movement-time model plus the confirmation its predictions already
// contain, if any. phase_time_ms subtracts that embedded duration so any
// model/confirmation pairing composes uniformly.
struct OperatorModel {
    ModelKind kind = ModelKind::distal_pointing;
    std::variant<DistalPointingParams, GazeParams, HandParams> params = DistalPointingParams{};
    std::optional<ConfirmationOperator> embedded_confirmation;

    void validate() const;
    double embedded_confirmation_ms() const;

    static OperatorModel default_distal_pointing();
    static OperatorModel default_gaze();
    static OperatorModel default_hand();
};

// One movement plus its confirmation, evaluated under a bound model.
struct Phase {
    MovementSpec movement;
    const OperatorModel* mt_model = nullptr;
    ConfirmationOperator confirmation;
};

struct TrialPrediction {
    std::vector<double> per_phase_ms;
    double total_ms = 0.0;
};

// Index of difficulty in bits from angular distance and angular width.
double id_ang_bits(double alpha_deg, double omega_deg);

// log2(2A/W): classic form used by the gaze model above its threshold.
double id_fitts_bits(double amplitude, double width);

// log2(A/W + 1): alternative form selectable through GazeParams.
double id_shannon_bits(double amplitude, double width);

double mt_distal_pointing_ms(double id_bits, const DistalPointingParams& params);
double mt_gaze_ms(double id_bits, const GazeParams& params);
double mt_hand_ms(double distance_m, double width_m, double ctd_cm, const HandParams& params);

// Movement time for one MovementSpec under the model's kind.
double movement_time_ms(const MovementSpec& movement, const OperatorModel& model);

// movement time + applied confirmation - embedded confirmation.
double phase_time_ms(const Phase& phase);

// Sums phase times over an ordered phase list; keeps per-phase values.
TrialPrediction predict_trial(const std::vector<Phase>& phases);

} // namespace klm3d
