#include "klm3d/operators.hpp"

#include <cmath>

namespace klm3d {

void ConfirmationOperator::validate() const {
    if (!(duration_ms >= 0.0) || !std::isfinite(duration_ms))
        throw SchemaError("confirmation duration must be a finite value >= 0");
    if (name == ConfirmationName::none && duration_ms != 0.0)
        throw SchemaError("confirmation 'none' must have duration 0");
}

double default_confirmation_ms(ConfirmationName name) {
    switch (name) {
        case ConfirmationName::none: return 0.0;
        case ConfirmationName::trigger: return 208.0;
        case ConfirmationName::airtap: return 428.0;
        case ConfirmationName::pinch_release: return 214.0;
        case ConfirmationName::blink: return 200.0;
        case ConfirmationName::dwell: return 500.0;
    }
    throw SchemaError("unknown confirmation kind");
}

std::string to_string(ConfirmationName name) {
    switch (name) {
        case ConfirmationName::none: return "none";
        case ConfirmationName::trigger: return "trigger";
        case ConfirmationName::airtap: return "airtap";
        case ConfirmationName::pinch_release: return "pinch_release";
        case ConfirmationName::blink: return "blink";
        case ConfirmationName::dwell: return "dwell";
    }
    throw SchemaError("unknown confirmation kind");
}

ConfirmationName confirmation_from_string(const std::string& s) {
    if (s == "none") return ConfirmationName::none;
    if (s == "trigger") return ConfirmationName::trigger;
    if (s == "airtap") return ConfirmationName::airtap;
    if (s == "pinch_release") return ConfirmationName::pinch_release;
    if (s == "blink") return ConfirmationName::blink;
    if (s == "dwell") return ConfirmationName::dwell;
    throw SchemaError("unknown confirmation kind '" + s + "'");
}

std::string to_string(IdFormulation f) {
    return f == IdFormulation::fitts ? "fitts" : "shannon";
}

IdFormulation id_formulation_from_string(const std::string& s) {
    if (s == "fitts") return IdFormulation::fitts;
    if (s == "shannon") return IdFormulation::shannon;
    throw SchemaError("unknown id formulation '" + s + "'");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::distal_pointing: return "distal_pointing";
        case ModelKind::gaze: return "gaze";
        case ModelKind::hand: return "hand";
    }
    throw SchemaError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "distal_pointing") return ModelKind::distal_pointing;
    if (s == "gaze") return ModelKind::gaze;
    if (s == "hand") return ModelKind::hand;
    throw SchemaError("unknown model kind '" + s + "'");
}

void OperatorModel::validate() const {
    switch (kind) {
        case ModelKind::distal_pointing: {
            const auto* p = std::get_if<DistalPointingParams>(&params);
            if (!p) throw SchemaError("distal_pointing model carries wrong parameter set");
            if (!(p->b_s_per_bit > 0.0)) throw SchemaError("distal_pointing b must be > 0");
            if (!embedded_confirmation ||
                embedded_confirmation->name != ConfirmationName::trigger)
                throw SchemaError("distal_pointing model must embed a trigger confirmation");
            break;
        }
        case ModelKind::gaze: {
            const auto* p = std::get_if<GazeParams>(&params);
            if (!p) throw SchemaError("gaze model carries wrong parameter set");
            if (p->b_ms_per_bit && !(*p->b_ms_per_bit > 0.0))
                throw SchemaError("gaze b must be > 0");
            if (!(p->id_crit_bits > 0.0)) throw SchemaError("gaze id_crit must be > 0");
            if (!(p->saccade_ms > 0.0)) throw SchemaError("gaze saccade_ms must be > 0");
            break;
        }
        case ModelKind::hand: {
            const auto* p = std::get_if<HandParams>(&params);
            if (!p) throw SchemaError("hand model carries wrong parameter set");
            if (!(p->b_ms_per_bit > 0.0)) throw SchemaError("hand b must be > 0");
            break;
        }
    }
    if (embedded_confirmation) embedded_confirmation->validate();
}

double OperatorModel::embedded_confirmation_ms() const {
    return embedded_confirmation ? embedded_confirmation->duration_ms : 0.0;
}

OperatorModel OperatorModel::default_distal_pointing() {
    OperatorModel m;
    m.kind = ModelKind::distal_pointing;
    m.params = DistalPointingParams{};
    m.embedded_confirmation = ConfirmationOperator{
        ConfirmationName::trigger, default_confirmation_ms(ConfirmationName::trigger)};
    return m;
}

OperatorModel OperatorModel::default_gaze() {
    OperatorModel m;
    m.kind = ModelKind::gaze;
    m.params = GazeParams{};
    return m;
}

OperatorModel OperatorModel::default_hand() {
    OperatorModel m;
    m.kind = ModelKind::hand;
    m.params = HandParams{};
    return m;
}

double id_ang_bits(double alpha_deg, double omega_deg) {
    if (!(omega_deg > 0.0)) throw InvalidWidth("angular width must be > 0");
    if (alpha_deg < 0.0) throw DegenerateGeometry("angular distance must be >= 0");
    return std::log2(alpha_deg / omega_deg + 1.0);
}

double id_fitts_bits(double amplitude, double width) {
    if (!(width > 0.0)) throw InvalidWidth("width must be > 0");
    if (amplitude < 0.0) throw DegenerateGeometry("amplitude must be >= 0");
    return std::log2(2.0 * amplitude / width);
}

double id_shannon_bits(double amplitude, double width) {
    if (!(width > 0.0)) throw InvalidWidth("width must be > 0");
    if (amplitude < 0.0) throw DegenerateGeometry("amplitude must be >= 0");
    return std::log2(amplitude / width + 1.0);
}

double mt_distal_pointing_ms(double id_bits, const DistalPointingParams& params) {
    return (params.a_s + params.b_s_per_bit * id_bits) * 1000.0;
}

double mt_gaze_ms(double id_bits, const GazeParams& params) {
    if (id_bits < params.id_crit_bits) return params.saccade_ms;
    if (!params.a_ms || !params.b_ms_per_bit)
        throw MissingCoefficients(
            "gaze coefficients a/b are required for id >= id_crit and are not configured");
    return *params.a_ms + *params.b_ms_per_bit * id_bits;
}

double mt_hand_ms(double distance_m, double width_m, double ctd_cm, const HandParams& params) {
    if (!(width_m > 0.0)) throw InvalidWidth("width must be > 0");
    if (distance_m < 0.0) throw DegenerateGeometry("distance must be >= 0");
    if (ctd_cm < 0.0) throw DegenerateGeometry("depth change must be >= 0");
    return params.a_ms + params.b_ms_per_bit * std::log2(distance_m / width_m + 1.0) +
           params.c_ms_per_cm * ctd_cm;
}

double movement_time_ms(const MovementSpec& movement, const OperatorModel& model) {
    switch (model.kind) {
        case ModelKind::distal_pointing: {
            const auto& p = std::get<DistalPointingParams>(model.params);
            const double id =
                id_ang_bits(angular_distance_deg(movement), angular_width_deg(movement));
            return mt_distal_pointing_ms(id, p);
        }
        case ModelKind::gaze: {
            const auto& p = std::get<GazeParams>(model.params);
            const double alpha = angular_distance_deg(movement);
            const double omega = angular_width_deg(movement);
            const double id = p.id_formulation == IdFormulation::fitts
                                  ? id_fitts_bits(alpha, omega)
                                  : id_shannon_bits(alpha, omega);
            return mt_gaze_ms(id, p);
        }
        case ModelKind::hand: {
            const auto& p = std::get<HandParams>(model.params);
            return mt_hand_ms(linear_distance_m(movement),
                              movement.target.effective_extent(), depth_change_cm(movement), p);
        }
    }
    throw SchemaError("unknown model kind");
}

double phase_time_ms(const Phase& phase) {
    if (!phase.mt_model) throw SchemaError("phase has no movement-time model bound");
    const double mt = movement_time_ms(phase.movement, *phase.mt_model);
    const double applied = phase.confirmation.duration_ms;
    const double embedded = phase.mt_model->embedded_confirmation_ms();
    if (applied == embedded) return mt;
    return mt + applied - embedded;
}

TrialPrediction predict_trial(const std::vector<Phase>& phases) {
    if (phases.empty()) throw EmptyScenario("trial has no phases");
    TrialPrediction out;
    out.per_phase_ms.reserve(phases.size());
    for (const auto& phase : phases) {
        const double t = phase_time_ms(phase);
        out.per_phase_ms.push_back(t);
        out.total_ms += t;
    }
    return out;
}

} // namespace klm3d
