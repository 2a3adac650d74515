#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "klm3d/operators.hpp"

namespace klm3d {

enum class TaskKind { menu_selection, manipulation };

enum class ModalityName {
    Controller,
    ControllerBlink,
    GazeController,
    GazeAirtap,
    GazeDwell,
    Hand
};

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);
std::string to_string(ModalityName name);
ModalityName modality_from_string(const std::string& s);

// Modalities available for a task. GazeDwell is menu-only: dwell cannot
// signal the end of a continuous manipulation.
std::vector<ModalityName> modalities_for(TaskKind kind);

// Full configured parameter set: one coefficient block per model plus the
// confirmation durations, all overridable from a params file.
struct OperatorParams {
    DistalPointingParams distal;
    GazeParams gaze;
    HandParams hand;
    std::map<ConfirmationName, double> confirmations_ms;

    static OperatorParams defaults();
    ConfirmationOperator confirmation(ConfirmationName name) const;
    void validate() const;
};

// An input modality bound to its movement-time model and the confirmation
// act it uses to end a phase.
struct Modality {
    ModalityName name = ModalityName::Controller;
    OperatorModel mt_model;
    ConfirmationOperator confirmation;
};

Modality make_modality(ModalityName name, TaskKind task, const OperatorParams& params);

// One phase as stored in a scenario: geometry plus the confirmation kind.
// Durations are resolved from OperatorParams at prediction time.
struct PhaseSpec {
    MovementSpec movement;
    ConfirmationName confirmation = ConfirmationName::none;
};

struct TrialSpec {
    int id = 0;
    std::vector<PhaseSpec> phases;
};

struct Scenario {
    TaskKind task_kind = TaskKind::menu_selection;
    ModalityName modality = ModalityName::Controller;
    std::vector<TrialSpec> trials;

    void validate() const;
};

// 16-button two-page menu in front of the viewer. Lengths that mirror the
// published dimensions are given in inches; everything is converted to
// meters during generation. button_pitch_in is center to center.
struct MenuLayout {
    double viewer_distance_m = 0.832104;
    double menu_width_in = 14.16;
    double menu_height_in = 7.44;
    double button_size_in = 2.28;
    double button_pitch_in = 3.19;
    double next_button_gap_in = 3.19;

    void validate() const;
};

// Tabletop frame: x side to side, y up, z into the table away from the
// viewer. Cylinder starts sit on the surface at the listed x offsets.
struct ManipulationLayout {
    Vec3 device_origin{0.0, 0.50, -0.10};
    std::array<Vec3, 4> start_positions{Vec3{-0.22, 0.0, 0.40}, Vec3{-0.10, 0.0, 0.40},
                                        Vec3{0.10, 0.0, 0.40}, Vec3{0.22, 0.0, 0.40}};
    double min_distance_m = 0.12;
    double max_distance_m = 0.35;
    double min_scale = 1.2;
    double max_scale = 4.0;
    double base_height_m = 0.05;
    double target_diameter_m = 0.09;
    double handle_diameter_m = 0.04;
    double scale_target_extent_m = 0.02;

    void validate() const;
};

// Buttons 1-8 are single-phase selections from the home position; 9-16 go
// through the Next button and take two phases.
Scenario generate_menu_scenario(ModalityName modality, const MenuLayout& layout,
                                const OperatorParams& params);

// 64 trials: 4 starts x (8 depth-oriented + 8 side-to-side) targets, three
// phases each (placement, handle search, scale pull). Distances and scale
// factors are drawn from the seeded stream, then the trial order is
// shuffled with it; the same seed reproduces the scenario bit-exactly.
Scenario generate_manipulation_scenario(ModalityName modality, std::uint64_t seed,
                                        const ManipulationLayout& layout,
                                        const OperatorParams& params);

struct ScenarioPrediction {
    struct Trial {
        int trial_id = 0;
        std::vector<double> per_phase_ms;
        double total_ms = 0.0;
    };
    std::vector<Trial> trials;
    double total_ms = 0.0;
    double mean_ms = 0.0;
};

// Predicts every trial of a scenario. The parallel entry point and the
// serial reference compute bit-identical results.
ScenarioPrediction predict_scenario(const Scenario& s, const OperatorParams& params);
ScenarioPrediction predict_scenario_serial(const Scenario& s, const OperatorParams& params);

} // namespace klm3d
